// src/cli.cc

// Copyright 2026  The noisebench Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include "noisebench/cli.h"

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <optional>

#include <fmt/chrono.h>
#include <fmt/format.h>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "json.hpp"
#include "noisebench/audio-io.h"
#include "noisebench/keyed-hash.h"
#include "noisebench/manifest.h"
#include "noisebench/mixer.h"
#include "noisebench/parallel.h"
#include "noisebench/score.h"
#include "noisebench/snr.h"

namespace noisebench {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct GlobalOptions {
  std::uint64_t seed = 0;
  int jobs = 0;
  std::string log_level = "info";
};

// Reports carry the resolved configuration and input checksums; the
// timestamp lives under "metadata" so that everything else is a pure
// function of the inputs.
void WriteReport(const fs::path &path, json payload, const json &config,
                 const json &inputs) {
  payload["config"] = config;
  payload["inputs"] = inputs;
  auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  payload["metadata"] = {
      {"generated_at", fmt::format("{:%Y-%m-%dT%H:%M:%SZ}", fmt::gmtime(now))},
      {"tool", "noisebench"}};
  if (!payload.contains("schema_version")) payload["schema_version"] = kSchemaVersion;
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  os << payload.dump(2) << "\n";
  if (!os) throw Error(fmt::format("cannot write {}", path.string()));
}

void WriteText(const fs::path &path, const std::string &text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  os << text;
  if (!os) throw Error(fmt::format("cannot write {}", path.string()));
}

fs::path CsvPathFor(const fs::path &json_path) {
  fs::path csv = json_path;
  csv.replace_extension(".csv");
  return csv;
}

json DataDirChecksums(const fs::path &dir) {
  json out = json::object();
  for (const char *name : {"wav.scp", "text", "utt2spk", "utt2dur"}) {
    if (fs::exists(dir / name)) out[(dir / name).string()] = FileChecksum(dir / name);
  }
  return out;
}

json GlobalConfig(const GlobalOptions &g) {
  return {{"seed", g.seed}, {"jobs", ResolveJobs(g.jobs)}};
}

struct ProfileArgs {
  std::string data, out;
  bool strict = false;
  FrameConfig frames;
};

int RunProfile(const ProfileArgs &a, const GlobalOptions &g, std::ostream &out) {
  CorpusManifest manifest = LoadManifest(a.data);
  ProfileOptions options;
  options.frames = a.frames;
  options.allow_partial = !a.strict;
  options.jobs = g.jobs;
  ProfileResult result = CorpusSnrProfile(manifest, options);

  json payload = ToJson(result.profile);
  json failures = json::array();
  for (const auto &f : result.failures)
    failures.push_back({{"utt_id", f.utt_id}, {"error", f.message}});
  payload["failures"] = failures;
  json config = GlobalConfig(g);
  config.update({{"command", "profile-snr"},
                 {"data", a.data},
                 {"frame_ms", a.frames.frame_ms},
                 {"hop_ms", a.frames.hop_ms},
                 {"strict", a.strict}});
  WriteReport(a.out, payload, config, DataDirChecksums(a.data));
  WriteText(CsvPathFor(a.out), ToCsv(result.profile));

  const SnrProfile &p = result.profile;
  out << fmt::format("{}: {} utterances, SNR mean {:.2f} dB, stddev {:.2f} dB, "
                     "median {:.2f} dB\n",
                     manifest.label(), p.per_utterance.size(), p.mean_db,
                     p.stddev_db, p.percentiles_db.at(50));
  for (const auto &f : result.failures)
    out << fmt::format("  failed {}: {}\n", f.utt_id, f.message);
  return result.failures.empty() ? kExitSuccess : kExitPartial;
}

struct MixArgs {
  std::string data, noise, out_root;
  std::vector<double> snrs;
  bool force = false;
  std::optional<std::size_t> calibration_size;
};

int RunMix(const MixArgs &a, const GlobalOptions &g, std::ostream &out) {
  CorpusManifest manifest = LoadManifest(a.data);
  AudioBuffer noise = ReadWav(a.noise);
  std::vector<fs::path> dirs;
  for (double t : a.snrs) {
    fs::path dir = fs::path(a.out_root) / (manifest.label() + SnrSuffix(t));
    if (fs::exists(dir) && !fs::is_empty(dir) && !a.force)
      throw Error(fmt::format("{} exists; pass --force to overwrite", dir.string()));
    dirs.push_back(dir);
  }

  MixCorpusOptions options;
  options.calibration_sample_size = a.calibration_size;
  options.jobs = g.jobs;
  json conditions = json::array();
  std::size_t total_skipped = 0;
  for (std::size_t k = 0; k < a.snrs.size(); ++k) {
    if (fs::exists(dirs[k])) fs::remove_all(dirs[k]);
    MixCorpusResult r = MixCorpus(manifest, noise, a.snrs[k], g.seed, dirs[k], options);
    total_skipped += r.plan.skipped.size();
    conditions.push_back({{"target_snr_db", a.snrs[k]},
                          {"dir", dirs[k].string()},
                          {"noise_gain", r.plan.noise_gain},
                          {"gain_db", r.plan.gain_db},
                          {"utterances", r.manifest.size()},
                          {"skipped", r.plan.skipped.size()}});
    out << fmt::format("{}: {} utterances, gain {:.3f} dB, {} skipped\n",
                       dirs[k].string(), r.manifest.size(), r.plan.gain_db,
                       r.plan.skipped.size());
    for (const auto &f : r.plan.skipped)
      out << fmt::format("  skipped {}: {}\n", f.utt_id, f.message);
  }
  json config = GlobalConfig(g);
  config.update({{"command", "mix"},
                 {"data", a.data},
                 {"noise", a.noise},
                 {"snr", a.snrs},
                 {"out_root", a.out_root},
                 {"calibration_size", a.calibration_size
                                          ? json(*a.calibration_size)
                                          : json(nullptr)}});
  json inputs = DataDirChecksums(a.data);
  inputs[a.noise] = FileChecksum(a.noise);
  WriteReport(fs::path(a.out_root) / "mix_run.json",
              {{"kind", "mix_run"}, {"conditions", conditions}}, config, inputs);
  return total_skipped > 0 ? kExitPartial : kExitSuccess;
}

struct MultiArgs {
  std::string clean, out;
  std::vector<std::string> noisy;
};

int RunMakeMulti(const MultiArgs &a, const GlobalOptions &g, std::ostream &out) {
  CorpusManifest clean = WithDurations(LoadManifest(a.clean), g.jobs);
  std::vector<CorpusManifest> noisy;
  for (const auto &dir : a.noisy) noisy.push_back(WithDurations(LoadManifest(dir), g.jobs));
  CorpusManifest merged = MakeMulticondition(clean, noisy);
  SaveManifest(merged, a.out);

  std::int64_t clean_micros = TotalDurationMicros(clean);
  std::int64_t total_micros = TotalDurationMicros(merged);
  json config = GlobalConfig(g);
  config.update({{"command", "make-multi"}, {"clean", a.clean}, {"noisy", a.noisy}});
  json inputs = DataDirChecksums(a.clean);
  for (const auto &dir : a.noisy) inputs.update(DataDirChecksums(dir));
  WriteReport(fs::path(a.out) / "multicondition.json",
              {{"kind", "multicondition"},
               {"conditions", 1 + noisy.size()},
               {"clean_utterances", clean.size()},
               {"clean_hours", MicrosToHours(clean_micros)},
               {"utterances", merged.size()},
               {"hours", MicrosToHours(total_micros)},
               {"total_micros", total_micros}},
              config, inputs);
  out << fmt::format("multicondition: {} utterances, {:.4f} hours ({} conditions, "
                     "clean {:.4f} hours)\n",
                     merged.size(), MicrosToHours(total_micros), 1 + noisy.size(),
                     MicrosToHours(clean_micros));
  return kExitSuccess;
}

struct SubsetArgs {
  std::string data, out;
  double hours = 0.0;
};

int RunSubset(const SubsetArgs &a, const GlobalOptions &g, std::ostream &out) {
  CorpusManifest manifest = WithDurations(LoadManifest(a.data), g.jobs);
  SubsetResult r = SubsetByHours(manifest, a.hours, g.seed);
  SaveManifest(r.manifest, a.out);
  json config = GlobalConfig(g);
  config.update({{"command", "subset"}, {"data", a.data}, {"hours", a.hours}});
  WriteReport(fs::path(a.out) / "subset.json",
              {{"kind", "subset"},
               {"target_hours", a.hours},
               {"selected_hours", MicrosToHours(r.selected_micros)},
               {"utterances", r.manifest.size()},
               {"speakers_covered", r.speakers_covered},
               {"speakers_total", r.speakers_total}},
              config, DataDirChecksums(a.data));
  out << fmt::format("{}: {} utterances, {:.4f} hours, {} of {} speakers\n",
                     a.out, r.manifest.size(), MicrosToHours(r.selected_micros),
                     r.speakers_covered, r.speakers_total);
  return kExitSuccess;
}

struct ScoreArgs {
  std::string ref, hyp, label, out, engine, alignments;
  bool ascii_runs = false;
};

int RunScore(const ScoreArgs &a, const GlobalOptions &g, std::ostream &out) {
  CorpusManifest refs = LoadManifest(a.ref);
  auto hyps = ReadTranscripts(a.hyp);
  TokenizeOptions tok;
  tok.group_ascii_runs = a.ascii_runs;
  ScoreReport report = ScoreCorpus(refs, hyps, a.label, tok, g.jobs);
  report.engine = a.engine.empty() ? fs::path(a.hyp).stem().string() : a.engine;

  json config = GlobalConfig(g);
  config.update({{"command", "score"},
                 {"ref", a.ref},
                 {"hyp", a.hyp},
                 {"label", a.label},
                 {"engine", report.engine},
                 {"ascii_runs", a.ascii_runs}});
  json inputs = DataDirChecksums(a.ref);
  inputs[a.hyp] = FileChecksum(a.hyp);
  WriteReport(a.out, ToJson(report), config, inputs);
  WriteText(CsvPathFor(a.out), ToCsv(report));
  if (!a.alignments.empty()) WriteText(a.alignments, AlignmentDump(report));

  if (!report.missing_hypotheses.empty())
    spdlog::warn("{} reference utterance(s) had no hypothesis; scored as empty",
                 report.missing_hypotheses.size());
  if (!report.extra_hypotheses.empty())
    spdlog::warn("{} hypothesis id(s) not in the references were ignored",
                 report.extra_hypotheses.size());
  out << fmt::format("CER {:.3f}\n", report.cer());
  out << fmt::format("%CER {:.2f} [ {} / {}, {} ins, {} del, {} sub ] {}\n",
                     100.0 * report.cer(),
                     report.substitutions + report.deletions + report.insertions,
                     report.total_ref_tokens, report.insertions, report.deletions,
                     report.substitutions, report.condition_label);
  return kExitSuccess;
}

struct CompareArgs {
  std::vector<std::string> baselines, candidates;
  std::int64_t n_units = 0;
  std::string out;
};

ScoreReport LoadScoreReport(const std::string &path) {
  std::ifstream is(path);
  if (!is) throw Error(fmt::format("cannot open {}", path));
  json j;
  try {
    is >> j;
  } catch (const json::exception &e) {
    throw Error(fmt::format("{}: {}", path, e.what()));
  }
  ScoreReport r = ScoreReportFromJson(j);
  if (r.engine.empty()) r.engine = fs::path(path).stem().string();
  return r;
}

int RunCompare(const CompareArgs &a, const GlobalOptions &g, std::ostream &out) {
  std::vector<ScoreReport> baselines, candidates;
  json inputs = json::object();
  for (const auto &p : a.baselines) {
    baselines.push_back(LoadScoreReport(p));
    inputs[p] = FileChecksum(p);
  }
  for (const auto &p : a.candidates) {
    candidates.push_back(LoadScoreReport(p));
    inputs[p] = FileChecksum(p);
  }
  SignificanceReport report = CompareConditions(baselines, candidates, a.n_units);
  json config = GlobalConfig(g);
  config.update({{"command", "compare"},
                 {"baseline", a.baselines},
                 {"candidate", a.candidates},
                 {"n_units", a.n_units}});
  WriteReport(a.out, ToJson(report), config, inputs);
  WriteText(CsvPathFor(a.out), ToCsv(report));
  out << FormatSignificanceTable(report, baselines, candidates);
  return kExitSuccess;
}

struct ValidateArgs {
  std::string data, split, out;
  std::int64_t utterances = 0, speakers = 0;
  double hours = 0.0, hours_tolerance = 0.5;
};

int RunValidate(const ValidateArgs &a, const GlobalOptions &g, std::ostream &out) {
  SplitExpectation expect;
  if (a.split == "train") expect = AishellTrainSplit();
  else if (a.split == "dev") expect = AishellDevSplit();
  else if (a.split == "test") expect = AishellTestSplit();
  else expect = {a.utterances, a.hours, a.speakers};
  expect.hours_tolerance = a.hours_tolerance;
  ValidationReport report = ValidateSplit(LoadManifest(a.data), expect, g.jobs);
  if (!a.out.empty()) {
    json config = GlobalConfig(g);
    config.update({{"command", "validate-split"},
                   {"data", a.data},
                   {"split", a.split},
                   {"expected_utterances", expect.expected_utterances},
                   {"expected_hours", expect.expected_hours},
                   {"expected_speakers", expect.expected_speakers},
                   {"hours_tolerance", expect.hours_tolerance}});
    WriteReport(a.out, ToJson(report), config, DataDirChecksums(a.data));
  }
  for (const auto &c : report.checks)
    out << fmt::format("{:<11} expected {:>12.4f} measured {:>12.4f} (+/- {:g}) {}\n",
                       c.dimension, c.expected, c.measured, c.tolerance,
                       c.passed ? "PASS" : "FAIL");
  for (const auto &f : report.unreadable)
    out << fmt::format("unreadable {}: {}\n", f.utt_id, f.message);
  return report.passed() ? kExitSuccess : kExitFatal;
}

void ConfigureLogging(const std::string &level) {
  static std::shared_ptr<spdlog::logger> logger = [] {
    auto l = spdlog::stderr_color_mt("noisebench");
    l->set_pattern("%^%l%$: %v");
    return l;
  }();
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::from_str(level));
}

}  // namespace

int RunCli(const std::vector<std::string> &args, std::ostream &out,
           std::ostream &err) {
  CLI::App app{"noisebench: SNR-calibrated noisy corpus construction and CER "
               "scoring for Kaldi-style data directories"};
  app.require_subcommand(1);
  GlobalOptions g;
  app.add_option("--seed", g.seed, "Seed for noise offsets and subsetting")
      ->capture_default_str();
  app.add_option("--jobs", g.jobs, "Worker threads (0 = all cores)")
      ->envname("NOISEBENCH_JOBS")
      ->check(CLI::NonNegativeNumber);
  app.add_option("--log-level", g.log_level, "trace|debug|info|warn|error|off")
      ->check(CLI::IsMember({"trace", "debug", "info", "warn", "error", "off"}))
      ->capture_default_str();

  ProfileArgs profile;
  auto *profile_cmd = app.add_subcommand(
      "profile-snr",
      "Estimate per-utterance SNR; writes JSON and a CSV next to it with "
      "columns utt_id,snr_db,signal_db,noise_db");
  profile_cmd->add_option("--data", profile.data, "Kaldi data dir")->required();
  profile_cmd->add_option("--out", profile.out, "Report JSON path")->required();
  profile_cmd->add_option("--frame-ms", profile.frames.frame_ms)->capture_default_str();
  profile_cmd->add_option("--hop-ms", profile.frames.hop_ms)->capture_default_str();
  profile_cmd->add_flag("--strict", profile.strict,
                        "Fail (exit 1) on any unreadable or unmeasurable utterance");

  MixArgs mix;
  auto *mix_cmd = app.add_subcommand(
      "mix", "Write one noisy copy of a data dir per target SNR");
  mix_cmd->add_option("--data", mix.data, "Clean Kaldi data dir")->required();
  mix_cmd->add_option("--noise", mix.noise, "Noise recording (16-bit mono WAV)")
      ->required();
  mix_cmd->add_option("--snr", mix.snrs, "Target SNRs in dB, e.g. 20,15,10,5,0")
      ->required()
      ->delimiter(',');
  mix_cmd->add_option("--out-root", mix.out_root, "Parent of the output dirs")
      ->required();
  mix_cmd->add_option("--calibration-size", mix.calibration_size,
                      "Calibrate on the first N utterances only");
  mix_cmd->add_flag("--force", mix.force, "Overwrite existing output dirs");
  mix_cmd->add_option("--seed", g.seed, "Seed for noise offsets");

  MultiArgs multi;
  auto *multi_cmd = app.add_subcommand(
      "make-multi", "Merge a clean data dir with its noisy copies");
  multi_cmd->add_option("--clean", multi.clean)->required();
  multi_cmd->add_option("--noisy", multi.noisy)->expected(0, -1);
  multi_cmd->add_option("--out", multi.out)->required();

  SubsetArgs subset;
  auto *subset_cmd = app.add_subcommand(
      "subset", "Seeded random subset of a data dir reaching a number of hours");
  subset_cmd->add_option("--data", subset.data)->required();
  subset_cmd->add_option("--hours", subset.hours)->required();
  subset_cmd->add_option("--out", subset.out)->required();
  subset_cmd->add_option("--seed", g.seed, "Seed for the shuffle");

  ScoreArgs score;
  auto *score_cmd = app.add_subcommand(
      "score",
      "Character error rate of a hypothesis text file; writes JSON and a CSV "
      "with columns utt_id,ref_tokens,substitutions,deletions,insertions,"
      "correct,cer");
  score_cmd->add_option("--ref", score.ref, "Reference Kaldi data dir")->required();
  score_cmd->add_option("--hyp", score.hyp, "Hypotheses, \"<utt_id> <text>\"")
      ->required();
  score_cmd->add_option("--label", score.label, "Condition label, e.g. 15dB")
      ->required();
  score_cmd->add_option("--out", score.out, "Report JSON path")->required();
  score_cmd->add_option("--engine", score.engine,
                        "Engine name (default: hypothesis file stem)");
  score_cmd->add_option("--alignments", score.alignments,
                        "Also write ref/hyp/op alignment lines here");
  score_cmd->add_flag("--ascii-runs", score.ascii_runs,
                      "Score ASCII letter/digit runs as single tokens");

  CompareArgs compare;
  auto *compare_cmd = app.add_subcommand(
      "compare",
      "Binomial significance of a candidate against the best baseline; writes "
      "JSON and a CSV with columns condition,baseline_engine,baseline_cer,"
      "candidate_cer,n_units,sdev,num_sdev,significant");
  compare_cmd->add_option("--baseline", compare.baselines, "Score report JSON")
      ->required()
      ->expected(1, -1);
  compare_cmd->add_option("--candidate", compare.candidates, "Score report JSON")
      ->required()
      ->expected(1, -1);
  compare_cmd->add_option("--n-units", compare.n_units,
                          "Trials in the binomial model, e.g. test utterances")
      ->required();
  compare_cmd->add_option("--out", compare.out, "Report JSON path")->required();

  ValidateArgs validate;
  auto *validate_cmd = app.add_subcommand(
      "validate-split", "Check a data dir against published split sizes");
  validate_cmd->add_option("--data", validate.data)->required();
  validate_cmd->add_option("--split", validate.split, "train|dev|test|custom")
      ->check(CLI::IsMember({"train", "dev", "test", "custom"}))
      ->required();
  validate_cmd->add_option("--utterances", validate.utterances, "custom split only");
  validate_cmd->add_option("--hours", validate.hours, "custom split only");
  validate_cmd->add_option("--speakers", validate.speakers, "custom split only");
  validate_cmd->add_option("--hours-tolerance", validate.hours_tolerance)
      ->capture_default_str();
  validate_cmd->add_option("--out", validate.out, "Report JSON path");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError &e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kExitSuccess : kExitFatal;
  }

  try {
    ConfigureLogging(g.log_level);
    if (*profile_cmd) return RunProfile(profile, g, out);
    if (*mix_cmd) return RunMix(mix, g, out);
    if (*multi_cmd) return RunMakeMulti(multi, g, out);
    if (*subset_cmd) return RunSubset(subset, g, out);
    if (*score_cmd) return RunScore(score, g, out);
    if (*compare_cmd) return RunCompare(compare, g, out);
    if (*validate_cmd) return RunValidate(validate, g, out);
  } catch (const std::exception &e) {
    err << "error: " << e.what() << "\n";
    return kExitFatal;
  }
  return kExitFatal;
}

}  // namespace noisebench
