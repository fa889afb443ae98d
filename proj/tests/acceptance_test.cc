// tests/acceptance_test.cc

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

// Acceptance suite. Prints one PASS/FAIL line per criterion and exits non-zero
// if any criterion fails.

#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "noisebench/audio-io.h"
#include "noisebench/cli.h"
#include "noisebench/keyed-hash.h"
#include "noisebench/manifest.h"
#include "noisebench/mixer.h"
#include "noisebench/score.h"
#include "noisebench/snr.h"
#include "noisebench/stats.h"
#include "support/oracles.h"
#include "support/synthetic.h"

using namespace noisebench;
using namespace noisebench::testing;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool passed;
  std::string detail;
};

class Stopwatch {
 public:
  double Seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

// The mixed corpora are reused by later criteria.
struct MixedCorpora {
  CorpusManifest clean;
  std::map<double, MixCorpusResult> by_target;
};

const std::vector<double> kTargets = {20.0, 15.0, 10.0, 5.0, 0.0};

Outcome SignificanceTable() {
  Stopwatch clock;
  const std::vector<std::string> labels = {"clean", "20dB", "15dB", "10dB", "5dB", "0dB"};
  const double eng2[] = {4.7, 6.7, 9.6, 17, 35, 52};
  const double eng4[] = {7.2, 9.7, 12, 19, 30, 40};
  const double custom[] = {6.6, 7.1, 8.1, 10, 17, 34};
  const double sdev[] = {0.25, 0.30, 0.35, 0.44, 0.54, 0.58};
  const double nsdev[] = {-7.6, -1.4, 4.3, 16, 24, 10};

  std::vector<ScoreReport> baselines, candidates;
  auto summary = [](const std::string &engine, const std::string &label, double pct) {
    ScoreReport r;
    r.engine = engine;
    r.condition_label = label;
    r.total_ref_tokens = 1000;
    r.substitutions = std::llround(pct * 10);
    r.correct = 1000 - r.substitutions;
    return r;
  };
  for (std::size_t k = 0; k < labels.size(); ++k) {
    baselines.push_back(summary("Eng2", labels[k], eng2[k]));
    baselines.push_back(summary("Eng4", labels[k], eng4[k]));
    candidates.push_back(summary("Custom", labels[k], custom[k]));
  }
  SignificanceReport report = CompareConditions(baselines, candidates, 7176);
  bool ok = report.conditions.size() == 6;
  std::string sdev_row, nsdev_row, flagged;
  for (std::size_t k = 0; ok && k < 6; ++k) {
    const auto &c = report.conditions[k];
    double oracle = OracleSdev(std::min(eng2[k], eng4[k]), 7176);
    ok = ok && std::fabs(c.sdev - sdev[k]) <= 0.01 &&
         std::fabs(c.sdev - oracle) <= 1e-9 &&
         std::fabs(c.num_sdev - nsdev[k]) <= 0.5 && c.significant == (k >= 2);
    sdev_row += fmt::format(" {:.2f}", c.sdev);
    nsdev_row += fmt::format(" {:.1f}", c.num_sdev);
    if (c.significant) flagged += " " + c.condition_label;
  }
  double seconds = clock.Seconds();
  ok = ok && seconds < 1.0;
  return {ok, fmt::format("sdev{} | #sdev{} | flagged{} | {:.3f} s", sdev_row,
                          nsdev_row, flagged, seconds)};
}

Outcome CalibrationIdentity(MixedCorpora *corpora, const fs::path &root) {
  Stopwatch clock;
  corpora->clean = MakeSpeechCorpus(root / "train", 200, 12.0, 31, 3.0, 20);
  AudioBuffer noise = WhiteNoise(-30.0, 60.0, 32);

  std::vector<double> speech;
  for (const auto &u : corpora->clean.utterances())
    speech.push_back(MeanPowerDb(ReadWav(u.audio_path), true));
  double speech_sd = PopulationStddev(speech);

  bool ok = true;
  std::string detail = fmt::format("speech-power sd {:.2f} dB;", speech_sd);
  for (double t : kTargets) {
    MixCorpusResult r =
        MixCorpus(corpora->clean, noise, t, 7, root / fmt::format("train_snr{:g}", t));
    std::vector<double> realized;
    for (const auto &[id, rec] : r.plan.per_utterance) realized.push_back(rec.realized_snr_db);
    double mean = Mean(realized), sd = PopulationStddev(realized);
    ok = ok && realized.size() == 200 && std::fabs(mean - t) <= 0.01 &&
         std::fabs(sd - speech_sd) <= 0.5;
    detail += fmt::format(" {:g} dB: mean {:.4f} sd {:.2f};", t, mean, sd);
    corpora->by_target.emplace(t, std::move(r));
  }
  double seconds = clock.Seconds();
  ok = ok && seconds < 60.0;
  return {ok, detail + fmt::format(" {:.1f} s", seconds)};
}

Outcome EstimatorRoundTrip(const MixedCorpora &corpora) {
  const MixCorpusResult &mixed = corpora.by_target.at(10.0);
  ProfileResult r = CorpusSnrProfile(mixed.manifest);
  bool ok = r.failures.empty() && r.profile.per_utterance.size() == 200 &&
            std::fabs(r.profile.mean_db - 10.0) <= 1.5;
  return {ok, fmt::format("profile mean {:.2f} dB, sd {:.2f} dB over {} utterances",
                          r.profile.mean_db, r.profile.stddev_db,
                          r.profile.per_utterance.size())};
}

Outcome AlignmentOracle() {
  Stopwatch clock;
  Gaussian rng(4);
  int mismatches = 0;
  for (int pair = 0; pair < 1000; ++pair) {
    int alphabet = 1 + static_cast<int>(rng.Uniform() * 20);
    std::vector<int> r(static_cast<std::size_t>(rng.Uniform() * 31));
    std::vector<int> h(static_cast<std::size_t>(rng.Uniform() * 31));
    for (auto &x : r) x = static_cast<int>(rng.Uniform() * alphabet);
    for (auto &x : h) x = static_cast<int>(rng.Uniform() * alphabet);
    TokenSequence rt, ht;
    for (int x : r) rt.push_back(std::to_string(x));
    for (int x : h) ht.push_back(std::to_string(x));
    Alignment a = Align(rt, ht);
    bool good = a.errors() == OracleEditDistance(r, h) &&
                a.substitutions + a.deletions + a.correct ==
                    static_cast<std::int64_t>(r.size()) &&
                a.substitutions + a.insertions + a.correct ==
                    static_cast<std::int64_t>(h.size());
    if (!good) ++mismatches;
  }
  double seconds = clock.Seconds();
  return {mismatches == 0 && seconds < 10.0,
          fmt::format("{} of 1000 pairs disagree, {:.3f} s", mismatches, seconds)};
}

Outcome MulticonditionArithmetic(const MixedCorpora &corpora) {
  CorpusManifest clean = WithDurations(corpora.clean);
  std::vector<CorpusManifest> noisy;
  for (double t : kTargets) noisy.push_back(WithDurations(corpora.by_target.at(t).manifest));
  CorpusManifest multi = MakeMulticondition(clean, noisy);
  std::int64_t h = TotalDurationMicros(clean);
  bool ok = multi.size() == 6 * clean.size() && TotalDurationMicros(multi) == 6 * h;

  CorpusManifest train = MakeTimedManifest("/fixture/train", 118664, 336, 148.0, 8);
  std::vector<CorpusManifest> train_noisy;
  for (double t : kTargets) {
    std::vector<Utterance> utts = train.utterances();
    for (auto &u : utts) u.utt_id += SnrSuffix(t);
    train_noisy.emplace_back(std::move(utts), "noisy");
  }
  CorpusManifest big = MakeMulticondition(train, train_noisy);
  ok = ok && big.size() == 6 * train.size() && TotalHours(big) == 888.0 &&
       TotalHours(train) == 148.0;
  return {ok, fmt::format("mixed: {} -> {} utterances, {} -> {} us; timed: {} h -> {} h, "
                          "{} -> {} utterances",
                          clean.size(), multi.size(), h, TotalDurationMicros(multi),
                          TotalHours(train), TotalHours(big), train.size(), big.size())};
}

Outcome Determinism(const fs::path &root) {
  MakeSpeechCorpus(root / "det", 100, 6.0, 41, 1.0, 10);
  WriteWav(WhiteNoise(-30.0, 60.0, 42), root / "noise.wav");
  auto run = [&](const std::string &out, std::uint64_t seed) {
    std::ostringstream sink;
    return RunCli({"--log-level", "off", "mix", "--data", (root / "det").string(),
                   "--noise", (root / "noise.wav").string(), "--snr", "10",
                   "--out-root", (root / out).string(), "--seed", std::to_string(seed)},
                  sink, sink);
  };
  if (run("a", 1) != kExitSuccess || run("b", 1) != kExitSuccess ||
      run("c", 2) != kExitSuccess)
    return {false, "mix command failed"};

  auto checksums = [&](const std::string &out) {
    std::map<std::string, std::string> sums;
    for (const auto &e : fs::directory_iterator(root / out / "det_snr10"))
      if (e.path().extension() == ".wav")
        sums[e.path().filename().string()] = FileChecksum(e.path());
    return sums;
  };
  auto same_a = checksums("a"), same_b = checksums("b");
  bool identical = same_a.size() == 100 && same_a == same_b;

  auto offsets = [&](const std::string &out) {
    std::ifstream is(root / out / "det_snr10" / "mix_plan.json");
    MixPlan plan = MixPlanFromJson(nlohmann::json::parse(is));
    std::map<std::string, std::int64_t> o;
    for (const auto &[id, rec] : plan.per_utterance) o[id] = rec.noise_offset_samples;
    return o;
  };
  auto seed1 = offsets("a"), seed2 = offsets("c");
  int changed = 0;
  for (const auto &[id, off] : seed1) changed += seed2.at(id) != off;
  return {identical && changed >= 1,
          fmt::format("{} WAVs byte-identical across reruns: {}; offsets changed by a "
                      "new seed: {} of {}",
                      same_a.size(), identical ? "yes" : "no", changed, seed1.size())};
}

Outcome SplitValidation(const fs::path &root) {
  // Real WAV files at 100 Hz keep the fixture small; one sample per
  // centisecond of the generated duration.
  CorpusManifest timed = MakeTimedManifest(root / "test", 7176, 20, 10.0, 51);
  std::vector<Utterance> utts;
  for (const auto &u : timed.utterances()) {
    auto n = static_cast<std::size_t>(std::llround(*u.duration_s * 100.0));
    fs::create_directories(u.audio_path.parent_path());
    WriteWav(AudioBuffer(std::vector<float>(n, 0.01f), 100), u.audio_path);
    utts.push_back({u.utt_id, u.speaker_id, u.audio_path, u.transcript, std::nullopt});
  }
  SaveManifest(CorpusManifest(utts, "test"), root / "test");
  ValidationReport full = ValidateSplit(LoadManifest(root / "test"), AishellTestSplit());

  utts.pop_back();
  SaveManifest(CorpusManifest(utts, "test"), root / "test_minus_one");
  ValidationReport short_by_one =
      ValidateSplit(LoadManifest(root / "test_minus_one"), AishellTestSplit());
  const ValidationCheck *count = short_by_one.Check("utterances");

  bool ok = full.passed() && !short_by_one.passed() && count && !count->passed &&
            count->measured == 7175 && count->expected == 7176;
  return {ok, fmt::format("full: {} ({:.0f} utts, {:.4f} h, {:.0f} spk); minus one: {} "
                          "({:.0f} vs {:.0f})",
                          full.passed() ? "pass" : "fail",
                          full.Check("utterances")->measured, full.Check("hours")->measured,
                          full.Check("speakers")->measured,
                          short_by_one.passed() ? "pass" : "fail",
                          count ? count->measured : -1, count ? count->expected : -1)};
}

Outcome WavRoundTrip(const fs::path &root) {
  Gaussian rng(61);
  double worst = 0.0;
  std::size_t samples = 0;
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<float> s(4000 + 97 * trial);
    for (auto &v : s) v = static_cast<float>(2.0 * rng.Uniform() - 1.0);
    s[0] = 1.0f;
    s[1] = -1.0f;
    WriteWav(AudioBuffer(s, 16000), root / "rt.wav");
    AudioBuffer back = ReadWav(root / "rt.wav");
    if (back.size() != s.size()) return {false, "length changed"};
    for (std::size_t i = 0; i < s.size(); ++i)
      worst = std::max(worst, std::fabs(double(back.samples()[i]) - s[i]));
    samples += s.size();
  }
  double step = 1.0 / 32768.0;
  return {worst <= step, fmt::format("worst error {:.3f} steps over {} samples",
                                     worst / step, samples)};
}

}  // namespace

int main() {
  spdlog::set_level(spdlog::level::warn);
  ScopedTempDir tmp("acceptance");
  MixedCorpora corpora;

  struct Criterion {
    int id;
    std::string name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "significance table", [] { return SignificanceTable(); }},
      {2, "calibration identity",
       [&] { return CalibrationIdentity(&corpora, tmp.path() / "mix"); }},
      {3, "estimator round trip", [&] { return EstimatorRoundTrip(corpora); }},
      {4, "alignment oracle", [] { return AlignmentOracle(); }},
      {5, "multi-condition arithmetic", [&] { return MulticonditionArithmetic(corpora); }},
      {6, "determinism", [&] { return Determinism(tmp.path() / "det"); }},
      {7, "split validation", [&] { return SplitValidation(tmp.path() / "split"); }},
      {8, "WAV round trip", [&] { return WavRoundTrip(tmp.path()); }},
  };

  int failures = 0;
  for (const auto &c : criteria) {
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception &e) {
      o = {false, fmt::format("exception: {}", e.what())};
    }
    failures += !o.passed;
    std::cout << fmt::format("{} criterion {}: {}: {}\n", o.passed ? "PASS" : "FAIL",
                             c.id, c.name, o.detail)
              << std::flush;
  }
  return failures == 0 ? 0 : 1;
}
