// tests/cli_test.cc

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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "json.hpp"
#include "noisebench/cli.h"
#include "noisebench/keyed-hash.h"
#include "noisebench/score.h"
#include "support/synthetic.h"

using namespace noisebench;
using namespace noisebench::testing;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run Cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  args.insert(args.begin(), {"--log-level", "off"});
  int code = RunCli(args, out, err);
  return {code, out.str(), err.str()};
}

nlohmann::json ReadJson(const fs::path &p) {
  std::ifstream is(p);
  return nlohmann::json::parse(is);
}

nlohmann::json WithoutMetadata(nlohmann::json j) {
  j.erase("metadata");
  return j;
}

// Every file under dir with its checksum, keyed by relative path.
std::map<std::string, std::string> TreeChecksums(const fs::path &dir) {
  std::map<std::string, std::string> out;
  for (const auto &e : fs::recursive_directory_iterator(dir))
    if (e.is_regular_file() && e.path().filename() != "mix_run.json")
      out[fs::relative(e.path(), dir).string()] = FileChecksum(e.path());
  return out;
}

}  // namespace

TEST_CASE("profile-snr success, partial and fatal paths") {
  ScopedTempDir tmp("cli");
  MakeSpeechCorpus(tmp.path() / "clean", 6, 6.0, 1, 1.5);
  Run ok = Cli({"profile-snr", "--data", (tmp.path() / "clean").string(), "--out",
                (tmp.path() / "p.json").string()});
  CHECK(ok.code == kExitSuccess);
  CHECK(ok.out.find("6 utterances") != std::string::npos);
  nlohmann::json report = ReadJson(tmp.path() / "p.json");
  CHECK(report["per_utterance"].size() == 6);
  CHECK(report.contains("config"));
  CHECK(report["metadata"].contains("generated_at"));
  CHECK(fs::exists(tmp.path() / "p.csv"));

  // Same inputs, same payload apart from metadata.
  Cli({"profile-snr", "--data", (tmp.path() / "clean").string(), "--out",
       (tmp.path() / "p2.json").string()});
  nlohmann::json again = ReadJson(tmp.path() / "p2.json");
  again["config"]["out"] = report["config"]["out"];
  CHECK(WithoutMetadata(again) == WithoutMetadata(report));

  // One utterance too short to estimate: partial by default, fatal with --strict.
  WriteDataDir(tmp.path() / "mixed", {{"a_1", "a", "x", SpeechLike(-20, 1.5, 1)},
                                      {"a_2", "a", "y", SpeechLike(-20, 0.5, 2)}});
  Run partial = Cli({"profile-snr", "--data", (tmp.path() / "mixed").string(), "--out",
                     (tmp.path() / "m.json").string()});
  CHECK(partial.code == kExitPartial);
  CHECK(partial.out.find("a_2") != std::string::npos);
  Run strict = Cli({"profile-snr", "--strict", "--data", (tmp.path() / "mixed").string(),
                    "--out", (tmp.path() / "m.json").string()});
  CHECK(strict.code == kExitFatal);
  CHECK(strict.err.find("a_2") != std::string::npos);

  fs::remove(tmp.path() / "clean" / "wav.scp");
  Run missing = Cli({"profile-snr", "--data", (tmp.path() / "clean").string(), "--out",
                     (tmp.path() / "p.json").string()});
  CHECK(missing.code == kExitFatal);
  CHECK(missing.err.find("wav.scp") != std::string::npos);
}

TEST_CASE("mix writes one data dir per target and is reproducible") {
  ScopedTempDir tmp("cli");
  MakeSpeechCorpus(tmp.path() / "train", 8, 6.0, 2, 1.5);
  WriteWav(WhiteNoise(-30.0, 10.0, 4), tmp.path() / "noise.wav");
  auto mix = [&](const fs::path &root, std::uint64_t seed, bool force) {
    std::vector<std::string> args = {"mix", "--data", (tmp.path() / "train").string(),
                                     "--noise", (tmp.path() / "noise.wav").string(),
                                     "--snr", "20,15,10,5,0", "--out-root", root.string(),
                                     "--seed", std::to_string(seed)};
    if (force) args.push_back("--force");
    return Cli(args);
  };
  Run first = mix(tmp.path() / "a", 5, false);
  REQUIRE(first.code == kExitSuccess);
  for (const char *t : {"20", "15", "10", "5", "0"}) {
    fs::path dir = tmp.path() / "a" / fmt::format("train_snr{}", t);
    CHECK(fs::exists(dir / "wav.scp"));
    CHECK(fs::exists(dir / "mix_plan.json"));
  }
  CHECK(ReadJson(tmp.path() / "a" / "mix_run.json")["conditions"].size() == 5);

  CHECK(mix(tmp.path() / "a", 5, false).code == kExitFatal);
  CHECK(mix(tmp.path() / "a", 5, true).code == kExitSuccess);
  Run other = mix(tmp.path() / "b", 5, false);
  CHECK(other.code == kExitSuccess);
  CHECK(TreeChecksums(tmp.path() / "a") == TreeChecksums(tmp.path() / "b"));

  CHECK(mix(tmp.path() / "c", 6, false).code == kExitSuccess);
  CHECK(TreeChecksums(tmp.path() / "a") != TreeChecksums(tmp.path() / "c"));

  Run bad = Cli({"mix", "--data", (tmp.path() / "train").string(), "--noise",
                 (tmp.path() / "missing.wav").string(), "--snr", "10", "--out-root",
                 (tmp.path() / "d").string()});
  CHECK(bad.code == kExitFatal);
  CHECK(bad.err.find("missing.wav") != std::string::npos);
}

TEST_CASE("make-multi and subset") {
  ScopedTempDir tmp("cli");
  MakeSpeechCorpus(tmp.path() / "train", 10, 6.0, 3, 1.25);
  WriteWav(WhiteNoise(-30.0, 10.0, 4), tmp.path() / "noise.wav");
  REQUIRE(Cli({"mix", "--data", (tmp.path() / "train").string(), "--noise",
               (tmp.path() / "noise.wav").string(), "--snr", "10,0", "--out-root",
               (tmp.path() / "noisy").string()})
              .code == kExitSuccess);
  Run multi = Cli({"make-multi", "--clean", (tmp.path() / "train").string(), "--noisy",
                   (tmp.path() / "noisy" / "train_snr10").string(),
                   (tmp.path() / "noisy" / "train_snr0").string(), "--out",
                   (tmp.path() / "multi").string()});
  REQUIRE(multi.code == kExitSuccess);
  CHECK(multi.out.find("multicondition: 30 utterances") != std::string::npos);
  CHECK(LoadManifest(tmp.path() / "multi").size() == 30);
  CHECK(fs::exists(tmp.path() / "multi" / "multicondition.json"));

  Run subset = Cli({"subset", "--data", (tmp.path() / "multi").string(), "--hours",
                    "0.005", "--out", (tmp.path() / "sub").string(), "--seed", "3"});
  REQUIRE(subset.code == kExitSuccess);
  CorpusManifest sub = LoadManifest(tmp.path() / "sub");
  CHECK(sub.size() == 15);  // 18 s at 1.25 s per utterance
  CHECK(fs::exists(tmp.path() / "sub" / "subset.json"));

  CHECK(Cli({"subset", "--data", (tmp.path() / "multi").string(), "--hours", "5", "--out",
             (tmp.path() / "sub2").string()})
            .code == kExitFatal);
}

TEST_CASE("score and compare") {
  ScopedTempDir tmp("cli");
  CorpusManifest refs = MakeSpeechCorpus(tmp.path() / "test", 4, 0.0, 5, 1.0);
  {
    std::ofstream hyp(tmp.path() / "eng.txt");
    for (const auto &u : refs.utterances()) hyp << u.utt_id << " " << u.transcript << "\n";
  }
  Run score = Cli({"score", "--ref", (tmp.path() / "test").string(), "--hyp",
                   (tmp.path() / "eng.txt").string(), "--label", "clean", "--out",
                   (tmp.path() / "s.json").string(), "--alignments",
                   (tmp.path() / "ali.txt").string()});
  REQUIRE(score.code == kExitSuccess);
  CHECK(score.out.rfind("CER 0.000\n", 0) == 0);
  CHECK(ReadJson(tmp.path() / "s.json")["engine"] == "eng");
  CHECK(fs::exists(tmp.path() / "s.csv"));
  CHECK(fs::exists(tmp.path() / "ali.txt"));

  // The six-condition table from summary reports.
  const std::vector<std::string> labels = {"clean", "20dB", "15dB", "10dB", "5dB", "0dB"};
  const std::map<std::string, std::vector<double>> rows = {
      {"Eng2", {4.7, 6.7, 9.6, 17, 35, 52}},
      {"Eng4", {7.2, 9.7, 12, 19, 30, 40}},
      {"Custom", {6.6, 7.1, 8.1, 10, 17, 34}}};
  std::map<std::string, std::vector<std::string>> files;
  for (const auto &[engine, cers] : rows) {
    for (std::size_t k = 0; k < labels.size(); ++k) {
      ScoreReport r;
      r.engine = engine;
      r.condition_label = labels[k];
      r.total_ref_tokens = 1000;
      r.substitutions = std::llround(cers[k] * 10);
      r.correct = 1000 - r.substitutions;
      fs::path p = tmp.path() / fmt::format("{}_{}.json", engine, labels[k]);
      std::ofstream(p) << ToJson(r).dump();
      files[engine].push_back(p.string());
    }
  }
  std::vector<std::string> args = {"compare", "--n-units", "7176", "--out",
                                   (tmp.path() / "cmp.json").string()};
  for (const auto &e : {"Eng2", "Eng4"})
    for (const auto &f : files[e]) args.insert(args.end(), {"--baseline", f});
  for (const auto &f : files["Custom"]) args.insert(args.end(), {"--candidate", f});
  Run cmp = Cli(args);
  REQUIRE(cmp.code == kExitSuccess);
  CHECK(cmp.out.find("0.25     0.30     0.35     0.44     0.54     0.58") !=
        std::string::npos);
  CHECK(cmp.out.find("4.3*") != std::string::npos);
  nlohmann::json j = ReadJson(tmp.path() / "cmp.json");
  CHECK(j["conditions"].size() == 6);
}

TEST_CASE("validate-split") {
  ScopedTempDir tmp("cli");
  SaveManifest(MakeTimedManifest(tmp.path() / "test", 7176, 20, 10.0, 1),
               tmp.path() / "test");
  Run ok = Cli({"validate-split", "--data", (tmp.path() / "test").string(), "--split",
                "test", "--out", (tmp.path() / "v.json").string()});
  CHECK(ok.code == kExitSuccess);
  CHECK(ReadJson(tmp.path() / "v.json")["passed"] == true);
  Run wrong = Cli({"validate-split", "--data", (tmp.path() / "test").string(), "--split",
                   "dev"});
  CHECK(wrong.code == kExitFatal);
  Run custom = Cli({"validate-split", "--data", (tmp.path() / "test").string(), "--split",
                    "custom", "--utterances", "7176", "--hours", "10", "--speakers", "20"});
  CHECK(custom.code == kExitSuccess);
}

TEST_CASE("exit codes stay within 0, 1 and 2") {
  CHECK(Cli({}).code == kExitFatal);
  CHECK(Cli({"no-such-command"}).code == kExitFatal);
  CHECK(Cli({"score"}).code == kExitFatal);
  CHECK(Cli({"mix", "--snr", "abc"}).code == kExitFatal);
  CHECK(Cli({"--help"}).code == kExitSuccess);
}
