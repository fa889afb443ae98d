// src/manifest.cc

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

#include "noisebench/manifest.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "noisebench/audio-io.h"
#include "noisebench/keyed-hash.h"
#include "noisebench/parallel.h"

namespace noisebench {

CorpusManifest::CorpusManifest(std::vector<Utterance> utterances,
                               std::string label)
    : utterances_(std::move(utterances)), label_(std::move(label)) {
  std::sort(utterances_.begin(), utterances_.end(),
            [](const Utterance &a, const Utterance &b) {
              return a.utt_id < b.utt_id;
            });
  for (std::size_t i = 0; i < utterances_.size(); ++i) {
    if (utterances_[i].utt_id.empty())
      throw ManifestError("utterance with empty id");
    if (i > 0 && utterances_[i].utt_id == utterances_[i - 1].utt_id)
      throw ManifestError(
          fmt::format("duplicate utterance id {}", utterances_[i].utt_id));
  }
}

CorpusManifest CorpusManifest::WithLabel(std::string label) const {
  CorpusManifest copy = *this;
  copy.label_ = std::move(label);
  return copy;
}

const Utterance *CorpusManifest::Find(const std::string &utt_id) const {
  auto it = std::lower_bound(
      utterances_.begin(), utterances_.end(), utt_id,
      [](const Utterance &u, const std::string &id) { return u.utt_id < id; });
  if (it == utterances_.end() || it->utt_id != utt_id) return nullptr;
  return &*it;
}

std::set<std::string> CorpusManifest::Speakers() const {
  std::set<std::string> speakers;
  for (const auto &u : utterances_) speakers.insert(u.speaker_id);
  return speakers;
}

bool CorpusManifest::HasAllDurations() const {
  return std::all_of(utterances_.begin(), utterances_.end(),
                     [](const Utterance &u) { return u.duration_s.has_value(); });
}

std::string SpeakerFromUttId(const std::string &utt_id) {
  auto pos = utt_id.rfind('_');
  if (pos == std::string::npos || pos == 0) return utt_id;
  return utt_id.substr(0, pos);
}

namespace {

struct Entry {
  std::string value;
  int line = 0;
};

// Parses "<key> <value>" lines. Blank lines are skipped; a trailing CR is
// dropped.
std::map<std::string, Entry> ReadKeyedFile(const std::filesystem::path &path,
                                           bool value_required) {
  std::ifstream is(path);
  if (!is)
    throw ManifestError(fmt::format("missing or unreadable {}", path.string()));
  std::map<std::string, Entry> entries;
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    if (line.front() == ' ' || line.front() == '\t')
      throw ManifestError(fmt::format("{}:{}: line starts with whitespace",
                                      path.string(), line_no));
    auto key_end = line.find_first_of(" \t");
    std::string key = line.substr(0, key_end);
    std::string value;
    if (key_end != std::string::npos) {
      auto value_start = line.find_first_not_of(" \t", key_end);
      if (value_start != std::string::npos) value = line.substr(value_start);
    }
    if (value_required && value.empty())
      throw ManifestError(fmt::format("{}:{}: expected \"<utt_id> <value>\"",
                                      path.string(), line_no));
    auto [it, inserted] = entries.emplace(key, Entry{value, line_no});
    if (!inserted)
      throw ManifestError(fmt::format("{}:{}: duplicate id {} (first on line {})",
                                      path.string(), line_no, key,
                                      it->second.line));
  }
  return entries;
}

std::string JoinIds(const std::vector<std::string> &ids, std::size_t limit = 10) {
  std::string out;
  for (std::size_t i = 0; i < ids.size() && i < limit; ++i) {
    if (i) out += ", ";
    out += ids[i];
  }
  if (ids.size() > limit) out += fmt::format(", ... ({} total)", ids.size());
  return out;
}

std::vector<std::string> KeysMissingFrom(const std::map<std::string, Entry> &a,
                                         const std::map<std::string, Entry> &b) {
  std::vector<std::string> missing;
  for (const auto &[key, entry] : a)
    if (!b.count(key)) missing.push_back(key);
  return missing;
}

}  // namespace

CorpusManifest LoadManifest(const std::filesystem::path &dir) {
  if (!std::filesystem::is_directory(dir))
    throw ManifestError(fmt::format("{} is not a directory", dir.string()));
  const std::filesystem::path base = std::filesystem::absolute(dir).lexically_normal();
  auto wav_scp = ReadKeyedFile(dir / "wav.scp", true);
  auto text = ReadKeyedFile(dir / "text", false);

  auto only_wav = KeysMissingFrom(wav_scp, text);
  auto only_text = KeysMissingFrom(text, wav_scp);
  if (!only_wav.empty() || !only_text.empty()) {
    std::string msg = fmt::format("id mismatch between wav.scp and text in {}",
                                  dir.string());
    if (!only_wav.empty())
      msg += fmt::format("; only in wav.scp: {}", JoinIds(only_wav));
    if (!only_text.empty())
      msg += fmt::format("; only in text: {}", JoinIds(only_text));
    throw ManifestError(msg);
  }

  std::map<std::string, Entry> utt2spk;
  if (std::filesystem::exists(dir / "utt2spk")) {
    utt2spk = ReadKeyedFile(dir / "utt2spk", true);
    auto extra = KeysMissingFrom(utt2spk, wav_scp);
    if (!extra.empty())
      throw ManifestError(fmt::format("utt2spk in {} has ids not in wav.scp: {}",
                                      dir.string(), JoinIds(extra)));
    auto missing = KeysMissingFrom(wav_scp, utt2spk);
    if (!missing.empty())
      throw ManifestError(fmt::format("utt2spk in {} lacks ids: {}",
                                      dir.string(), JoinIds(missing)));
  }

  std::map<std::string, Entry> utt2dur;
  if (std::filesystem::exists(dir / "utt2dur")) {
    utt2dur = ReadKeyedFile(dir / "utt2dur", true);
    auto extra = KeysMissingFrom(utt2dur, wav_scp);
    if (!extra.empty())
      throw ManifestError(fmt::format("utt2dur in {} has ids not in wav.scp: {}",
                                      dir.string(), JoinIds(extra)));
  }

  std::vector<Utterance> utterances;
  utterances.reserve(wav_scp.size());
  for (const auto &[id, wav] : wav_scp) {
    Utterance u;
    u.utt_id = id;
    if (wav.value.back() == '|')
      throw ManifestError(fmt::format(
          "{}:{}: piped wav.scp commands are not supported",
          (dir / "wav.scp").string(), wav.line));
    std::filesystem::path audio(wav.value);
    u.audio_path = audio.is_relative() ? (base / audio).lexically_normal() : audio;
    u.transcript = text.at(id).value;
    auto spk = utt2spk.find(id);
    u.speaker_id = spk != utt2spk.end() ? spk->second.value : SpeakerFromUttId(id);
    auto dur = utt2dur.find(id);
    if (dur != utt2dur.end()) {
      const std::string &s = dur->second.value;
      double seconds = 0.0;
      auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), seconds);
      if (ec != std::errc() || ptr != s.data() + s.size() || !(seconds >= 0.0))
        throw ManifestError(fmt::format("{}:{}: bad duration \"{}\"",
                                        (dir / "utt2dur").string(),
                                        dur->second.line, s));
      u.duration_s = seconds;
    }
    utterances.push_back(std::move(u));
  }
  std::string label = base.filename().string();
  if (label.empty()) label = base.parent_path().filename().string();
  return CorpusManifest(std::move(utterances), label);
}

void SaveManifest(const CorpusManifest &manifest,
                  const std::filesystem::path &dir) {
  std::filesystem::create_directories(dir);
  const std::filesystem::path base = std::filesystem::absolute(dir).lexically_normal();
  std::string wav_scp, text, utt2spk, utt2dur;
  std::map<std::string, std::vector<std::string>> spk2utt;
  for (const auto &u : manifest.utterances()) {
    std::filesystem::path audio = std::filesystem::absolute(u.audio_path).lexically_normal();
    std::filesystem::path rel = audio.lexically_relative(base);
    bool inside = !rel.empty() && *rel.begin() != "..";
    wav_scp += fmt::format("{} {}\n", u.utt_id,
                           inside ? rel.string() : u.audio_path.string());
    text += u.transcript.empty() ? u.utt_id + "\n"
                                 : fmt::format("{} {}\n", u.utt_id, u.transcript);
    utt2spk += fmt::format("{} {}\n", u.utt_id, u.speaker_id);
    if (u.duration_s) utt2dur += fmt::format("{} {}\n", u.utt_id, *u.duration_s);
    spk2utt[u.speaker_id].push_back(u.utt_id);
  }
  std::string spk2utt_text;
  for (const auto &[spk, ids] : spk2utt) {
    spk2utt_text += spk;
    for (const auto &id : ids) spk2utt_text += " " + id;
    spk2utt_text += "\n";
  }
  auto write = [&](const char *name, const std::string &content) {
    std::ofstream os(dir / name, std::ios::binary | std::ios::trunc);
    os << content;
    if (!os)
      throw ManifestError(fmt::format("cannot write {}", (dir / name).string()));
  };
  write("wav.scp", wav_scp);
  write("text", text);
  write("utt2spk", utt2spk);
  write("spk2utt", spk2utt_text);
  if (manifest.HasAllDurations()) {
    write("utt2dur", utt2dur);
  } else {
    std::filesystem::remove(dir / "utt2dur");
  }
}

CorpusManifest WithDurations(const CorpusManifest &manifest, int jobs,
                             std::vector<UtteranceFailure> *failures) {
  std::vector<Utterance> utterances = manifest.utterances();
  std::vector<std::string> errors(utterances.size());
  ParallelFor(utterances.size(), jobs, [&](std::size_t i) {
    Utterance &u = utterances[i];
    if (u.duration_s) return;
    try {
      u.duration_s = ReadWavInfo(u.audio_path).duration_seconds();
    } catch (const Error &e) {
      errors[i] = e.what();
    }
  });
  for (std::size_t i = 0; i < utterances.size(); ++i) {
    if (errors[i].empty()) continue;
    if (!failures)
      throw ManifestError(fmt::format("cannot read duration of {}: {}",
                                      utterances[i].utt_id, errors[i]));
    failures->push_back({utterances[i].utt_id, errors[i]});
  }
  return CorpusManifest(std::move(utterances), manifest.label());
}

std::int64_t DurationMicros(double seconds) {
  return std::llround(seconds * 1e6);
}

std::int64_t TotalDurationMicros(const CorpusManifest &manifest) {
  std::int64_t total = 0;
  for (const auto &u : manifest.utterances()) {
    if (!u.duration_s)
      throw ManifestError(
          fmt::format("duration of {} is unknown", u.utt_id));
    total += DurationMicros(*u.duration_s);
  }
  return total;
}

double MicrosToHours(std::int64_t micros) {
  return static_cast<double>(micros) / 3.6e9;
}

double TotalHours(const CorpusManifest &manifest) {
  return MicrosToHours(TotalDurationMicros(manifest));
}

SplitExpectation AishellTrainSplit() { return {118664, 148.0, 336}; }
SplitExpectation AishellDevSplit() { return {14326, 18.0, 40}; }
SplitExpectation AishellTestSplit() { return {7176, 10.0, 20}; }

bool ValidationReport::passed() const {
  if (!unreadable.empty()) return false;
  return std::all_of(checks.begin(), checks.end(),
                     [](const ValidationCheck &c) { return c.passed; });
}

const ValidationCheck *ValidationReport::Check(
    const std::string &dimension) const {
  for (const auto &c : checks)
    if (c.dimension == dimension) return &c;
  return nullptr;
}

ValidationReport ValidateSplit(const CorpusManifest &manifest,
                               const SplitExpectation &expect, int jobs) {
  if (expect.expected_utterances <= 0 || expect.expected_hours <= 0.0 ||
      expect.expected_speakers <= 0)
    throw InvalidArgumentError("split expectations must be positive");
  ValidationReport report;
  report.label = manifest.label();
  CorpusManifest timed = WithDurations(manifest, jobs, &report.unreadable);

  auto check = [](std::string name, double expected, double measured,
                  double tolerance) {
    return ValidationCheck{std::move(name), expected, measured, tolerance,
                           std::fabs(measured - expected) <= tolerance};
  };
  report.checks.push_back(check("utterances",
                                static_cast<double>(expect.expected_utterances),
                                static_cast<double>(timed.size()),
                                static_cast<double>(expect.utterance_tolerance)));
  std::int64_t micros = 0;
  for (const auto &u : timed.utterances())
    if (u.duration_s) micros += DurationMicros(*u.duration_s);
  report.checks.push_back(check("hours", expect.expected_hours,
                                MicrosToHours(micros), expect.hours_tolerance));
  report.checks.push_back(check("speakers",
                                static_cast<double>(expect.expected_speakers),
                                static_cast<double>(timed.Speakers().size()),
                                static_cast<double>(expect.speaker_tolerance)));
  return report;
}

std::string SnrSuffix(double target_snr_db) {
  return fmt::format("_snr{:g}", target_snr_db);
}

namespace {

// The "_snr..." tail of an id, or empty if there is none.
std::string_view IdSuffix(std::string_view id) {
  auto pos = id.rfind("_snr");
  if (pos == std::string_view::npos || pos == 0) return {};
  return id.substr(pos);
}

}  // namespace

CorpusManifest MakeMulticondition(const CorpusManifest &clean,
                                  const std::vector<CorpusManifest> &noisy) {
  std::vector<Utterance> merged = clean.utterances();
  std::set<std::string> suffixes;
  for (const auto &condition : noisy) {
    if (condition.size() != clean.size())
      throw ManifestError(fmt::format(
          "noisy manifest {} has {} utterances, clean manifest {} has {}",
          condition.label(), condition.size(), clean.label(), clean.size()));
    if (condition.empty()) continue;
    std::string suffix(IdSuffix(condition.utterances().front().utt_id));
    if (suffix.empty())
      throw ManifestError(fmt::format("noisy manifest {}: id {} lacks an _snr suffix",
                                      condition.label(),
                                      condition.utterances().front().utt_id));
    if (!suffixes.insert(suffix).second)
      throw ManifestError(fmt::format(
          "suffix collision: more than one noisy manifest uses {}", suffix));
    std::vector<std::string> stripped;
    stripped.reserve(condition.size());
    for (const auto &u : condition.utterances()) {
      if (IdSuffix(u.utt_id) != suffix)
        throw ManifestError(fmt::format(
            "noisy manifest {}: id {} does not carry suffix {}",
            condition.label(), u.utt_id, suffix));
      stripped.push_back(u.utt_id.substr(0, u.utt_id.size() - suffix.size()));
      merged.push_back(u);
    }
    std::sort(stripped.begin(), stripped.end());
    for (std::size_t i = 0; i < stripped.size(); ++i) {
      if (stripped[i] != clean.utterances()[i].utt_id)
        throw ManifestError(fmt::format(
            "noisy manifest {} does not match the clean ids (first difference: "
            "{}{} vs clean {})",
            condition.label(), stripped[i], suffix,
            clean.utterances()[i].utt_id));
    }
  }
  try {
    return CorpusManifest(std::move(merged), "multicondition");
  } catch (const ManifestError &e) {
    throw ManifestError(fmt::format("after merging conditions: {}", e.what()));
  }
}

SubsetResult SubsetByHours(const CorpusManifest &manifest, double target_hours,
                           std::uint64_t seed) {
  if (!(target_hours > 0.0))
    throw InvalidArgumentError("target hours must be positive");
  std::int64_t total = TotalDurationMicros(manifest);
  std::int64_t target = std::llround(target_hours * 3.6e9);
  if (target > total)
    throw InvalidArgumentError(fmt::format(
        "target {} h exceeds the {} h available in {}", target_hours,
        MicrosToHours(total), manifest.label()));

  struct Keyed {
    std::uint64_t key;
    const Utterance *utt;
  };
  std::vector<Keyed> order;
  order.reserve(manifest.size());
  for (const auto &u : manifest.utterances())
    order.push_back({KeyedHash(seed, u.utt_id), &u});
  std::sort(order.begin(), order.end(), [](const Keyed &a, const Keyed &b) {
    if (a.key != b.key) return a.key < b.key;
    return a.utt->utt_id < b.utt->utt_id;
  });

  SubsetResult result;
  std::vector<Utterance> chosen;
  for (const auto &k : order) {
    if (result.selected_micros >= target) break;
    chosen.push_back(*k.utt);
    result.selected_micros += DurationMicros(*k.utt->duration_s);
  }
  result.manifest = CorpusManifest(
      std::move(chosen), fmt::format("{}_{:g}h", manifest.label(), target_hours));
  result.speakers_covered = result.manifest.Speakers().size();
  result.speakers_total = manifest.Speakers().size();
  return result;
}

nlohmann::json ToJson(const ValidationReport &report) {
  nlohmann::json checks = nlohmann::json::array();
  for (const auto &c : report.checks) {
    checks.push_back({{"dimension", c.dimension},
                      {"expected", c.expected},
                      {"measured", c.measured},
                      {"tolerance", c.tolerance},
                      {"passed", c.passed}});
  }
  nlohmann::json unreadable = nlohmann::json::array();
  for (const auto &f : report.unreadable)
    unreadable.push_back({{"utt_id", f.utt_id}, {"error", f.message}});
  return {{"schema_version", kSchemaVersion},
          {"kind", "split_validation"},
          {"label", report.label},
          {"passed", report.passed()},
          {"checks", checks},
          {"unreadable", unreadable}};
}

}  // namespace noisebench
