// include/noisebench/manifest.h

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

#ifndef NOISEBENCH_MANIFEST_H_
#define NOISEBENCH_MANIFEST_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "noisebench/common.h"

namespace noisebench {

class ManifestError : public Error {
 public:
  using Error::Error;
};

struct Utterance {
  std::string utt_id;
  std::string speaker_id;
  std::filesystem::path audio_path;
  std::string transcript;
  // Filled from utt2dur or by reading the WAV header; see WithDurations().
  std::optional<double> duration_s;

  bool operator==(const Utterance &) const = default;
};

/// An ordered, duplicate-free set of utterances (one split of a corpus).
/// Utterances are kept sorted by utt_id, byte-wise ascending.
class CorpusManifest {
 public:
  CorpusManifest() = default;
  /// Sorts; throws ManifestError on an empty or duplicate utt_id.
  CorpusManifest(std::vector<Utterance> utterances, std::string label);

  const std::vector<Utterance> &utterances() const { return utterances_; }
  std::size_t size() const { return utterances_.size(); }
  bool empty() const { return utterances_.empty(); }
  const std::string &label() const { return label_; }

  CorpusManifest WithLabel(std::string label) const;
  const Utterance *Find(const std::string &utt_id) const;
  std::set<std::string> Speakers() const;
  bool HasAllDurations() const;

  bool operator==(const CorpusManifest &) const = default;

 private:
  std::vector<Utterance> utterances_;
  std::string label_;
};

// Kaldi data directory I/O.
//
// Required files: wav.scp ("<utt_id> <path>") and text ("<utt_id>
// <transcript>"). Optional: utt2spk (otherwise the speaker is the utt_id up to
// its last underscore) and utt2dur ("<utt_id> <seconds>"). spk2utt is written
// but never read. Relative audio paths resolve against the data directory.
// The label defaults to the directory's file name.
CorpusManifest LoadManifest(const std::filesystem::path &dir);

/// Writes wav.scp, text, utt2spk, spk2utt, and utt2dur (when every duration
/// is known). Audio paths under `dir` are written relative to it.
void SaveManifest(const CorpusManifest &manifest,
                  const std::filesystem::path &dir);

/// Speaker fallback when utt2spk is absent.
std::string SpeakerFromUttId(const std::string &utt_id);

/// Reads the WAV header of every utterance lacking a duration. Unreadable
/// files are appended to `failures` (when given) and left without duration;
/// with no failure sink the first unreadable file throws.
CorpusManifest WithDurations(const CorpusManifest &manifest, int jobs = 0,
                             std::vector<UtteranceFailure> *failures = nullptr);

// Hour accounting is done on durations rounded to whole microseconds so that
// totals are exact integers, independent of summation order.
std::int64_t DurationMicros(double seconds);
/// Throws ManifestError if any duration is missing.
std::int64_t TotalDurationMicros(const CorpusManifest &manifest);
double MicrosToHours(std::int64_t micros);
double TotalHours(const CorpusManifest &manifest);

struct SplitExpectation {
  std::int64_t expected_utterances = 0;
  double expected_hours = 0.0;
  std::int64_t expected_speakers = 0;
  std::int64_t utterance_tolerance = 0;
  double hours_tolerance = 0.5;
  std::int64_t speaker_tolerance = 0;
};

/// Published AiShell-1 split sizes (hours are the rounded published values,
/// hence the +/-0.5 h tolerance).
SplitExpectation AishellTrainSplit();
SplitExpectation AishellDevSplit();
SplitExpectation AishellTestSplit();

struct ValidationCheck {
  std::string dimension;  // "utterances", "hours", "speakers"
  double expected = 0.0;
  double measured = 0.0;
  double tolerance = 0.0;
  bool passed = false;
};

struct ValidationReport {
  std::string label;
  std::vector<ValidationCheck> checks;
  std::vector<UtteranceFailure> unreadable;
  bool passed() const;
  const ValidationCheck *Check(const std::string &dimension) const;
};

ValidationReport ValidateSplit(const CorpusManifest &manifest,
                               const SplitExpectation &expect, int jobs = 0);

/// "_snr10", "_snr-5", "_snr7.5".
std::string SnrSuffix(double target_snr_db);

/// Concatenates a clean manifest with its noisy copies. Each noisy manifest
/// must hold exactly the clean ids, each carrying one shared "_snr{T}"
/// suffix, and no two noisy manifests may share a suffix.
CorpusManifest MakeMulticondition(const CorpusManifest &clean,
                                  const std::vector<CorpusManifest> &noisy);

struct SubsetResult {
  CorpusManifest manifest;
  std::int64_t selected_micros = 0;
  std::size_t speakers_covered = 0;
  std::size_t speakers_total = 0;
};

/// Visits utterances in KeyedHash(seed, utt_id) order and keeps them until
/// the cumulative duration first reaches target_hours. Requires durations.
SubsetResult SubsetByHours(const CorpusManifest &manifest, double target_hours,
                           std::uint64_t seed);

nlohmann::json ToJson(const ValidationReport &report);

}  // namespace noisebench

#endif  // NOISEBENCH_MANIFEST_H_
