// tests/support/synthetic.h

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

#ifndef NOISEBENCH_TESTS_SUPPORT_SYNTHETIC_H_
#define NOISEBENCH_TESTS_SUPPORT_SYNTHETIC_H_

// Synthetic fixtures for the test suites. Nothing here calls into the code
// under test except AudioBuffer/WriteWav/SaveManifest for persisting
// fixtures.

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "noisebench/audio-io.h"
#include "noisebench/manifest.h"

namespace noisebench::testing {

/// Deletes the directory on destruction.
class ScopedTempDir {
 public:
  explicit ScopedTempDir(const std::string &tag);
  ~ScopedTempDir();
  ScopedTempDir(const ScopedTempDir &) = delete;
  ScopedTempDir &operator=(const ScopedTempDir &) = delete;
  const std::filesystem::path &path() const { return path_; }

 private:
  std::filesystem::path path_;
};

/// Portable standard normal draws (Box-Muller on mt19937_64).
class Gaussian {
 public:
  explicit Gaussian(std::uint64_t seed) : rng_(seed) {}
  double Next();
  double Uniform();  // [0, 1)
  std::mt19937_64 &engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

AudioBuffer Constant(double amplitude, std::size_t n, int rate = 16000);
AudioBuffer Sine(double amplitude, double freq_hz, double seconds,
                 int rate = 16000);
/// White Gaussian noise whose expected power is power_db.
AudioBuffer WhiteNoise(double power_db, double seconds, std::uint64_t seed,
                       int rate = 16000);

/// Speech-like fixture: 250 ms blocks, each voiced with probability
/// voiced_fraction. Voiced blocks are a three-harmonic tone whose power is
/// level_db; every sample also carries white noise at floor_db.
AudioBuffer SpeechLike(double level_db, double seconds, std::uint64_t seed,
                       double voiced_fraction = 0.6, double floor_db = -70.0,
                       int rate = 16000);

struct SyntheticUtt {
  std::string utt_id;
  std::string speaker_id;
  std::string transcript;
  AudioBuffer audio;
};

/// Writes <dir>/wav/<id>.wav for each utterance plus the Kaldi files.
CorpusManifest WriteDataDir(const std::filesystem::path &dir,
                            const std::vector<SyntheticUtt> &utts);

/// n speech-like utterances of `seconds` each with levels spread uniformly
/// over [top_level_db - spread_db, top_level_db]; speakers cycle over
/// num_speakers. Utterance i has id "spkXX_uttYYYYY".
CorpusManifest MakeSpeechCorpus(const std::filesystem::path &dir, int n,
                                double spread_db, std::uint64_t seed,
                                double seconds = 2.0, int num_speakers = 10,
                                double top_level_db = -20.0);

/// In-memory manifest of n utterances with utt2dur-style durations only (no
/// audio). Durations are whole centiseconds summing to total_hours exactly;
/// ids are "S%04d_U%06d" with speakers assigned round robin.
CorpusManifest MakeTimedManifest(const std::filesystem::path &dir, int n,
                                 int num_speakers, double total_hours,
                                 std::uint64_t seed);

/// Random CJK-range transcript of `length` characters.
std::string RandomHanzi(Gaussian &rng, int length);

}  // namespace noisebench::testing

#endif  // NOISEBENCH_TESTS_SUPPORT_SYNTHETIC_H_
