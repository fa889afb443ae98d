// include/noisebench/mixer.h

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

#ifndef NOISEBENCH_MIXER_H_
#define NOISEBENCH_MIXER_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "noisebench/audio-io.h"
#include "noisebench/manifest.h"
#include "noisebench/snr.h"

namespace noisebench {

/// Peak allowed in mixed output before the joint rescale kicks in.
inline constexpr double kMixPeakLimit = 0.999;

struct MixRecord {
  std::string utt_id;
  std::int64_t noise_offset_samples = 0;
  double pre_clip_peak = 0.0;
  double rescale_factor = 1.0;
  double speech_power_db = 0.0;
  double realized_snr_db = 0.0;

  SnrEstimate AsEstimate(double scaled_noise_power_db) const;
};

/// One calibrated noise gain for a whole corpus at one target SNR.
///
/// Calibration identity:
///   20 log10(noise_gain) + noise_power_db
///       == mean over calibration utterances of speech_power_db - target
struct MixPlan {
  double target_snr_db = 0.0;
  double noise_gain = 1.0;
  double gain_db = 0.0;
  double noise_power_db = 0.0;       // unscaled noise, all frames
  double mean_speech_power_db = 0.0; // over the calibration sample
  std::size_t calibration_utterances = 0;
  std::int64_t noise_length_samples = 0;
  std::uint64_t seed = 0;
  std::map<std::string, MixRecord> per_utterance;
  std::vector<UtteranceFailure> skipped;

  /// Scaled noise power, noise_power_db + gain_db.
  double ScaledNoisePowerDb() const { return noise_power_db + gain_db; }
};

// The gain closes the gap between the mean (in dB) of the utterances'
// active-frame speech power and the noise power over all frames:
//
//   gain_db = mean_u(speech_db(u)) - noise_db - target_snr_db
//
// With sample_size set, only the first sample_size utterances in manifest
// order take part. Throws SilentSignalError for a silent noise or a silent
// utterance in the sample, SampleRateMismatchError when rates differ.
MixPlan CalibrateGain(const CorpusManifest &manifest, const AudioBuffer &noise,
                      double target_snr_db,
                      std::optional<std::size_t> sample_size = std::nullopt,
                      const FrameConfig &frames = {});

/// Same identity on precomputed powers.
MixPlan CalibrateGainFromPowers(std::span<const double> speech_powers_db,
                                double noise_power_db, double target_snr_db);

/// KeyedHash(seed, utt_id) mod noise_len. noise_len must be positive.
std::int64_t DrawOffset(std::uint64_t seed, const std::string &utt_id,
                        std::int64_t noise_len);

struct MixedUtterance {
  AudioBuffer audio;
  MixRecord record;
};

// out[i] = speech[i] + gain * noise[(offset + i) mod noise_len], evaluated in
// double and stored as float. If the peak exceeds kMixPeakLimit the whole
// output is multiplied by kMixPeakLimit / peak, which leaves the SNR alone.
MixedUtterance MixUtterance(const AudioBuffer &speech, const AudioBuffer &noise,
                            double gain, std::int64_t offset,
                            const FrameConfig &frames = {});

/// As above with the speech and unscaled noise powers already known.
MixedUtterance MixUtteranceWithPowers(const AudioBuffer &speech,
                                      const AudioBuffer &noise, double gain,
                                      std::int64_t offset,
                                      double speech_power_db,
                                      double noise_power_db);

struct MixCorpusOptions {
  std::optional<std::size_t> calibration_sample_size;
  FrameConfig frames;
  int jobs = 0;
};

struct MixCorpusResult {
  CorpusManifest manifest;
  MixPlan plan;
};

// Calibrates once over every usable utterance (or the first
// calibration_sample_size of them), then mixes each utterance into
// out_dir/{utt_id}_snr{T}.wav and writes the Kaldi data files plus
// mix_plan.json to out_dir. The noise offset of an utterance is
// DrawOffset(seed, output id), so each condition takes its own noise piece.
//
// Silent or unreadable utterances are skipped and listed in plan.skipped.
// A sample-rate mismatch throws; failed writes throw a CorpusError naming
// every affected id. Audio is streamed, never held for the whole corpus.
MixCorpusResult MixCorpus(const CorpusManifest &manifest,
                          const AudioBuffer &noise, double target_snr_db,
                          std::uint64_t seed,
                          const std::filesystem::path &out_dir,
                          const MixCorpusOptions &options = {});

nlohmann::json ToJson(const MixPlan &plan);
MixPlan MixPlanFromJson(const nlohmann::json &json);

}  // namespace noisebench

#endif  // NOISEBENCH_MIXER_H_
