// include/noisebench/snr.h

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

#ifndef NOISEBENCH_SNR_H_
#define NOISEBENCH_SNR_H_

#include <map>
#include <string>
#include <vector>

#include "json.hpp"
#include "noisebench/audio-io.h"
#include "noisebench/manifest.h"

namespace noisebench {

/// Rectangular framing. Lengths in samples are round(ms * rate / 1000).
struct FrameConfig {
  double frame_ms = 20.0;
  double hop_ms = 10.0;
};

struct FramePowers {
  std::vector<double> powers_db;  // 10 log10(mean square), floored
  double frame_ms = 0.0;
  double hop_ms = 0.0;
  int frame_length = 0;
  int hop_length = 0;
};

/// Throws InvalidArgumentError unless frame_ms >= hop_ms > 0 and the buffer
/// holds at least one full frame.
FramePowers ComputeFramePowers(const AudioBuffer &buffer,
                               const FrameConfig &config = {});

/// Mean linear power in dB. With active_only, only frames louder than the
/// 20th-percentile frame power + 3 dB are averaged (a crude energy VAD); if
/// no frame qualifies, all frames are used. A buffer shorter than one frame
/// is treated as a single frame.
///
/// Throws SilentSignalError when the buffer has no energy at all.
double MeanPowerDb(const AudioBuffer &buffer, bool active_only,
                   const FrameConfig &config = {});

enum class SnrMethod {
  kNistHistogram,
  /// Speech power over scaled noise power, known at mix time.
  kConstructionRatio,
};

const char *SnrMethodName(SnrMethod method);

struct SnrEstimate {
  double signal_power_db = 0.0;
  double noise_power_db = 0.0;
  double snr_db = 0.0;
  SnrMethod method = SnrMethod::kNistHistogram;
};

class SnrError : public Error {
 public:
  using Error::Error;
};

inline constexpr double kSnrHistogramBinDb = 0.5;
inline constexpr double kSnrMinSeconds = 1.0;
inline constexpr double kSnrModeFraction = 0.1;

// Histogram estimate in the spirit of NIST STNR. Frame powers go into 0.5 dB
// bins anchored at multiples of 0.5 dB. The histogram is smoothed with a
// 3-bin box and the noise level is the centre of its lowest local maximum
// that reaches kSnrModeFraction of the tallest bin. The signal level is the
// 95th percentile frame power.
//
// Throws SnrError for buffers shorter than 1 s or when every frame falls in
// one bin (a constant signal has no defined SNR).
SnrEstimate EstimateSnr(const AudioBuffer &buffer,
                        const FrameConfig &config = {});

struct SnrProfile {
  std::map<std::string, SnrEstimate> per_utterance;
  double mean_db = 0.0;
  double stddev_db = 0.0;  // population
  std::map<int, double> percentiles_db;  // keys 5, 25, 50, 75, 95
};

/// Fills the aggregate fields from per_utterance. Throws if it is empty.
void RecomputeProfileStats(SnrProfile *profile);

struct ProfileOptions {
  FrameConfig frames;
  bool allow_partial = false;
  int jobs = 0;
};

struct ProfileResult {
  SnrProfile profile;
  std::vector<UtteranceFailure> failures;
};

/// Runs EstimateSnr on every utterance. Failures throw a CorpusError naming
/// the utterances, unless allow_partial is set, in which case they are
/// returned alongside the profile of the rest (still an error if nothing
/// succeeded).
ProfileResult CorpusSnrProfile(const CorpusManifest &manifest,
                               const ProfileOptions &options = {});

nlohmann::json ToJson(const SnrProfile &profile);
/// Columns: utt_id,snr_db,signal_db,noise_db.
std::string ToCsv(const SnrProfile &profile);

}  // namespace noisebench

#endif  // NOISEBENCH_SNR_H_
