// include/noisebench/audio-io.h

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

#ifndef NOISEBENCH_AUDIO_IO_H_
#define NOISEBENCH_AUDIO_IO_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "noisebench/common.h"

namespace noisebench {

/// Mono PCM audio. Samples are amplitudes in [-1, 1].
///
/// The buffer is a value type; once constructed it is not mutated by any
/// library operation, so it may be shared freely between threads.
class AudioBuffer {
 public:
  AudioBuffer() = default;
  /// Throws InvalidArgumentError if sample_rate is not positive or any sample
  /// is non-finite.
  AudioBuffer(std::vector<float> samples, int sample_rate,
              std::string source_path = {});

  std::span<const float> samples() const { return samples_; }
  std::size_t size() const { return samples_.size(); }
  bool empty() const { return samples_.empty(); }
  int sample_rate() const { return sample_rate_; }
  const std::string &source_path() const { return source_path_; }

  /// Largest |sample|.
  float Peak() const;

 private:
  std::vector<float> samples_;
  int sample_rate_ = 16000;
  std::string source_path_;
};

/// Sample count divided by sample rate.
double DurationSeconds(const AudioBuffer &buffer);

enum class WavErrorKind {
  kCannotOpen,
  kNotRiffWave,
  kNotPcm,
  kNotMono,
  kNotSixteenBit,
  kTruncated,
  kCannotWrite,
  kSampleOutOfRange,
};

const char *WavErrorKindName(WavErrorKind kind);

class WavError : public Error {
 public:
  WavError(WavErrorKind kind, const std::string &what)
      : Error(what), kind_(kind) {}
  WavErrorKind kind() const { return kind_; }

 private:
  WavErrorKind kind_;
};

/// Header facts, read without touching the sample data.
struct WavInfo {
  int sample_rate = 0;
  std::int64_t num_samples = 0;
  double duration_seconds() const {
    return static_cast<double>(num_samples) / sample_rate;
  }
};

// Only RIFF/WAVE, format tag 1 (PCM), one channel, 16 bits per sample.
// Unknown chunks before "data" are skipped; a data chunk shorter than its
// declared size is kTruncated.
//
// Read maps an integer sample k to k / 32768. Write maps an amplitude a to
// round(a * 32768) clamped to [-32768, 32767], so 1.0 encodes as 32767 and
// any integer sample survives read -> write unchanged.
AudioBuffer ReadWav(const std::filesystem::path &path);
WavInfo ReadWavInfo(const std::filesystem::path &path);
void WriteWav(const AudioBuffer &buffer, const std::filesystem::path &path);

/// Encode/decode single samples; exposed for tests of the scaling convention.
std::int16_t AmplitudeToPcm16(float amplitude);
float Pcm16ToAmplitude(std::int16_t value);

}  // namespace noisebench

#endif  // NOISEBENCH_AUDIO_IO_H_
