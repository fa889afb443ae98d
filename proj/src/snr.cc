// src/snr.cc

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

#include "noisebench/snr.h"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <fmt/format.h>

#include "noisebench/parallel.h"
#include "noisebench/stats.h"

namespace noisebench {

namespace {

int MsToSamples(double ms, int sample_rate) {
  return static_cast<int>(std::lround(ms * sample_rate / 1000.0));
}

double MeanSquare(std::span<const float> samples) {
  double acc = 0.0;
  for (float s : samples) acc += static_cast<double>(s) * s;
  return acc / static_cast<double>(samples.size());
}

// Linear per-frame powers; a buffer shorter than a frame is one frame.
std::vector<double> LinearFramePowers(const AudioBuffer &buffer,
                                      const FrameConfig &config) {
  if (!(config.hop_ms > 0.0) || config.frame_ms < config.hop_ms)
    throw InvalidArgumentError(fmt::format(
        "need frame_ms >= hop_ms > 0, got frame {} ms hop {} ms",
        config.frame_ms, config.hop_ms));
  int frame = std::max(1, MsToSamples(config.frame_ms, buffer.sample_rate()));
  int hop = std::max(1, MsToSamples(config.hop_ms, buffer.sample_rate()));
  auto samples = buffer.samples();
  std::vector<double> powers;
  if (samples.size() < static_cast<std::size_t>(frame)) {
    powers.push_back(MeanSquare(samples));
    return powers;
  }
  std::size_t count = (samples.size() - frame) / hop + 1;
  powers.reserve(count);
  for (std::size_t f = 0; f < count; ++f)
    powers.push_back(MeanSquare(samples.subspan(f * hop, frame)));
  return powers;
}

}  // namespace

FramePowers ComputeFramePowers(const AudioBuffer &buffer,
                               const FrameConfig &config) {
  FramePowers out;
  out.frame_ms = config.frame_ms;
  out.hop_ms = config.hop_ms;
  out.frame_length = std::max(1, MsToSamples(config.frame_ms, buffer.sample_rate()));
  out.hop_length = std::max(1, MsToSamples(config.hop_ms, buffer.sample_rate()));
  if (buffer.size() < static_cast<std::size_t>(out.frame_length))
    throw InvalidArgumentError(fmt::format(
        "buffer of {} samples is shorter than one {}-sample frame",
        buffer.size(), out.frame_length));
  std::vector<double> linear = LinearFramePowers(buffer, config);
  out.powers_db.reserve(linear.size());
  for (double p : linear) out.powers_db.push_back(PowerToDb(p));
  return out;
}

double MeanPowerDb(const AudioBuffer &buffer, bool active_only,
                   const FrameConfig &config) {
  if (buffer.empty()) throw InvalidArgumentError("mean power of empty buffer");
  std::vector<double> linear = LinearFramePowers(buffer, config);
  if (std::all_of(linear.begin(), linear.end(), [](double p) { return p == 0.0; }))
    throw SilentSignalError(fmt::format(
        "{} has no energy", buffer.source_path().empty() ? std::string("buffer")
                                                         : buffer.source_path()));
  double sum = 0.0;
  std::size_t used = 0;
  if (active_only) {
    std::vector<double> db;
    db.reserve(linear.size());
    for (double p : linear) db.push_back(PowerToDb(p));
    double threshold = Percentile(db, 20.0) + 3.0;
    for (std::size_t i = 0; i < linear.size(); ++i) {
      if (db[i] > threshold) {
        sum += linear[i];
        ++used;
      }
    }
  }
  if (used == 0) {
    for (double p : linear) sum += p;
    used = linear.size();
  }
  return PowerToDb(sum / static_cast<double>(used));
}

const char *SnrMethodName(SnrMethod method) {
  switch (method) {
    case SnrMethod::kNistHistogram: return "nist_histogram";
    case SnrMethod::kConstructionRatio: return "construction_ratio";
  }
  return "unknown";
}

SnrEstimate EstimateSnr(const AudioBuffer &buffer, const FrameConfig &config) {
  if (DurationSeconds(buffer) < kSnrMinSeconds)
    throw SnrError(fmt::format("{}: {:.3f} s is shorter than the {} s minimum",
                               buffer.source_path(), DurationSeconds(buffer),
                               kSnrMinSeconds));
  FramePowers frames = ComputeFramePowers(buffer, config);
  const std::vector<double> &db = frames.powers_db;

  auto bin_of = [](double p) {
    return static_cast<long>(std::floor(p / kSnrHistogramBinDb));
  };
  auto [lo_it, hi_it] = std::minmax_element(db.begin(), db.end());
  long lo = bin_of(*lo_it);
  long hi = bin_of(*hi_it);
  if (lo == hi)
    throw SnrError(fmt::format(
        "{}: every frame falls in one histogram bin; SNR is undefined",
        buffer.source_path()));

  std::vector<double> counts(hi - lo + 1, 0.0);
  for (double p : db) counts[bin_of(p) - lo] += 1.0;
  std::vector<double> smoothed(counts.size(), 0.0);
  for (std::size_t k = 0; k < counts.size(); ++k) {
    smoothed[k] = counts[k];
    if (k > 0) smoothed[k] += counts[k - 1];
    if (k + 1 < counts.size()) smoothed[k] += counts[k + 1];
  }
  // Noise is the lowest-power local maximum that reaches kSnrModeFraction of
  // the tallest smoothed bin; plateaus resolve to their lowest bin.
  const double tallest = *std::max_element(smoothed.begin(), smoothed.end());
  std::size_t mode = 0;
  for (std::size_t k = 0; k < smoothed.size(); ++k) {
    bool rises = k == 0 || smoothed[k] > smoothed[k - 1];
    bool holds = k + 1 == smoothed.size() || smoothed[k] >= smoothed[k + 1];
    if (rises && holds && smoothed[k] >= kSnrModeFraction * tallest) {
      mode = k;
      break;
    }
  }

  SnrEstimate estimate;
  estimate.method = SnrMethod::kNistHistogram;
  estimate.noise_power_db =
      std::max(kPowerFloorDb, (static_cast<double>(lo + static_cast<long>(mode)) + 0.5) *
                                  kSnrHistogramBinDb);
  estimate.signal_power_db = std::max(kPowerFloorDb, Percentile(db, 95.0));
  estimate.snr_db = estimate.signal_power_db - estimate.noise_power_db;
  return estimate;
}

void RecomputeProfileStats(SnrProfile *profile) {
  if (profile->per_utterance.empty())
    throw InvalidArgumentError("SNR profile has no utterances");
  std::vector<double> values;
  values.reserve(profile->per_utterance.size());
  for (const auto &[id, est] : profile->per_utterance) values.push_back(est.snr_db);
  profile->mean_db = Mean(values);
  profile->stddev_db = PopulationStddev(values);
  profile->percentiles_db.clear();
  for (int q : {5, 25, 50, 75, 95})
    profile->percentiles_db[q] = Percentile(values, q);
}

ProfileResult CorpusSnrProfile(const CorpusManifest &manifest,
                               const ProfileOptions &options) {
  if (manifest.empty())
    throw InvalidArgumentError(
        fmt::format("manifest {} is empty", manifest.label()));
  const auto &utts = manifest.utterances();
  std::vector<SnrEstimate> estimates(utts.size());
  std::vector<std::string> errors(utts.size());
  ParallelFor(utts.size(), options.jobs, [&](std::size_t i) {
    try {
      estimates[i] = EstimateSnr(ReadWav(utts[i].audio_path), options.frames);
    } catch (const Error &e) {
      errors[i] = e.what();
    }
  });

  ProfileResult result;
  for (std::size_t i = 0; i < utts.size(); ++i) {
    if (errors[i].empty()) {
      result.profile.per_utterance.emplace(utts[i].utt_id, estimates[i]);
    } else {
      result.failures.push_back({utts[i].utt_id, errors[i]});
    }
  }
  if (!result.failures.empty() &&
      (!options.allow_partial || result.profile.per_utterance.empty()))
    throw CorpusError(DescribeFailures("SNR estimation failed", result.failures),
                      result.failures);
  RecomputeProfileStats(&result.profile);
  return result;
}

nlohmann::json ToJson(const SnrProfile &profile) {
  nlohmann::json utts = nlohmann::json::array();
  for (const auto &[id, est] : profile.per_utterance) {
    utts.push_back({{"utt_id", id},
                    {"snr_db", est.snr_db},
                    {"signal_db", est.signal_power_db},
                    {"noise_db", est.noise_power_db},
                    {"method", SnrMethodName(est.method)}});
  }
  nlohmann::json percentiles = nlohmann::json::object();
  for (const auto &[q, v] : profile.percentiles_db)
    percentiles[fmt::format("p{}", q)] = v;
  return {{"kind", "snr_profile"},
          {"num_utterances", profile.per_utterance.size()},
          {"mean_db", profile.mean_db},
          {"stddev_db", profile.stddev_db},
          {"percentiles_db", percentiles},
          {"per_utterance", utts}};
}

std::string ToCsv(const SnrProfile &profile) {
  std::string out = "utt_id,snr_db,signal_db,noise_db\n";
  for (const auto &[id, est] : profile.per_utterance)
    out += fmt::format("{},{:.4f},{:.4f},{:.4f}\n", id, est.snr_db,
                       est.signal_power_db, est.noise_power_db);
  return out;
}

}  // namespace noisebench
