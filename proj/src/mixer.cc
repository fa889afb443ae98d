// src/mixer.cc

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

#include "noisebench/mixer.h"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "noisebench/keyed-hash.h"
#include "noisebench/parallel.h"
#include "noisebench/stats.h"

namespace noisebench {

SnrEstimate MixRecord::AsEstimate(double scaled_noise_power_db) const {
  return SnrEstimate{speech_power_db, scaled_noise_power_db, realized_snr_db,
                     SnrMethod::kConstructionRatio};
}

MixPlan CalibrateGainFromPowers(std::span<const double> speech_powers_db,
                                double noise_power_db, double target_snr_db) {
  if (speech_powers_db.empty())
    throw InvalidArgumentError("calibration needs at least one utterance");
  MixPlan plan;
  plan.target_snr_db = target_snr_db;
  plan.noise_power_db = noise_power_db;
  plan.mean_speech_power_db = Mean(speech_powers_db);
  plan.calibration_utterances = speech_powers_db.size();
  plan.gain_db = plan.mean_speech_power_db - noise_power_db - target_snr_db;
  plan.noise_gain = std::pow(10.0, plan.gain_db / 20.0);
  return plan;
}

namespace {

void CheckRates(const AudioBuffer &speech, const AudioBuffer &noise) {
  if (speech.sample_rate() != noise.sample_rate())
    throw SampleRateMismatchError(fmt::format(
        "{} is {} Hz but the noise {} is {} Hz; resample beforehand",
        speech.source_path(), speech.sample_rate(), noise.source_path(),
        noise.sample_rate()));
}

double NoisePowerDb(const AudioBuffer &noise, const FrameConfig &frames) {
  if (noise.empty()) throw SilentSignalError("noise recording is empty");
  return MeanPowerDb(noise, false, frames);
}

}  // namespace

MixPlan CalibrateGain(const CorpusManifest &manifest, const AudioBuffer &noise,
                      double target_snr_db,
                      std::optional<std::size_t> sample_size,
                      const FrameConfig &frames) {
  if (manifest.empty())
    throw InvalidArgumentError(
        fmt::format("manifest {} is empty", manifest.label()));
  double noise_db = NoisePowerDb(noise, frames);
  std::size_t n = manifest.size();
  if (sample_size) {
    if (*sample_size == 0)
      throw InvalidArgumentError("calibration sample size must be positive");
    n = std::min(n, *sample_size);
  }
  std::vector<double> powers;
  powers.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Utterance &u = manifest.utterances()[i];
    AudioBuffer speech = ReadWav(u.audio_path);
    CheckRates(speech, noise);
    try {
      powers.push_back(MeanPowerDb(speech, true, frames));
    } catch (const SilentSignalError &) {
      throw SilentSignalError(fmt::format(
          "utterance {} is silent and cannot take part in calibration",
          u.utt_id));
    }
  }
  MixPlan plan = CalibrateGainFromPowers(powers, noise_db, target_snr_db);
  plan.noise_length_samples = static_cast<std::int64_t>(noise.size());
  return plan;
}

std::int64_t DrawOffset(std::uint64_t seed, const std::string &utt_id,
                        std::int64_t noise_len) {
  if (noise_len <= 0) throw InvalidArgumentError("noise length must be positive");
  return static_cast<std::int64_t>(KeyedHash(seed, utt_id) %
                                   static_cast<std::uint64_t>(noise_len));
}

MixedUtterance MixUtteranceWithPowers(const AudioBuffer &speech,
                                      const AudioBuffer &noise, double gain,
                                      std::int64_t offset,
                                      double speech_power_db,
                                      double noise_power_db) {
  CheckRates(speech, noise);
  if (!(gain > 0.0)) throw InvalidArgumentError("noise gain must be positive");
  if (noise.empty()) throw SilentSignalError("noise recording is empty");
  const auto s = speech.samples();
  const auto n = noise.samples();
  const std::size_t noise_len = n.size();
  std::size_t j = static_cast<std::size_t>(offset) % noise_len;

  std::vector<float> out(s.size());
  double peak = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    out[i] = static_cast<float>(static_cast<double>(s[i]) +
                                gain * static_cast<double>(n[j]));
    peak = std::max(peak, static_cast<double>(std::fabs(out[i])));
    if (++j == noise_len) j = 0;
  }

  MixRecord record;
  record.noise_offset_samples = offset % static_cast<std::int64_t>(noise_len);
  record.pre_clip_peak = peak;
  if (peak > kMixPeakLimit) {
    record.rescale_factor = kMixPeakLimit / peak;
    for (float &v : out)
      v = static_cast<float>(static_cast<double>(v) * record.rescale_factor);
  }
  record.speech_power_db = speech_power_db;
  record.realized_snr_db =
      speech_power_db - (noise_power_db + 20.0 * std::log10(gain));
  return MixedUtterance{
      AudioBuffer(std::move(out), speech.sample_rate(), speech.source_path()),
      record};
}

MixedUtterance MixUtterance(const AudioBuffer &speech, const AudioBuffer &noise,
                            double gain, std::int64_t offset,
                            const FrameConfig &frames) {
  CheckRates(speech, noise);
  return MixUtteranceWithPowers(speech, noise, gain, offset,
                                MeanPowerDb(speech, true, frames),
                                NoisePowerDb(noise, frames));
}

MixCorpusResult MixCorpus(const CorpusManifest &manifest,
                          const AudioBuffer &noise, double target_snr_db,
                          std::uint64_t seed,
                          const std::filesystem::path &out_dir,
                          const MixCorpusOptions &options) {
  if (manifest.empty())
    throw InvalidArgumentError(
        fmt::format("manifest {} is empty", manifest.label()));
  const double noise_db = NoisePowerDb(noise, options.frames);
  const auto &utts = manifest.utterances();
  const std::string suffix = SnrSuffix(target_snr_db);

  // Pass 1: speech powers.
  std::vector<double> powers(utts.size(), 0.0);
  std::vector<std::string> skip_reason(utts.size());
  std::vector<int> rates(utts.size(), 0);
  ParallelFor(utts.size(), options.jobs, [&](std::size_t i) {
    try {
      AudioBuffer speech = ReadWav(utts[i].audio_path);
      rates[i] = speech.sample_rate();
      powers[i] = MeanPowerDb(speech, true, options.frames);
    } catch (const SilentSignalError &) {
      skip_reason[i] = "silent utterance";
    } catch (const Error &e) {
      skip_reason[i] = e.what();
    }
  });
  for (std::size_t i = 0; i < utts.size(); ++i) {
    if (rates[i] != 0 && rates[i] != noise.sample_rate())
      throw SampleRateMismatchError(fmt::format(
          "utterance {} is {} Hz but the noise is {} Hz; resample beforehand",
          utts[i].utt_id, rates[i], noise.sample_rate()));
  }

  std::vector<UtteranceFailure> skipped;
  std::vector<std::size_t> usable;
  for (std::size_t i = 0; i < utts.size(); ++i) {
    if (skip_reason[i].empty()) {
      usable.push_back(i);
    } else {
      skipped.push_back({utts[i].utt_id, skip_reason[i]});
      spdlog::warn("skipping {}: {}", utts[i].utt_id, skip_reason[i]);
    }
  }
  if (usable.empty())
    throw CorpusError(DescribeFailures("no usable utterances", skipped), skipped);

  std::size_t n_cal = usable.size();
  if (options.calibration_sample_size) {
    if (*options.calibration_sample_size == 0)
      throw InvalidArgumentError("calibration sample size must be positive");
    n_cal = std::min(n_cal, *options.calibration_sample_size);
  }
  std::vector<double> cal_powers;
  cal_powers.reserve(n_cal);
  for (std::size_t k = 0; k < n_cal; ++k) cal_powers.push_back(powers[usable[k]]);
  MixPlan plan = CalibrateGainFromPowers(cal_powers, noise_db, target_snr_db);
  plan.noise_length_samples = static_cast<std::int64_t>(noise.size());
  plan.seed = seed;
  plan.skipped = skipped;
  spdlog::info("{} @ {} dB: gain {:.4f} ({:.3f} dB) from {} utterances",
               manifest.label(), target_snr_db, plan.noise_gain, plan.gain_db,
               n_cal);

  // Pass 2: mix and write.
  std::filesystem::create_directories(out_dir);
  const std::filesystem::path out_base = std::filesystem::absolute(out_dir);
  std::vector<Utterance> out_utts(usable.size());
  std::vector<MixRecord> records(usable.size());
  std::vector<std::string> write_errors(usable.size());
  ParallelFor(usable.size(), options.jobs, [&](std::size_t k) {
    const Utterance &src = utts[usable[k]];
    Utterance &dst = out_utts[k];
    dst = src;
    dst.utt_id = src.utt_id + suffix;
    dst.audio_path = (out_base / (dst.utt_id + ".wav")).lexically_normal();
    try {
      AudioBuffer speech = ReadWav(src.audio_path);
      std::int64_t offset = DrawOffset(seed, dst.utt_id, plan.noise_length_samples);
      MixedUtterance mixed = MixUtteranceWithPowers(
          speech, noise, plan.noise_gain, offset, powers[usable[k]], noise_db);
      mixed.record.utt_id = dst.utt_id;
      records[k] = mixed.record;
      dst.duration_s = DurationSeconds(mixed.audio);
      WriteWav(mixed.audio, dst.audio_path);
    } catch (const Error &e) {
      write_errors[k] = e.what();
    }
  });
  std::vector<UtteranceFailure> failures;
  for (std::size_t k = 0; k < usable.size(); ++k) {
    if (!write_errors[k].empty())
      failures.push_back({out_utts[k].utt_id, write_errors[k]});
  }
  if (!failures.empty())
    throw CorpusError(DescribeFailures("mixing failed", failures), failures);

  for (auto &r : records) plan.per_utterance.emplace(r.utt_id, r);
  CorpusManifest mixed(std::move(out_utts), manifest.label() + suffix);
  SaveManifest(mixed, out_dir);
  std::ofstream os(out_dir / "mix_plan.json", std::ios::binary | std::ios::trunc);
  os << ToJson(plan).dump(2) << "\n";
  if (!os)
    throw Error(fmt::format("cannot write {}",
                            (out_dir / "mix_plan.json").string()));
  return MixCorpusResult{std::move(mixed), std::move(plan)};
}

nlohmann::json ToJson(const MixPlan &plan) {
  nlohmann::json utts = nlohmann::json::array();
  for (const auto &[id, r] : plan.per_utterance) {
    utts.push_back({{"utt_id", r.utt_id},
                    {"noise_offset_samples", r.noise_offset_samples},
                    {"pre_clip_peak", r.pre_clip_peak},
                    {"rescale_factor", r.rescale_factor},
                    {"speech_power_db", r.speech_power_db},
                    {"realized_snr_db", r.realized_snr_db}});
  }
  nlohmann::json skipped = nlohmann::json::array();
  for (const auto &f : plan.skipped)
    skipped.push_back({{"utt_id", f.utt_id}, {"reason", f.message}});
  return {{"schema_version", kSchemaVersion},
          {"kind", "mix_plan"},
          {"target_snr_db", plan.target_snr_db},
          {"noise_gain", plan.noise_gain},
          {"gain_db", plan.gain_db},
          {"noise_power_db", plan.noise_power_db},
          {"mean_speech_power_db", plan.mean_speech_power_db},
          {"calibration_utterances", plan.calibration_utterances},
          {"noise_length_samples", plan.noise_length_samples},
          {"seed", plan.seed},
          {"per_utterance", utts},
          {"skipped", skipped}};
}

MixPlan MixPlanFromJson(const nlohmann::json &json) {
  if (json.value("kind", "") != "mix_plan")
    throw InvalidArgumentError("JSON is not a mix plan");
  MixPlan plan;
  plan.target_snr_db = json.at("target_snr_db").get<double>();
  plan.noise_gain = json.at("noise_gain").get<double>();
  plan.gain_db = json.at("gain_db").get<double>();
  plan.noise_power_db = json.at("noise_power_db").get<double>();
  plan.mean_speech_power_db = json.at("mean_speech_power_db").get<double>();
  plan.calibration_utterances = json.at("calibration_utterances").get<std::size_t>();
  plan.noise_length_samples = json.at("noise_length_samples").get<std::int64_t>();
  plan.seed = json.at("seed").get<std::uint64_t>();
  for (const auto &r : json.at("per_utterance")) {
    MixRecord rec;
    rec.utt_id = r.at("utt_id").get<std::string>();
    rec.noise_offset_samples = r.at("noise_offset_samples").get<std::int64_t>();
    rec.pre_clip_peak = r.at("pre_clip_peak").get<double>();
    rec.rescale_factor = r.at("rescale_factor").get<double>();
    rec.speech_power_db = r.at("speech_power_db").get<double>();
    rec.realized_snr_db = r.at("realized_snr_db").get<double>();
    plan.per_utterance.emplace(rec.utt_id, rec);
  }
  for (const auto &f : json.value("skipped", nlohmann::json::array()))
    plan.skipped.push_back({f.at("utt_id").get<std::string>(),
                            f.at("reason").get<std::string>()});
  return plan;
}

}  // namespace noisebench
