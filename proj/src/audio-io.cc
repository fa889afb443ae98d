// src/audio-io.cc

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

#include "noisebench/audio-io.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstring>
#include <fstream>

#include <fmt/format.h>

namespace noisebench {

AudioBuffer::AudioBuffer(std::vector<float> samples, int sample_rate,
                         std::string source_path)
    : samples_(std::move(samples)),
      sample_rate_(sample_rate),
      source_path_(std::move(source_path)) {
  if (sample_rate_ <= 0)
    throw InvalidArgumentError(
        fmt::format("sample rate must be positive, got {}", sample_rate_));
  for (std::size_t i = 0; i < samples_.size(); ++i) {
    if (!std::isfinite(samples_[i]))
      throw InvalidArgumentError(
          fmt::format("non-finite sample at index {}", i));
  }
}

float AudioBuffer::Peak() const {
  float peak = 0.0f;
  for (float s : samples_) peak = std::max(peak, std::fabs(s));
  return peak;
}

double DurationSeconds(const AudioBuffer &buffer) {
  return static_cast<double>(buffer.size()) / buffer.sample_rate();
}

const char *WavErrorKindName(WavErrorKind kind) {
  switch (kind) {
    case WavErrorKind::kCannotOpen: return "cannot-open";
    case WavErrorKind::kNotRiffWave: return "not-riff-wave";
    case WavErrorKind::kNotPcm: return "not-pcm";
    case WavErrorKind::kNotMono: return "not-mono";
    case WavErrorKind::kNotSixteenBit: return "not-16-bit";
    case WavErrorKind::kTruncated: return "truncated";
    case WavErrorKind::kCannotWrite: return "cannot-write";
    case WavErrorKind::kSampleOutOfRange: return "sample-out-of-range";
  }
  return "unknown";
}

std::int16_t AmplitudeToPcm16(float amplitude) {
  double v = std::round(static_cast<double>(amplitude) * 32768.0);
  v = std::clamp(v, -32768.0, 32767.0);
  return static_cast<std::int16_t>(v);
}

float Pcm16ToAmplitude(std::int16_t value) {
  return static_cast<float>(value / 32768.0);
}

namespace {

std::uint32_t ReadLe32(const unsigned char *p) {
  return static_cast<std::uint32_t>(p[0]) |
         (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) |
         (static_cast<std::uint32_t>(p[3]) << 24);
}

std::uint16_t ReadLe16(const unsigned char *p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

void PutLe32(std::string *out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out->push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void PutLe16(std::string *out, std::uint16_t v) {
  out->push_back(static_cast<char>(v & 0xff));
  out->push_back(static_cast<char>((v >> 8) & 0xff));
}

[[noreturn]] void Fail(WavErrorKind kind, const std::filesystem::path &path,
                       const std::string &detail) {
  throw WavError(kind, fmt::format("{}: {} ({})", path.string(), detail,
                                   WavErrorKindName(kind)));
}

struct ParsedHeader {
  int sample_rate = 0;
  std::uint32_t data_bytes = 0;
};

// Leaves the stream positioned at the first byte of sample data.
ParsedHeader ParseHeader(std::istream &is, const std::filesystem::path &path) {
  std::array<unsigned char, 12> riff{};
  if (!is.read(reinterpret_cast<char *>(riff.data()), riff.size()))
    Fail(WavErrorKind::kNotRiffWave, path, "file shorter than a RIFF header");
  if (std::memcmp(riff.data(), "RIFF", 4) != 0 ||
      std::memcmp(riff.data() + 8, "WAVE", 4) != 0)
    Fail(WavErrorKind::kNotRiffWave, path, "missing RIFF/WAVE magic");

  ParsedHeader header;
  bool have_fmt = false;
  while (true) {
    std::array<unsigned char, 8> chunk{};
    if (!is.read(reinterpret_cast<char *>(chunk.data()), chunk.size())) {
      if (!have_fmt)
        Fail(WavErrorKind::kNotRiffWave, path, "no fmt chunk");
      Fail(WavErrorKind::kTruncated, path, "no data chunk");
    }
    std::uint32_t chunk_size = ReadLe32(chunk.data() + 4);
    if (std::memcmp(chunk.data(), "fmt ", 4) == 0) {
      if (chunk_size < 16)
        Fail(WavErrorKind::kNotRiffWave, path, "fmt chunk too small");
      std::vector<unsigned char> fmt_data(chunk_size + (chunk_size & 1));
      if (!is.read(reinterpret_cast<char *>(fmt_data.data()), fmt_data.size()))
        Fail(WavErrorKind::kTruncated, path, "fmt chunk cut short");
      std::uint16_t audio_format = ReadLe16(fmt_data.data());
      std::uint16_t channels = ReadLe16(fmt_data.data() + 2);
      std::uint32_t rate = ReadLe32(fmt_data.data() + 4);
      std::uint16_t bits = ReadLe16(fmt_data.data() + 14);
      if (audio_format != 1)
        Fail(WavErrorKind::kNotPcm, path,
             fmt::format("audio format {} is not PCM", audio_format));
      if (channels != 1)
        Fail(WavErrorKind::kNotMono, path,
             fmt::format("{} channels, only mono is supported", channels));
      if (bits != 16)
        Fail(WavErrorKind::kNotSixteenBit, path,
             fmt::format("{} bits per sample, only 16 is supported", bits));
      if (rate == 0 || rate > 0x7fffffffu)
        Fail(WavErrorKind::kNotRiffWave, path, "invalid sample rate");
      header.sample_rate = static_cast<int>(rate);
      have_fmt = true;
    } else if (std::memcmp(chunk.data(), "data", 4) == 0) {
      if (!have_fmt)
        Fail(WavErrorKind::kNotRiffWave, path, "data chunk before fmt chunk");
      if (chunk_size % 2 != 0)
        Fail(WavErrorKind::kTruncated, path, "odd data chunk size");
      header.data_bytes = chunk_size;
      return header;
    } else {
      is.seekg(chunk_size + (chunk_size & 1), std::ios::cur);
      if (!is) Fail(WavErrorKind::kTruncated, path, "chunk cut short");
    }
  }
}

}  // namespace

WavInfo ReadWavInfo(const std::filesystem::path &path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) Fail(WavErrorKind::kCannotOpen, path, "cannot open for reading");
  ParsedHeader header = ParseHeader(is, path);
  std::streampos data_start = is.tellg();
  is.seekg(0, std::ios::end);
  std::streamoff available = is.tellg() - data_start;
  if (available < static_cast<std::streamoff>(header.data_bytes))
    Fail(WavErrorKind::kTruncated, path,
         fmt::format("data chunk declares {} bytes, {} present",
                     header.data_bytes, available));
  return WavInfo{header.sample_rate,
                 static_cast<std::int64_t>(header.data_bytes / 2)};
}

AudioBuffer ReadWav(const std::filesystem::path &path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) Fail(WavErrorKind::kCannotOpen, path, "cannot open for reading");
  ParsedHeader header = ParseHeader(is, path);
  std::vector<unsigned char> raw(header.data_bytes);
  is.read(reinterpret_cast<char *>(raw.data()), raw.size());
  if (static_cast<std::size_t>(is.gcount()) != raw.size())
    Fail(WavErrorKind::kTruncated, path,
         fmt::format("data chunk declares {} bytes, {} present",
                     header.data_bytes, is.gcount()));
  std::vector<float> samples(raw.size() / 2);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    samples[i] = Pcm16ToAmplitude(
        static_cast<std::int16_t>(ReadLe16(raw.data() + 2 * i)));
  }
  return AudioBuffer(std::move(samples), header.sample_rate, path.string());
}

void WriteWav(const AudioBuffer &buffer, const std::filesystem::path &path) {
  std::span<const float> samples = buffer.samples();
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (std::fabs(samples[i]) > 1.0f)
      Fail(WavErrorKind::kSampleOutOfRange, path,
           fmt::format("sample {} has amplitude {}; clip handling was skipped",
                       i, samples[i]));
  }
  std::uint64_t data_bytes = 2 * static_cast<std::uint64_t>(samples.size());
  if (data_bytes > 0xffffffffull - 36)
    Fail(WavErrorKind::kCannotWrite, path, "buffer too large for RIFF");

  std::string out;
  out.reserve(44 + data_bytes);
  out += "RIFF";
  PutLe32(&out, static_cast<std::uint32_t>(36 + data_bytes));
  out += "WAVEfmt ";
  PutLe32(&out, 16);
  PutLe16(&out, 1);  // PCM
  PutLe16(&out, 1);  // mono
  PutLe32(&out, static_cast<std::uint32_t>(buffer.sample_rate()));
  PutLe32(&out, static_cast<std::uint32_t>(buffer.sample_rate()) * 2);
  PutLe16(&out, 2);
  PutLe16(&out, 16);
  out += "data";
  PutLe32(&out, static_cast<std::uint32_t>(data_bytes));
  for (float s : samples)
    PutLe16(&out, static_cast<std::uint16_t>(AmplitudeToPcm16(s)));

  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) Fail(WavErrorKind::kCannotWrite, path, "cannot open for writing");
  os.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!os) Fail(WavErrorKind::kCannotWrite, path, "write failed");
}

}  // namespace noisebench
