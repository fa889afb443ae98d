// src/keyed-hash.cc

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

#include "noisebench/keyed-hash.h"

#include <array>
#include <fstream>

#include <fmt/format.h>

#include "noisebench/common.h"

namespace noisebench {

namespace {
constexpr std::uint64_t kFnvPrime = 0x100000001b3ull;

std::uint64_t SplitMix64Finalize(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}
}  // namespace

std::uint64_t Fnv1a64(std::string_view bytes, std::uint64_t state) {
  for (unsigned char c : bytes) {
    state ^= c;
    state *= kFnvPrime;
  }
  return state;
}

std::uint64_t KeyedHash(std::uint64_t seed, std::string_view key) {
  std::array<char, 8> seed_bytes{};
  for (int i = 0; i < 8; ++i)
    seed_bytes[i] = static_cast<char>((seed >> (8 * i)) & 0xff);
  std::uint64_t h = Fnv1a64(std::string_view(seed_bytes.data(), 8));
  h = Fnv1a64(key, h);
  return SplitMix64Finalize(h);
}

std::string FileChecksum(const std::filesystem::path &path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error(fmt::format("cannot open {} for checksum", path.string()));
  std::uint64_t h = 0xcbf29ce484222325ull;
  std::array<char, 1 << 16> buf;
  while (is) {
    is.read(buf.data(), buf.size());
    h = Fnv1a64(std::string_view(buf.data(), static_cast<std::size_t>(is.gcount())), h);
  }
  return fmt::format("{:016x}", h);
}

}  // namespace noisebench
