// include/noisebench/keyed-hash.h

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

#ifndef NOISEBENCH_KEYED_HASH_H_
#define NOISEBENCH_KEYED_HASH_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

namespace noisebench {

// KeyedHash(seed, key) is the one source of per-utterance randomness in the
// toolkit (noise offsets, subset ordering). It is defined as:
//
//   h = FNV-1a-64 over the 8 bytes of `seed` in little-endian order,
//       followed by the bytes of `key`
//   return splitmix64_finalize(h)
//
// where splitmix64_finalize(z) is
//   z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9
//   z = (z ^ (z >> 27)) * 0x94d049bb133111eb
//   z =  z ^ (z >> 31)
//
// The value depends only on (seed, key), never on call order or thread.
std::uint64_t KeyedHash(std::uint64_t seed, std::string_view key);

/// Plain FNV-1a-64 of a byte string (offset basis 0xcbf29ce484222325).
std::uint64_t Fnv1a64(std::string_view bytes,
                      std::uint64_t state = 0xcbf29ce484222325ull);

/// FNV-1a-64 of a file's bytes as 16 lowercase hex digits. Used for input
/// provenance in reports, not for security.
std::string FileChecksum(const std::filesystem::path &path);

}  // namespace noisebench

#endif  // NOISEBENCH_KEYED_HASH_H_
