// src/common.cc

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

#include "noisebench/common.h"

#include <fmt/format.h>

namespace noisebench {

std::string DescribeFailures(const std::string &prefix,
                             const std::vector<UtteranceFailure> &failures,
                             std::size_t limit) {
  std::string out = fmt::format("{} ({} utterance(s)):", prefix, failures.size());
  for (std::size_t i = 0; i < failures.size() && i < limit; ++i)
    out += fmt::format(" {} ({});", failures[i].utt_id, failures[i].message);
  if (failures.size() > limit)
    out += fmt::format(" ... {} more", failures.size() - limit);
  return out;
}

}  // namespace noisebench
