// include/noisebench/common.h

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

#ifndef NOISEBENCH_COMMON_H_
#define NOISEBENCH_COMMON_H_

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace noisebench {

/// Base class of every error the library throws. Callers that only care
/// about "did it work" catch this; the subclasses carry the detail.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A utterance or noise recording with no usable energy.
class SilentSignalError : public Error {
 public:
  using Error::Error;
};

/// Speech and noise (or two utterances) at different sample rates.
class SampleRateMismatchError : public Error {
 public:
  using Error::Error;
};

/// Arguments outside an operation's documented domain.
class InvalidArgumentError : public Error {
 public:
  using Error::Error;
};

/// One utterance that could not be processed, with the reason.
struct UtteranceFailure {
  std::string utt_id;
  std::string message;
};

/// Per-utterance failures that were not tolerated; what() lists the ids.
class CorpusError : public Error {
 public:
  CorpusError(const std::string &what, std::vector<UtteranceFailure> failures)
      : Error(what), failures_(std::move(failures)) {}
  const std::vector<UtteranceFailure> &failures() const { return failures_; }

 private:
  std::vector<UtteranceFailure> failures_;
};

/// Builds "<prefix>: id1 (msg1); id2 (msg2); ..." listing at most `limit` ids.
std::string DescribeFailures(const std::string &prefix,
                             const std::vector<UtteranceFailure> &failures,
                             std::size_t limit = 20);

/// Silence floor applied to every power value, in dB.
inline constexpr double kPowerFloorDb = -120.0;

/// Version tag written into every JSON payload.
inline constexpr int kSchemaVersion = 1;

}  // namespace noisebench

#endif  // NOISEBENCH_COMMON_H_
