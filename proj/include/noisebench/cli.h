// include/noisebench/cli.h

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

#ifndef NOISEBENCH_CLI_H_
#define NOISEBENCH_CLI_H_

#include <ostream>
#include <string>
#include <vector>

namespace noisebench {

enum ExitCode : int {
  kExitSuccess = 0,
  kExitFatal = 1,
  kExitPartial = 2,
};

/// Runs the noisebench command line. args excludes the program name.
/// Returns one of the ExitCode values.
int RunCli(const std::vector<std::string> &args, std::ostream &out,
           std::ostream &err);

}  // namespace noisebench

#endif  // NOISEBENCH_CLI_H_
