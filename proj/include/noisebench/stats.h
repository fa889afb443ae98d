// include/noisebench/stats.h

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

#ifndef NOISEBENCH_STATS_H_
#define NOISEBENCH_STATS_H_

#include <cmath>
#include <span>

namespace noisebench {

/// Percentile with linear interpolation between order statistics
/// (q in [0, 100]); the "linear" rule of most numeric packages.
/// Requires a non-empty input.
double Percentile(std::span<const double> values, double q);

double Mean(std::span<const double> values);

/// Population standard deviation (divides by n).
double PopulationStddev(std::span<const double> values);

/// 10 * log10(power), floored at kPowerFloorDb.
double PowerToDb(double power);

inline double DbToPower(double db) { return std::pow(10.0, db / 10.0); }

}  // namespace noisebench

#endif  // NOISEBENCH_STATS_H_
