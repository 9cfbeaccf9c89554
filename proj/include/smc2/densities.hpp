// Copyright 2026 The adaptive-smc2 Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SMC2_DENSITIES_HPP
#define SMC2_DENSITIES_HPP

#include <cmath>
#include <numbers>

#include "smc2/numeric.hpp"

// Log-densities of the handful of distributions the models need.
namespace smc2::density {

inline constexpr double kHalfLog2Pi = 0.91893853320467274178;

/// Same as `normal` with log(sd) supplied by the caller.
inline double normal_log_sd(double x, double mean, double sd, double log_sd) {
  const double z = (x - mean) / sd;
  return -kHalfLog2Pi - log_sd - 0.5 * z * z;
}

inline double normal(double x, double mean, double sd) { return normal_log_sd(x, mean, sd, std::log(sd)); }

inline double half_normal(double x, double scale) {
  if (x < 0.0) {
    return kNegInf;
  }
  return std::log(2.0) + normal(x, 0.0, scale);
}

/// Rate parameterisation.
inline double exponential(double x, double rate) {
  if (x < 0.0) {
    return kNegInf;
  }
  return std::log(rate) - rate * x;
}

inline double uniform(double x, double lower, double upper) {
  if (x < lower || x > upper) {
    return kNegInf;
  }
  return -std::log(upper - lower);
}

/// Poisson pmf at integer-valued `k` with mean `rate`.
inline double poisson(double k, double rate) {
  if (k < 0.0 || std::floor(k) != k) {
    return kNegInf;
  }
  if (rate == 0.0) {
    return k == 0.0 ? 0.0 : kNegInf;
  }
  return k * std::log(rate) - rate - std::lgamma(k + 1.0);
}

}  // namespace smc2::density

#endif  // SMC2_DENSITIES_HPP
