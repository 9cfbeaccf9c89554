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

#ifndef SMC2_NUMERIC_HPP
#define SMC2_NUMERIC_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <span>
#include <vector>

namespace smc2 {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();
inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// log(sum(exp(v))); -inf for an empty or all -inf input.
inline double log_sum_exp(std::span<const double> v) {
  double max = kNegInf;
  for (double x : v) {
    max = std::max(max, x);
  }
  if (!std::isfinite(max)) {
    return max;
  }
  double sum = 0.0;
  for (double x : v) {
    sum += std::exp(x - max);
  }
  return max + std::log(sum);
}

/// Normalises log-weights in place so that they log-sum-exp to zero, and
/// returns the normaliser. Leaves the input untouched when every entry is -inf.
inline double normalize_log_weights(std::span<double> log_w) {
  const double lse = log_sum_exp(log_w);
  if (lse == kNegInf || std::isnan(lse)) {
    return lse;
  }
  for (double& x : log_w) {
    x -= lse;
  }
  return lse;
}

/// exp(log_w - lse): the normalised weights. Equal log-weights give exactly 1/n.
inline std::vector<double> normalized_weights(std::span<const double> log_w) {
  std::vector<double> w(log_w.size());
  if (std::all_of(log_w.begin(), log_w.end(), [&](double x) { return x == log_w.front(); })) {
    std::fill(w.begin(), w.end(), 1.0 / static_cast<double>(w.size()));
    return w;
  }
  const double lse = log_sum_exp(log_w);
  for (std::size_t i = 0; i < w.size(); ++i) {
    w[i] = std::exp(log_w[i] - lse);
  }
  return w;
}

/// Effective sample size 1 / sum(w^2) of normalised weights.
inline double ess(std::span<const double> weights) {
  double sum_sq = 0.0;
  for (double w : weights) {
    sum_sq += w * w;
  }
  return 1.0 / sum_sq;
}

/// Ceiling that ignores representation noise of order 1e-12 relative,
/// e.g. 6 / 0.1 or 100 * sqrt(1).
inline double robust_ceil(double x) {
  const double r = std::round(x);
  if (std::abs(x - r) <= 1e-12 * std::max(1.0, std::abs(x))) {
    return r;
  }
  return std::ceil(x);
}

inline double mean(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) {
    s += x;
  }
  return s / static_cast<double>(v.size());
}

/// Sample variance with denominator n - 1.
inline double sample_variance(std::span<const double> v) {
  const double m = mean(v);
  double s = 0.0;
  for (double x : v) {
    s += (x - m) * (x - m);
  }
  return s / static_cast<double>(v.size() - 1);
}

}  // namespace smc2

#endif  // SMC2_NUMERIC_HPP
