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

#ifndef SMC2_TRANSFORM_HPP
#define SMC2_TRANSFORM_HPP

#include <cmath>
#include <stdexcept>

namespace smc2 {

enum class TransformKind { identity, log, logit };

/// Bijection between a parameter's constrained support and the real line.
///
/// Proposals, ensemble means and covariances all live on the unconstrained
/// side; `log_abs_jacobian` is log|d theta / d u| evaluated at `u`.
struct Transform {
  TransformKind kind = TransformKind::identity;
  double lower = 0.0;
  double upper = 1.0;

  static constexpr Transform identity() { return {}; }
  static constexpr Transform log() { return {TransformKind::log, 0.0, 0.0}; }
  static Transform logit(double lower, double upper) {
    if (!(lower < upper)) {
      throw std::invalid_argument("logit transform needs lower < upper");
    }
    return {TransformKind::logit, lower, upper};
  }

  [[nodiscard]] double forward(double theta) const {
    switch (kind) {
      case TransformKind::identity:
        return theta;
      case TransformKind::log:
        return std::log(theta);
      case TransformKind::logit: {
        const double p = (theta - lower) / (upper - lower);
        return std::log(p) - std::log1p(-p);
      }
    }
    return theta;
  }

  [[nodiscard]] double inverse(double u) const {
    switch (kind) {
      case TransformKind::identity:
        return u;
      case TransformKind::log:
        return std::exp(u);
      case TransformKind::logit: {
        const double p = u >= 0.0 ? 1.0 / (1.0 + std::exp(-u)) : std::exp(u) / (1.0 + std::exp(u));
        return lower + (upper - lower) * p;
      }
    }
    return u;
  }

  [[nodiscard]] double log_abs_jacobian(double u) const {
    switch (kind) {
      case TransformKind::identity:
        return 0.0;
      case TransformKind::log:
        return u;
      case TransformKind::logit:
        // log(p (1 - p)) with p = sigmoid(u)
        return std::log(upper - lower) - std::abs(u) - 2.0 * std::log1p(std::exp(-std::abs(u)));
    }
    return 0.0;
  }
};

}  // namespace smc2

#endif  // SMC2_TRANSFORM_HPP
