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

#ifndef SMC2_MODELS_RICKER_HPP
#define SMC2_MODELS_RICKER_HPP

#include <array>
#include <cmath>
#include <random>
#include <span>

#include "smc2/densities.hpp"
#include "smc2/model.hpp"

namespace smc2::models {

/// Noisy Ricker map with Poisson counts.
///
///   x_{t+1} = r x_t exp(-x_t + z_{t+1}),   z ~ N(0, sigma^2),   x_0 = 1
///   y_t ~ Poisson(phi x_t)
///
/// theta = (log phi, log r, log sigma) with independent uniform priors, so the
/// parameters are already unconstrained up to the box and use the identity
/// transform; proposals leaving the box are rejected by the prior.
struct Ricker {
  static constexpr std::string_view id = "ricker";
  static constexpr std::size_t state_dim = 1;
  static constexpr std::size_t obs_dim = 1;
  static constexpr std::size_t default_T = 700;
  static constexpr double initial_population = 1.0;
  static constexpr std::array<double, 3> default_theta{2.302585092994046, 3.7999735016195233, -0.5108256237659907};

  struct params_type {
    double phi;
    double r;
    double sigma;
  };

  static constexpr std::array<ParamInfo, 3> kParams{{
      {"log_phi", Transform::identity()},
      {"log_r", Transform::identity()},
      {"log_sigma", Transform::identity()},
  }};

  static constexpr std::array<std::array<double, 2>, 3> kBounds{{{1.61, 3.0}, {2.0, 5.0}, {-1.8, 1.0}}};

  [[nodiscard]] std::span<const ParamInfo> parameters() const { return kParams; }

  [[nodiscard]] params_type unpack(std::span<const double> theta) const {
    return {std::exp(theta[0]), std::exp(theta[1]), std::exp(theta[2])};
  }

  [[nodiscard]] double log_prior(std::span<const double> theta) const {
    double lp = 0.0;
    for (std::size_t i = 0; i < kBounds.size(); ++i) {
      lp += density::uniform(theta[i], kBounds[i][0], kBounds[i][1]);
    }
    return lp;
  }

  void sample_prior(std::span<double> theta, Rng& rng) const {
    for (std::size_t i = 0; i < kBounds.size(); ++i) {
      theta[i] = std::uniform_real_distribution<double>{kBounds[i][0], kBounds[i][1]}(rng);
    }
  }

  void sample_initial(const params_type& p, std::span<double> x, Rng& rng) const {
    const std::array<double, 1> start{initial_population};
    sample_transition(p, start, x, rng);
  }

  void sample_transition(const params_type& p, std::span<const double> prev, std::span<double> next,
                         Rng& rng) const {
    next[0] = p.r * prev[0] * std::exp(-prev[0] + p.sigma * standard_normal(rng));
  }

  void sample_observation(const params_type& p, std::span<const double> x, std::span<double> y, Rng& rng) const {
    const double rate = p.phi * x[0];
    y[0] = rate > 0.0 ? static_cast<double>(std::poisson_distribution<long>{rate}(rng)) : 0.0;
  }

  [[nodiscard]] double log_obs_density(const params_type& p, std::span<const double> x,
                                       std::span<const double> y) const {
    if (!std::isfinite(x[0])) {
      return kNegInf;
    }
    return density::poisson(y[0], p.phi * x[0]);
  }
};

}  // namespace smc2::models

#endif  // SMC2_MODELS_RICKER_HPP
