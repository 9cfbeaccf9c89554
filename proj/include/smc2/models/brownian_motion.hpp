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

#ifndef SMC2_MODELS_BROWNIAN_MOTION_HPP
#define SMC2_MODELS_BROWNIAN_MOTION_HPP

#include <array>
#include <cmath>
#include <span>

#include "smc2/densities.hpp"
#include "smc2/model.hpp"

namespace smc2::models {

/// Brownian motion with drift observed in Gaussian noise.
///
///   x_t = x_{t-1} + beta - gamma^2 / 2 + gamma * eps_t,   x_0 = theta.x0
///   y_t = x_t + sigma * eta_t
///
/// theta = (x0, beta, gamma, sigma). The model is linear-Gaussian, so
/// `harness::kalman_loglik` gives its exact likelihood.
struct BrownianMotion {
  static constexpr std::string_view id = "bm";
  static constexpr std::size_t state_dim = 1;
  static constexpr std::size_t obs_dim = 1;
  static constexpr std::size_t default_T = 100;
  static constexpr std::array<double, 4> default_theta{1.0, 1.2, 1.5, 1.0};

  struct params_type {
    double x0;
    double beta;
    double gamma;
    double sigma;
    double drift;
    double log_sigma;
  };

  static constexpr std::array<ParamInfo, 4> kParams{{
      {"x0", Transform::identity()},
      {"beta", Transform::identity()},
      {"gamma", Transform::log()},
      {"sigma", Transform::log()},
  }};

  [[nodiscard]] std::span<const ParamInfo> parameters() const { return kParams; }

  [[nodiscard]] params_type unpack(std::span<const double> theta) const {
    const double gamma = theta[2];
    return {theta[0], theta[1], gamma, theta[3], theta[1] - 0.5 * gamma * gamma, std::log(theta[3])};
  }

  [[nodiscard]] double log_prior(std::span<const double> theta) const {
    return density::normal(theta[0], 3.0, 5.0) + density::normal(theta[1], 2.0, 5.0) +
           density::half_normal(theta[2], 2.0) + density::half_normal(theta[3], 2.0);
  }

  void sample_prior(std::span<double> theta, Rng& rng) const {
    theta[0] = 3.0 + 5.0 * standard_normal(rng);
    theta[1] = 2.0 + 5.0 * standard_normal(rng);
    theta[2] = std::abs(2.0 * standard_normal(rng));
    theta[3] = std::abs(2.0 * standard_normal(rng));
  }

  void sample_initial(const params_type& p, std::span<double> x, Rng& rng) const {
    x[0] = p.x0 + p.drift + p.gamma * standard_normal(rng);
  }

  void sample_transition(const params_type& p, std::span<const double> prev, std::span<double> next,
                         Rng& rng) const {
    next[0] = prev[0] + p.drift + p.gamma * standard_normal(rng);
  }

  void sample_observation(const params_type& p, std::span<const double> x, std::span<double> y, Rng& rng) const {
    y[0] = x[0] + p.sigma * standard_normal(rng);
  }

  [[nodiscard]] double log_obs_density(const params_type& p, std::span<const double> x,
                                       std::span<const double> y) const {
    return density::normal_log_sd(y[0], x[0], p.sigma, p.log_sigma);
  }
};

}  // namespace smc2::models

#endif  // SMC2_MODELS_BROWNIAN_MOTION_HPP
