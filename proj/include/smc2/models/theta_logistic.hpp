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

#ifndef SMC2_MODELS_THETA_LOGISTIC_HPP
#define SMC2_MODELS_THETA_LOGISTIC_HPP

#include <array>
#include <cmath>
#include <random>
#include <span>

#include "smc2/densities.hpp"
#include "smc2/model.hpp"

namespace smc2::models {

/// Theta-logistic population model on the log scale.
///
///   x_{t+1} = x_t + beta0 + beta1 exp(beta2 x_t) + gamma eps_t,   x_0 = theta.x0
///   y_t ~ N(a x_t, sigma^2)
///
/// theta = (beta0, beta1, beta2, x0, gamma, sigma, a). The prior on x0 is a
/// half-normal with scale 1000 on exp(x0), carried to x0 with its Jacobian.
struct ThetaLogistic {
  static constexpr std::string_view id = "theta-logistic";
  static constexpr std::size_t state_dim = 1;
  static constexpr std::size_t obs_dim = 1;
  static constexpr std::size_t default_T = 100;
  // Equilibrium near exp(6.9) ~ 1000 individuals.
  static constexpr std::array<double, 7> default_theta{0.3, -0.0095, 0.5, 6.9, 0.1, 0.3, 1.0};

  struct params_type {
    double beta0;
    double beta1;
    double beta2;
    double x0;
    double gamma;
    double sigma;
    double a;
  };

  static constexpr std::array<ParamInfo, 7> kParams{{
      {"beta0", Transform::identity()},
      {"beta1", Transform::identity()},
      {"beta2", Transform::identity()},
      {"x0", Transform::identity()},
      {"gamma", Transform::log()},
      {"sigma", Transform::log()},
      {"a", Transform::identity()},
  }};

  [[nodiscard]] std::span<const ParamInfo> parameters() const { return kParams; }

  [[nodiscard]] params_type unpack(std::span<const double> theta) const {
    return {theta[0], theta[1], theta[2], theta[3], theta[4], theta[5], theta[6]};
  }

  [[nodiscard]] double log_prior(std::span<const double> theta) const {
    if (theta[4] <= 0.0 || theta[5] <= 0.0) {
      return kNegInf;
    }
    return density::normal(theta[0], 0.0, 1.0) + density::normal(theta[1], 0.0, 1.0) +
           density::normal(theta[2], 0.0, 1.0) + density::half_normal(std::exp(theta[3]), 1000.0) + theta[3] +
           density::exponential(theta[4], 1.0) + density::exponential(theta[5], 1.0) +
           density::normal(theta[6], 1.0, 0.5);
  }

  void sample_prior(std::span<double> theta, Rng& rng) const {
    theta[0] = standard_normal(rng);
    theta[1] = standard_normal(rng);
    theta[2] = standard_normal(rng);
    theta[3] = std::log(std::abs(1000.0 * standard_normal(rng)));
    theta[4] = std::exponential_distribution<double>{1.0}(rng);
    theta[5] = std::exponential_distribution<double>{1.0}(rng);
    theta[6] = 1.0 + 0.5 * standard_normal(rng);
  }

  void sample_initial(const params_type& p, std::span<double> x, Rng& rng) const {
    const std::array<double, 1> start{p.x0};
    sample_transition(p, start, x, rng);
  }

  void sample_transition(const params_type& p, std::span<const double> prev, std::span<double> next,
                         Rng& rng) const {
    next[0] = prev[0] + p.beta0 + p.beta1 * std::exp(p.beta2 * prev[0]) + p.gamma * standard_normal(rng);
  }

  void sample_observation(const params_type& p, std::span<const double> x, std::span<double> y, Rng& rng) const {
    y[0] = p.a * x[0] + p.sigma * standard_normal(rng);
  }

  [[nodiscard]] double log_obs_density(const params_type& p, std::span<const double> x,
                                       std::span<const double> y) const {
    if (!std::isfinite(x[0])) {
      return kNegInf;
    }
    return density::normal(y[0], p.a * x[0], p.sigma);
  }
};

}  // namespace smc2::models

#endif  // SMC2_MODELS_THETA_LOGISTIC_HPP
