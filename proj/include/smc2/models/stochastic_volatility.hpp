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

#ifndef SMC2_MODELS_STOCHASTIC_VOLATILITY_HPP
#define SMC2_MODELS_STOCHASTIC_VOLATILITY_HPP

#include <array>
#include <cmath>
#include <random>
#include <span>

#include "smc2/densities.hpp"
#include "smc2/model.hpp"

namespace smc2::models {

/// One-factor Levy-driven stochastic volatility.
///
/// The latent state is (v_t, z_t). Over each unit interval a Poisson number
/// of exponential jumps e_j arrive at uniform times c_j; z decays at rate
/// lambda and v_t is the integrated volatility of the interval:
///
///   z_t = exp(-lambda) z_{t-1} + sum_j exp(-lambda (t - c_j)) e_j
///   v_t = (z_{t-1} - z_t + sum_j e_j) / lambda
///   y_t ~ N(mu + beta v_t, v_t)
///
/// with z_0 ~ Gamma(xi^2/omega2, rate xi/omega2), k ~ Poisson(lambda xi^2/omega2)
/// and e_j ~ Exponential(rate xi/omega2). theta = (xi, omega2, lambda, beta, mu).
/// The transition density is never evaluated, only simulated.
struct StochasticVolatility {
  static constexpr std::string_view id = "sv1f";
  static constexpr std::size_t state_dim = 2;
  static constexpr std::size_t obs_dim = 1;
  static constexpr std::size_t default_T = 200;
  static constexpr std::array<double, 5> default_theta{4.0, 4.0, 0.5, 5.0, 0.0};

  struct params_type {
    double xi;
    double omega2;
    double lambda;
    double beta;
    double mu;
    double gamma_shape;
    double jump_rate;   // rate of the exponential jump sizes
    double jump_count;  // Poisson mean of the number of jumps per unit time
    double decay;
  };

  static constexpr std::array<ParamInfo, 5> kParams{{
      {"xi", Transform::log()},
      {"omega2", Transform::log()},
      {"lambda", Transform::log()},
      {"beta", Transform::identity()},
      {"mu", Transform::identity()},
  }};

  [[nodiscard]] std::span<const ParamInfo> parameters() const { return kParams; }

  [[nodiscard]] params_type unpack(std::span<const double> theta) const {
    const double xi = theta[0];
    const double omega2 = theta[1];
    const double lambda = theta[2];
    return {xi,
            omega2,
            lambda,
            theta[3],
            theta[4],
            xi * xi / omega2,
            xi / omega2,
            lambda * xi * xi / omega2,
            std::exp(-lambda)};
  }

  [[nodiscard]] double log_prior(std::span<const double> theta) const {
    if (theta[0] <= 0.0 || theta[1] <= 0.0 || theta[2] <= 0.0) {
      return kNegInf;
    }
    const double sd = std::sqrt(2.0);
    return density::exponential(theta[0], 0.2) + density::exponential(theta[1], 0.2) +
           density::exponential(theta[2], 1.0) + density::normal(theta[3], 0.0, sd) +
           density::normal(theta[4], 0.0, sd);
  }

  void sample_prior(std::span<double> theta, Rng& rng) const {
    theta[0] = std::exponential_distribution<double>{0.2}(rng);
    theta[1] = std::exponential_distribution<double>{0.2}(rng);
    theta[2] = std::exponential_distribution<double>{1.0}(rng);
    theta[3] = std::sqrt(2.0) * standard_normal(rng);
    theta[4] = std::sqrt(2.0) * standard_normal(rng);
  }

  /// Draws z_0 from its stationary Gamma law and advances one interval.
  void sample_initial(const params_type& p, std::span<double> x, Rng& rng) const {
    const std::array<double, 2> start{0.0, std::gamma_distribution<double>{p.gamma_shape, 1.0 / p.jump_rate}(rng)};
    sample_transition(p, start, x, rng);
  }

  void sample_transition(const params_type& p, std::span<const double> prev, std::span<double> next,
                         Rng& rng) const {
    const double z_prev = prev[1];
    const auto k = std::poisson_distribution<long>{p.jump_count}(rng);
    std::exponential_distribution<double> jump{p.jump_rate};
    double decayed_jumps = 0.0;
    double total_jumps = 0.0;
    for (long j = 0; j < k; ++j) {
      const double elapsed = uniform01(rng);  // t - c_j
      const double e = jump(rng);
      decayed_jumps += std::exp(-p.lambda * elapsed) * e;
      total_jumps += e;
    }
    const double z = p.decay * z_prev + decayed_jumps;
    next[0] = (z_prev - z + total_jumps) / p.lambda;
    next[1] = z;
  }

  void sample_observation(const params_type& p, std::span<const double> x, std::span<double> y, Rng& rng) const {
    y[0] = p.mu + p.beta * x[0] + std::sqrt(x[0]) * standard_normal(rng);
  }

  [[nodiscard]] double log_obs_density(const params_type& p, std::span<const double> x,
                                       std::span<const double> y) const {
    const double v = x[0];
    if (!(v > 0.0) || !std::isfinite(v)) {
      return kNegInf;
    }
    return density::normal(y[0], p.mu + p.beta * v, std::sqrt(v));
  }
};

}  // namespace smc2::models

#endif  // SMC2_MODELS_STOCHASTIC_VOLATILITY_HPP
