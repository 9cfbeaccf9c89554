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

#ifndef SMC2_TESTS_TEST_SUPPORT_HPP
#define SMC2_TESTS_TEST_SUPPORT_HPP

#include <array>
#include <cmath>
#include <span>
#include <vector>

#include "smc2/densities.hpp"
#include "smc2/model.hpp"

namespace smc2::testing {

/// Observation density fixed at log_c whatever the state; one parameter with
/// a standard normal prior.
struct ConstantModel {
  static constexpr std::string_view id = "constant";
  static constexpr std::size_t state_dim = 1;
  static constexpr std::size_t obs_dim = 1;
  static constexpr std::array<ParamInfo, 1> kParams{{{"mu", Transform::identity()}}};

  double log_c = std::log(0.25);

  struct params_type {
    double mu;
  };

  [[nodiscard]] std::span<const ParamInfo> parameters() const { return kParams; }
  [[nodiscard]] params_type unpack(std::span<const double> theta) const { return {theta[0]}; }
  [[nodiscard]] double log_prior(std::span<const double> theta) const { return density::normal(theta[0], 0.0, 1.0); }
  void sample_prior(std::span<double> theta, Rng& rng) const { theta[0] = standard_normal(rng); }
  void sample_initial(const params_type& p, std::span<double> x, Rng& rng) const {
    x[0] = p.mu + standard_normal(rng);
  }
  void sample_transition(const params_type&, std::span<const double> prev, std::span<double> next, Rng& rng) const {
    next[0] = prev[0] + standard_normal(rng);
  }
  void sample_observation(const params_type&, std::span<const double>, std::span<double> y, Rng& rng) const {
    y[0] = uniform01(rng);
  }
  [[nodiscard]] double log_obs_density(const params_type&, std::span<const double>, std::span<const double>) const {
    return log_c;
  }
};

inline Dataset constant_dataset(std::size_t T) { return Dataset{1, std::vector<double>(T, 0.5), "constant"}; }

/// Upper 0.001 quantile of chi-square with `df` degrees of freedom
/// (Wilson-Hilferty approximation, z = 3.0902).
inline double chi_square_critical_001(double df) {
  const double z = 3.090232306167813;
  const double a = 2.0 / (9.0 * df);
  const double c = 1.0 - a + z * std::sqrt(a);
  return df * c * c * c;
}

inline double chi_square_statistic(std::span<const std::size_t> counts, std::span<const double> probs,
                                   std::size_t total) {
  double stat = 0.0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    const double expected = probs[i] * static_cast<double>(total);
    const double diff = static_cast<double>(counts[i]) - expected;
    stat += diff * diff / expected;
  }
  return stat;
}

}  // namespace smc2::testing

#endif  // SMC2_TESTS_TEST_SUPPORT_HPP
