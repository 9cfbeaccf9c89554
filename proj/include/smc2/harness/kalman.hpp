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

#ifndef SMC2_HARNESS_KALMAN_HPP
#define SMC2_HARNESS_KALMAN_HPP

#include <cmath>
#include <numbers>
#include <span>
#include <stdexcept>

#include "smc2/dataset.hpp"
#include "smc2/models/brownian_motion.hpp"

namespace smc2::harness {

/// Exact log p(y_1:t_end | theta) for the Brownian-motion model.
inline double kalman_loglik(const models::BrownianMotion::params_type& p, const Dataset& data, std::size_t t_end) {
  if (t_end > data.size()) {
    throw std::out_of_range("kalman_loglik: t_end exceeds the data length");
  }
  const double obs_var = p.sigma * p.sigma;
  const double step_var = p.gamma * p.gamma;
  double m = p.x0;
  double P = 0.0;
  double ll = 0.0;
  for (std::size_t t = 0; t < t_end; ++t) {
    m += p.drift;
    P += step_var;
    const double S = P + obs_var;
    const double resid = data[t][0] - m;
    ll += -0.5 * (std::log(2.0 * std::numbers::pi * S) + resid * resid / S);
    const double K = P / S;
    m += K * resid;
    P *= (1.0 - K);
  }
  return ll;
}

inline double kalman_loglik(std::span<const double> theta, const Dataset& data, std::size_t t_end) {
  return kalman_loglik(models::BrownianMotion{}.unpack(theta), data, t_end);
}

}  // namespace smc2::harness

#endif  // SMC2_HARNESS_KALMAN_HPP
