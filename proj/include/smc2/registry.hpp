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

#ifndef SMC2_REGISTRY_HPP
#define SMC2_REGISTRY_HPP

#include <stdexcept>
#include <string>
#include <string_view>

#include "smc2/models/brownian_motion.hpp"
#include "smc2/models/ricker.hpp"
#include "smc2/models/stochastic_volatility.hpp"
#include "smc2/models/theta_logistic.hpp"

namespace smc2 {

inline constexpr std::string_view kModelIds[] = {
    models::BrownianMotion::id, models::StochasticVolatility::id, models::ThetaLogistic::id, models::Ricker::id};

/// Calls `f(model)` with the model registered under `id`.
template <class F>
decltype(auto) with_model(std::string_view id, F&& f) {
  if (id == models::BrownianMotion::id) return f(models::BrownianMotion{});
  if (id == models::StochasticVolatility::id) return f(models::StochasticVolatility{});
  if (id == models::ThetaLogistic::id) return f(models::ThetaLogistic{});
  if (id == models::Ricker::id) return f(models::Ricker{});
  throw std::invalid_argument("unknown model id '" + std::string(id) + "'");
}

}  // namespace smc2

#endif  // SMC2_REGISTRY_HPP
