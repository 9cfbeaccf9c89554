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

#ifndef SMC2_MODEL_HPP
#define SMC2_MODEL_HPP

#include <array>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "smc2/dataset.hpp"
#include "smc2/random.hpp"
#include "smc2/transform.hpp"

namespace smc2 {

struct ParamInfo {
  std::string_view name;
  Transform transform;
};

/// Contract for a state-space model with static parameters theta.
///
/// theta is passed on its natural (constrained) scale. `unpack` turns it into
/// the model's own parameter struct once per filter run; the per-particle
/// calls then only see that struct. Latent states are fixed-width vectors of
/// `state_dim` reals and observations are vectors of `obs_dim` reals.
/// `log_prior` is -inf exactly outside the support.
template <class M>
concept StateSpaceModel =
    requires(const M& m, std::span<const double> theta, std::span<const double> cx, std::span<double> out,
             const typename M::params_type& p, Rng& rng) {
      { M::id } -> std::convertible_to<std::string_view>;
      { M::state_dim } -> std::convertible_to<std::size_t>;
      { M::obs_dim } -> std::convertible_to<std::size_t>;
      { m.parameters() } -> std::convertible_to<std::span<const ParamInfo>>;
      { m.unpack(theta) } -> std::same_as<typename M::params_type>;
      { m.log_prior(theta) } -> std::same_as<double>;
      { m.sample_prior(out, rng) };
      { m.sample_initial(p, out, rng) };
      { m.sample_transition(p, cx, out, rng) };
      { m.sample_observation(p, cx, out, rng) };
      { m.log_obs_density(p, cx, cx) } -> std::same_as<double>;
    };

template <StateSpaceModel M>
std::size_t param_dim(const M& model) {
  return std::span<const ParamInfo>{model.parameters()}.size();
}

template <StateSpaceModel M>
bool in_support(const M& model, std::span<const double> theta) {
  return std::isfinite(model.log_prior(theta));
}

template <StateSpaceModel M>
std::vector<double> to_unconstrained(const M& model, std::span<const double> theta) {
  const std::span<const ParamInfo> info{model.parameters()};
  std::vector<double> u(theta.size());
  for (std::size_t i = 0; i < theta.size(); ++i) {
    u[i] = info[i].transform.forward(theta[i]);
  }
  return u;
}

template <StateSpaceModel M>
std::vector<double> from_unconstrained(const M& model, std::span<const double> u) {
  const std::span<const ParamInfo> info{model.parameters()};
  std::vector<double> theta(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    theta[i] = info[i].transform.inverse(u[i]);
  }
  return theta;
}

/// Prior density of the unconstrained vector u, Jacobian included.
template <StateSpaceModel M>
double log_prior_unconstrained(const M& model, std::span<const double> u) {
  const std::span<const ParamInfo> info{model.parameters()};
  const std::vector<double> theta = from_unconstrained(model, u);
  double lp = model.log_prior(theta);
  if (!std::isfinite(lp)) {
    return lp;
  }
  for (std::size_t i = 0; i < u.size(); ++i) {
    lp += info[i].transform.log_abs_jacobian(u[i]);
  }
  return lp;
}

template <StateSpaceModel M>
std::vector<std::string> parameter_names(const M& model) {
  std::vector<std::string> names;
  for (const ParamInfo& p : std::span<const ParamInfo>{model.parameters()}) {
    names.emplace_back(p.name);
  }
  return names;
}

template <StateSpaceModel M>
std::vector<double> sample_prior(const M& model, Rng& rng) {
  std::vector<double> theta(param_dim(model));
  model.sample_prior(theta, rng);
  return theta;
}

/// Draws y_1..y_T from the generative model; deterministic given `seed`.
template <StateSpaceModel M>
Dataset simulate_dataset(const M& model, std::span<const double> theta, std::size_t T, std::uint64_t seed) {
  if (theta.size() != param_dim(model)) {
    throw std::invalid_argument("theta has the wrong dimension for model " + std::string{M::id});
  }
  if (!in_support(model, theta)) {
    throw std::domain_error("theta lies outside the prior support of model " + std::string{M::id});
  }
  if (T == 0) {
    throw std::invalid_argument("simulate_dataset needs T >= 1");
  }
  Rng rng = make_stream(seed, 0, 0);
  const auto p = model.unpack(theta);
  std::array<double, M::state_dim> x{};
  std::array<double, M::state_dim> next{};
  std::array<double, M::obs_dim> y{};
  std::vector<double> values;
  values.reserve(T * M::obs_dim);
  model.sample_initial(p, x, rng);
  for (std::size_t t = 0; t < T; ++t) {
    if (t > 0) {
      model.sample_transition(p, x, next, rng);
      x = next;
    }
    model.sample_observation(p, x, y, rng);
    values.insert(values.end(), y.begin(), y.end());
  }
  return Dataset{M::obs_dim, std::move(values), std::string{M::id} + " synthetic seed=" + std::to_string(seed)};
}

}  // namespace smc2

#endif  // SMC2_MODEL_HPP
