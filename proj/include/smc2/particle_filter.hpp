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

#ifndef SMC2_PARTICLE_FILTER_HPP
#define SMC2_PARTICLE_FILTER_HPP

#include <algorithm>
#include <numeric>
#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include "smc2/dataset.hpp"
#include "smc2/model.hpp"
#include "smc2/numeric.hpp"
#include "smc2/random.hpp"

namespace smc2 {

/// Draws `n_out` indices i.i.d. from the categorical law given by `weights`.
///
/// Uses sorted uniforms built from exponential spacings, so the cost is
/// O(n_in + n_out); the returned indices are in non-decreasing order.
inline std::vector<std::size_t> multinomial_resample(std::span<const double> weights, std::size_t n_out, Rng& rng) {
  if (weights.empty()) {
    throw std::invalid_argument("multinomial_resample needs at least one weight");
  }
  std::exponential_distribution<double> exp1{1.0};
  std::vector<double> spacings(n_out + 1);
  double total = 0.0;
  for (double& s : spacings) {
    s = exp1(rng);
    total += s;
  }
  double weight_total = 0.0;
  for (double w : weights) {
    weight_total += w;
  }
  std::size_t last_positive = weights.size() - 1;
  while (last_positive > 0 && weights[last_positive] == 0.0) {
    --last_positive;
  }
  std::vector<std::size_t> out(n_out);
  std::size_t i = 0;
  double cumulative = weights[0] / weight_total;
  double u = 0.0;
  for (std::size_t k = 0; k < n_out; ++k) {
    u += spacings[k] / total;
    while (u > cumulative && i + 1 < weights.size()) {
      ++i;
      cumulative += weights[i] / weight_total;
    }
    // Rounding in `cumulative` must never select a zero-weight entry.
    while (weights[i] == 0.0 && i < last_positive) {
      ++i;
      cumulative += weights[i] / weight_total;
    }
    out[k] = std::min(i, last_positive);
  }
  return out;
}

/// Current-time state particles of one bootstrap filter.
///
/// Only x_t is kept (no ancestry); that is all the bootstrap weights and a
/// one-step extension need. A cloud whose weights all vanished is degenerate
/// and carries log_lik = -inf from then on.
struct StateCloud {
  std::size_t dim = 1;
  std::vector<double> particles;     // nx * dim, row-major
  std::vector<double> norm_weights;  // sums to one
  double log_lik = 0.0;              // log p_hat(y_1:t | theta)
  std::size_t t = 0;                 // observations absorbed
  bool uniform = true;               // every weight exactly 1 / nx
  bool degenerate = false;

  StateCloud() = default;
  StateCloud(std::size_t nx, std::size_t state_dim)
      : dim{state_dim}, particles(nx * state_dim, 0.0), norm_weights(nx, 1.0 / static_cast<double>(nx)) {
    if (nx == 0) {
      throw std::invalid_argument("a state cloud needs at least one particle");
    }
  }

  [[nodiscard]] std::size_t size() const noexcept { return norm_weights.size(); }
  [[nodiscard]] std::span<const double> particle(std::size_t m) const {
    return std::span<const double>{particles}.subspan(m * dim, dim);
  }
  [[nodiscard]] std::span<double> particle(std::size_t m) { return std::span<double>{particles}.subspan(m * dim, dim); }
};

struct PfOutput {
  StateCloud cloud;
  double log_lik = 0.0;
  std::uint64_t ll_count = 0;  // particles x observations evaluated
};

namespace detail {

inline void mark_degenerate(StateCloud& cloud) {
  cloud.degenerate = true;
  cloud.log_lik = kNegInf;
}

}  // namespace detail

/// Advances `cloud` by one observation and returns log p_hat(y_t | y_1:t-1).
///
/// At t = 0 the particles are drawn from the initial law; afterwards they are
/// multinomially resampled only when the ESS drops below nx / 2, then
/// propagated through the transition. Weights are combined in log space.
template <StateSpaceModel M>
double extend_filter(StateCloud& cloud, const M& model, const typename M::params_type& params,
                     std::span<const double> y, Rng& rng) {
  if (cloud.degenerate) {
    ++cloud.t;
    return kNegInf;
  }
  const std::size_t nx = cloud.size();
  std::vector<double> next(cloud.particles.size());
  if (cloud.t == 0) {
    for (std::size_t m = 0; m < nx; ++m) {
      model.sample_initial(params, std::span<double>{next}.subspan(m * cloud.dim, cloud.dim), rng);
    }
  } else {
    std::span<const double> source{cloud.particles};
    std::vector<double> resampled;
    if (!cloud.uniform && ess(cloud.norm_weights) < 0.5 * static_cast<double>(nx)) {
      const std::vector<std::size_t> idx = multinomial_resample(cloud.norm_weights, nx, rng);
      resampled.resize(cloud.particles.size());
      for (std::size_t m = 0; m < nx; ++m) {
        std::copy_n(cloud.particles.begin() + static_cast<std::ptrdiff_t>(idx[m] * cloud.dim), cloud.dim,
                    resampled.begin() + static_cast<std::ptrdiff_t>(m * cloud.dim));
      }
      source = resampled;
      cloud.uniform = true;
    }
    for (std::size_t m = 0; m < nx; ++m) {
      model.sample_transition(params, source.subspan(m * cloud.dim, cloud.dim),
                              std::span<double>{next}.subspan(m * cloud.dim, cloud.dim), rng);
    }
  }
  cloud.particles = std::move(next);

  std::vector<double> log_g(nx);
  double max_lg = kNegInf;
  for (std::size_t m = 0; m < nx; ++m) {
    const double lg = model.log_obs_density(params, cloud.particle(m), y);
    log_g[m] = std::isnan(lg) ? kNegInf : lg;
    if (!cloud.uniform && cloud.norm_weights[m] == 0.0) {
      continue;
    }
    max_lg = std::max(max_lg, log_g[m]);
  }
  ++cloud.t;
  if (!std::isfinite(max_lg)) {
    detail::mark_degenerate(cloud);
    return kNegInf;
  }

  // incr = log sum_m W_{t-1}^m g(y_t | x_t^m); with uniform previous weights
  // the sum is a plain mean, which keeps constant densities exact.
  double sum = 0.0;
  // Now the scaled density g / max g. Dead particles are left out of the max
  // and may exceed it by hundreds of nats, so they are zeroed to avoid 0 * inf.
  for (std::size_t m = 0; m < nx; ++m) {
    const bool dead = !cloud.uniform && cloud.norm_weights[m] == 0.0;
    log_g[m] = dead ? 0.0 : std::exp(log_g[m] - max_lg);
  }
  if (cloud.uniform) {
    for (std::size_t m = 0; m < nx; ++m) {
      sum += log_g[m];
    }
    sum /= static_cast<double>(nx);
  } else {
    for (std::size_t m = 0; m < nx; ++m) {
      sum += cloud.norm_weights[m] * log_g[m];
    }
  }
  const double incr = max_lg + std::log(sum);

  for (std::size_t m = 0; m < nx; ++m) {
    const double prev = cloud.uniform ? 1.0 : cloud.norm_weights[m];
    cloud.norm_weights[m] = prev == 0.0 ? 0.0 : prev * log_g[m];
  }
  bool all_equal = true;
  const double total = std::accumulate(cloud.norm_weights.begin(), cloud.norm_weights.end(), 0.0);
  for (std::size_t m = 0; m < nx; ++m) {
    cloud.norm_weights[m] /= total;
    all_equal = all_equal && cloud.norm_weights[m] == cloud.norm_weights[0];
  }
  if (all_equal) {
    std::fill(cloud.norm_weights.begin(), cloud.norm_weights.end(), 1.0 / static_cast<double>(nx));
  }
  cloud.uniform = all_equal;
  cloud.log_lik += incr;
  return incr;
}

/// Bootstrap particle filter over y_1..y_{t_end} with `nx` particles.
template <StateSpaceModel M>
PfOutput run_filter(const M& model, const typename M::params_type& params, const Dataset& data, std::size_t t_end,
                    std::size_t nx, Rng& rng) {
  if (t_end > data.size()) {
    throw std::invalid_argument("run_filter: t_end exceeds the number of observations");
  }
  if (nx == 0) {
    throw std::invalid_argument("run_filter: nx must be at least 1");
  }
  PfOutput out{StateCloud{nx, M::state_dim}, 0.0, 0};
  for (std::size_t t = 0; t < t_end; ++t) {
    extend_filter(out.cloud, model, params, data[t], rng);
  }
  out.log_lik = out.cloud.log_lik;
  out.ll_count = static_cast<std::uint64_t>(nx) * t_end;
  return out;
}

template <StateSpaceModel M>
PfOutput run_filter(const M& model, std::span<const double> theta, const Dataset& data, std::size_t t_end,
                    std::size_t nx, Rng& rng) {
  return run_filter(model, model.unpack(theta), data, t_end, nx, rng);
}

}  // namespace smc2

#endif  // SMC2_PARTICLE_FILTER_HPP
