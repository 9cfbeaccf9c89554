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

#ifndef SMC2_SMC2_HPP
#define SMC2_SMC2_HPP

#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

#include "smc2/adaptation.hpp"
#include "smc2/dataset.hpp"
#include "smc2/ensemble.hpp"
#include "smc2/model.hpp"
#include "smc2/mutation.hpp"
#include "smc2/numeric.hpp"
#include "smc2/particle_filter.hpp"
#include "smc2/pmmh.hpp"
#include "smc2/random.hpp"

namespace smc2 {

/// Thrown for inputs that make a run impossible to configure.
class config_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct SmcConfig {
  Flavor flavor = Flavor::density_tempering;
  std::size_t n_theta = 1000;
  std::size_t nx0 = 10;
  std::uint64_t seed = 0;
  AdaptPolicy policy{};
  double theta_ess_fraction = 0.6;
  bool record_wall_time = false;
  std::function<void(const StageRecord&)> on_stage;  // optional progress hook
};

/// Stage zero: theta from the prior and uniform weights. Under tempering each
/// particle also gets a full-data filter so later stages have a baseline p_hat.
template <StateSpaceModel M>
Ensemble init_ensemble(const M& model, const Dataset& data, std::size_t n_theta, std::size_t nx0, Flavor flavor,
                       std::uint64_t seed) {
  if (n_theta == 0) throw config_error("n_theta must be positive");
  if (nx0 == 0) throw config_error("nx0 must be positive");
  Ensemble e;
  e.flavor = flavor;
  e.nx = nx0;
  e.g = flavor == Flavor::density_tempering ? 0.0 : 1.0;
  e.streams = StreamFactory{seed};
  e.particles.resize(n_theta);
  e.log_weights.assign(n_theta, 0.0);
  const std::uint64_t epoch = e.streams.next_epoch();
  for (std::size_t n = 0; n < n_theta; ++n) {
    Rng rng = e.streams.stream(epoch, n);
    ThetaParticle& p = e.particles[n];
    p.log_prior = kNegInf;
    for (int attempt = 0; attempt < 1000 && p.log_prior == kNegInf; ++attempt) {
      p.theta = sample_prior(model, rng);
      if (in_support(model, p.theta)) {
        p.log_prior = log_prior_unconstrained(model, to_unconstrained(model, p.theta));
      }
    }
    if (p.log_prior == kNegInf) {
      throw config_error("could not draw a parameter inside the prior support");
    }
    if (flavor == Flavor::density_tempering) {
      PfOutput pf = run_filter(model, p.theta, data, data.size(), nx0, rng);
      p.cloud = std::move(pf.cloud);
      e.tll += pf.ll_count;
    } else {
      p.cloud = StateCloud{nx0, M::state_dim};
    }
  }
  return e;
}

/// log w += (g_new - g) * slope, then g = g_new.
inline void reweight_dt(Ensemble& e, double g_new) {
  const double delta = g_new - e.g;
  if (delta != 0.0) {
    for (std::size_t n = 0; n < e.size(); ++n) {
      e.log_weights[n] += tempered(delta, tempering_slope(e, e.particles[n]));
    }
    detail::recentre_log_weights(e.log_weights);
  }
  e.g = g_new;
}

/// Extends every filter by observation d + 1 and multiplies in the increment.
template <StateSpaceModel M>
void reweight_da(Ensemble& e, const M& model, const Dataset& data) {
  if (e.d >= data.size()) {
    throw std::out_of_range("reweight_da: no observation left");
  }
  const std::span<const double> y = data[e.d];
  const std::uint64_t epoch = e.streams.next_epoch();
  for (std::size_t n = 0; n < e.size(); ++n) {
    ThetaParticle& p = e.particles[n];
    Rng rng = e.streams.stream(epoch, n);
    const double incr = extend_filter(p.cloud, model, model.unpack(p.theta), y, rng);
    e.log_weights[n] += incr;
    e.tll += p.cloud.size();
  }
  detail::recentre_log_weights(e.log_weights);
  ++e.d;
}

/// ESS of the ensemble were it reweighted to temperature g + delta.
inline double ess_after_step(const Ensemble& e, double delta) {
  std::vector<double> lw(e.log_weights);
  for (std::size_t n = 0; n < e.size(); ++n) {
    lw[n] += tempered(delta, tempering_slope(e, e.particles[n]));
  }
  return ess(normalized_weights(lw));
}

/// Largest g in (g_d, 1] keeping the ESS at or above `fraction * n_theta`,
/// by bisection to 1e-6. Falls back to g_d + 0.01 if no step qualifies.
inline double next_temperature(const Ensemble& e, double fraction = 0.6) {
  const double target = fraction * static_cast<double>(e.size());
  if (ess_after_step(e, 1.0 - e.g) >= target) {
    return 1.0;
  }
  double lo = e.g;
  double hi = 1.0;
  for (int it = 0; it < 100 && hi - lo > 1e-6; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (ess_after_step(e, mid - e.g) >= target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  if (lo > e.g) {
    return lo;
  }
  return std::min(1.0, e.g + 0.01);
}

/// Multinomial resampling of parameter particles; clouds are copied.
inline void resample_ensemble(Ensemble& e, Rng& rng) {
  const std::vector<std::size_t> idx = multinomial_resample(e.weights(), e.size(), rng);
  std::vector<ThetaParticle> next;
  next.reserve(e.size());
  for (std::size_t i : idx) {
    next.push_back(e.particles[i]);
  }
  e.particles = std::move(next);
  std::fill(e.log_weights.begin(), e.log_weights.end(), 0.0);
}

namespace detail {

template <StateSpaceModel M>
MutationResult resample_move(Ensemble& e, const M& model, const Dataset& data, const AdaptPolicy& policy) {
  Rng rng = e.streams.coordinator();
  resample_ensemble(e, rng);
  const ProposalSpec proposal = default_proposal(model, e);
  return adaptive_mutation(e, model, data, policy, proposal);
}

}  // namespace detail

/// Runs SMC^2 to the full posterior and returns the final population with its trace.
template <StateSpaceModel M>
Ensemble run_smc2(const M& model, const Dataset& data, const SmcConfig& config) {
  config.policy.validate();
  if (!(config.theta_ess_fraction > 0.0 && config.theta_ess_fraction <= 1.0)) {
    throw config_error("theta_ess_fraction must lie in (0, 1]");
  }
  if (data.dim() != M::obs_dim) {
    throw config_error("dataset dimension does not match the model");
  }
  using clock = std::chrono::steady_clock;
  Ensemble e = init_ensemble(model, data, config.n_theta, config.nx0, config.flavor, config.seed);
  const double ess_target = config.theta_ess_fraction * static_cast<double>(e.size());

  auto finish_stage = [&](clock::time_point start, double ess_before, const MutationResult& m) {
    StageRecord rec{e.d, e.g, e.nx, m.R, m.esjd, ess_before, e.tll, 0.0};
    if (config.record_wall_time) {
      rec.wall_ms = std::chrono::duration<double, std::milli>(clock::now() - start).count();
    }
    e.trace.push_back(rec);
    if (config.on_stage) {
      config.on_stage(rec);
    }
  };

  if (config.flavor == Flavor::density_tempering) {
    while (e.g < 1.0) {
      const auto start = clock::now();
      const double g_new = next_temperature(e, config.theta_ess_fraction);
      reweight_dt(e, g_new);
      ++e.d;
      const double ess_before = e.ess();
      const std::size_t d = e.d;
      const MutationResult m = detail::resample_move(e, model, data, config.policy);
      if (m.restarted) {
        // Record the stage that triggered the restart before resuming from g = 0.
        StageRecord rec{d, g_new, e.nx, 0, 0.0, ess_before, e.tll, 0.0};
        e.trace.push_back(rec);
        if (config.on_stage) config.on_stage(rec);
        continue;
      }
      finish_stage(start, ess_before, m);
    }
  } else {
    while (e.d < data.size()) {
      const auto start = clock::now();
      reweight_da(e, model, data);
      const double ess_before = e.ess();
      MutationResult m{0, 0.0, false};
      if (ess_before < ess_target) {
        const std::size_t d = e.d;
        m = detail::resample_move(e, model, data, config.policy);
        if (m.restarted) {
          StageRecord rec{d, 1.0, e.nx, 0, 0.0, ess_before, e.tll, 0.0};
          e.trace.push_back(rec);
          if (config.on_stage) config.on_stage(rec);
          continue;
        }
      }
      finish_stage(start, ess_before, m);
    }
  }
  return e;
}

}  // namespace smc2

#endif  // SMC2_SMC2_HPP
