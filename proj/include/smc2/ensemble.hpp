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

#ifndef SMC2_ENSEMBLE_HPP
#define SMC2_ENSEMBLE_HPP

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "smc2/dataset.hpp"
#include "smc2/mixture.hpp"
#include "smc2/numeric.hpp"
#include "smc2/particle_filter.hpp"
#include "smc2/random.hpp"

namespace smc2 {

enum class Flavor { density_tempering, data_annealing };

/// One parameter particle: theta (constrained scale) with its own filter.
struct ThetaParticle {
  std::vector<double> theta;
  StateCloud cloud;
  double log_prior = 0.0;      // prior of the unconstrained theta, Jacobian included
  double log_reference = 0.0;  // log Q(u) while a re-initialisation mixture is active

  [[nodiscard]] double log_lik() const noexcept { return cloud.log_lik; }
};

struct StageRecord {
  std::size_t d = 0;
  double g = 0.0;
  std::size_t nx = 0;
  std::size_t R = 0;
  double esjd = 0.0;
  double ess = 0.0;  // before resampling
  std::uint64_t tll = 0;
  double wall_ms = 0.0;
};

/// Structured log entry for one triggered adaptation.
struct AdaptationEvent {
  std::size_t d = 0;
  double g = 0.0;
  std::string trigger;  // "low_esjd" or "high_esjd"
  double sigma2_hat = std::nan("");
  std::vector<std::size_t> candidates;
  std::vector<double> scores;  // novel-esjd scores, or variances for novel-var
  std::size_t nx_before = 0;
  std::size_t nx_after = 0;
  std::size_t R = 0;
  bool restarted = false;
};

/// The SMC^2 population and everything the driver carries between stages.
struct Ensemble {
  Flavor flavor = Flavor::density_tempering;
  std::vector<ThetaParticle> particles;
  std::vector<double> log_weights;  // unnormalised, shifted so the largest is zero
  std::size_t d = 0;
  double g = 0.0;  // temperature; stays 1 under data annealing
  std::size_t nx = 0;
  std::uint64_t tll = 0;
  double esjd_prev = 0.0;  // total ESJD of the last mutation step
  std::size_t r_prev = 1;  // sweeps used by the last mutation step
  std::optional<GaussianMixture> reference;
  std::size_t restarts = 0;
  std::vector<StageRecord> trace;
  std::vector<AdaptationEvent> events;
  StreamFactory streams;

  [[nodiscard]] std::size_t size() const noexcept { return particles.size(); }
  [[nodiscard]] std::vector<double> weights() const { return normalized_weights(log_weights); }
  [[nodiscard]] double ess() const { return smc2::ess(weights()); }

  /// Observations the current target conditions on.
  [[nodiscard]] std::size_t t_end(const Dataset& data) const {
    return flavor == Flavor::density_tempering ? data.size() : d;
  }
  [[nodiscard]] double temperature() const noexcept { return flavor == Flavor::density_tempering ? g : 1.0; }
};

/// What a PMMH move must leave invariant.
struct TargetView {
  const Dataset* data = nullptr;
  std::size_t t_end = 0;
  double temperature = 1.0;
  const GaussianMixture* reference = nullptr;
};

inline TargetView target_of(const Ensemble& e, const Dataset& data) {
  return {&data, e.t_end(data), e.temperature(),
          e.flavor == Flavor::density_tempering && e.reference ? &*e.reference : nullptr};
}

/// g * x with the convention 0 * (-inf) = 0.
inline double tempered(double g, double x) { return g == 0.0 ? 0.0 : g * x; }

/// Log of the (unnormalised) tempered target at one particle:
/// log p(u) + g log p_hat, or (1 - g) log Q(u) + g (log p(u) + log p_hat)
/// while a re-initialisation mixture Q is active.
inline double log_target(const TargetView& view, double log_prior, double log_lik, double log_reference) {
  if (log_prior == kNegInf) {
    return kNegInf;
  }
  if (view.reference == nullptr) {
    return log_prior + tempered(view.temperature, log_lik);
  }
  return tempered(1.0 - view.temperature, log_reference) + tempered(view.temperature, log_prior + log_lik);
}

/// d log target / d g for one particle; drives the tempering weights.
inline double tempering_slope(const Ensemble& e, const ThetaParticle& p) {
  if (e.flavor == Flavor::density_tempering && e.reference) {
    return p.log_prior + p.log_lik() - p.log_reference;
  }
  return p.log_lik();
}

}  // namespace smc2

#endif  // SMC2_ENSEMBLE_HPP
