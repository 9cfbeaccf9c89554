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

#ifndef SMC2_ADAPTATION_HPP
#define SMC2_ADAPTATION_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "smc2/ensemble.hpp"
#include "smc2/mixture.hpp"
#include "smc2/model.hpp"
#include "smc2/numeric.hpp"
#include "smc2/particle_filter.hpp"

namespace smc2 {

/// How a new number of state particles is proposed. `fixed` keeps Nx and
/// only adapts the number of sweeps (the gold-standard configuration).
enum class Stage2 { fixed, double_nx, rescale_var, rescale_std, novel_var, novel_esjd };

/// How the state-particle sets are exchanged once Nx changes.
enum class Stage3 { reweight, reinit, replace };

enum class Rounding { ceil, ceil_to_10 };

enum class Trigger { none, low_esjd, high_esjd };

inline std::string_view to_string(Stage2 s) {
  switch (s) {
    case Stage2::fixed:
      return "fixed";
    case Stage2::double_nx:
      return "double";
    case Stage2::rescale_var:
      return "rescale_var";
    case Stage2::rescale_std:
      return "rescale_std";
    case Stage2::novel_var:
      return "novel_var";
    case Stage2::novel_esjd:
      return "novel_esjd";
  }
  return "?";
}

inline std::string_view to_string(Stage3 s) {
  switch (s) {
    case Stage3::reweight:
      return "reweight";
    case Stage3::reinit:
      return "reinit";
    case Stage3::replace:
      return "replace";
  }
  return "?";
}

inline std::string_view to_string(Trigger t) {
  switch (t) {
    case Trigger::none:
      return "none";
    case Trigger::low_esjd:
      return "low_esjd";
    case Trigger::high_esjd:
      return "high_esjd";
  }
  return "?";
}

namespace detail {
inline std::string canonical_name(std::string_view s) {
  std::string out{s};
  std::replace(out.begin(), out.end(), '-', '_');
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}
}  // namespace detail

inline std::optional<Stage2> parse_stage2(std::string_view s) {
  const std::string c = detail::canonical_name(s);
  if (c == "fixed" || c == "gold_standard") return Stage2::fixed;
  if (c == "double") return Stage2::double_nx;
  if (c == "rescale_var") return Stage2::rescale_var;
  if (c == "rescale_std") return Stage2::rescale_std;
  if (c == "novel_var") return Stage2::novel_var;
  if (c == "novel_esjd") return Stage2::novel_esjd;
  return std::nullopt;
}

inline std::optional<Stage3> parse_stage3(std::string_view s) {
  const std::string c = detail::canonical_name(s);
  if (c == "reweight") return Stage3::reweight;
  if (c == "reinit") return Stage3::reinit;
  if (c == "replace") return Stage3::replace;
  return std::nullopt;
}

inline std::optional<Rounding> parse_rounding(std::string_view s) {
  const std::string c = detail::canonical_name(s);
  if (c == "ceil") return Rounding::ceil;
  if (c == "ceil_to_10") return Rounding::ceil_to_10;
  return std::nullopt;
}

struct AdaptPolicy {
  Stage2 stage2 = Stage2::novel_esjd;
  Stage3 stage3 = Stage3::replace;
  double esjd_target = 6.0;
  std::size_t k = 100;
  std::size_t nx_min = 1;
  std::size_t nx_max = std::numeric_limits<std::size_t>::max();
  double var_target_base = 1.0;
  double var_min_base = 0.95 * 0.95;
  double var_max_base = 1.05 * 1.05;
  double g_floor = 0.6;
  double upper_trigger_factor = 2.0;
  Rounding rounding = Rounding::ceil;
  std::size_t r_cap = 100;
  double sigma2_cap = 1e4;  // stands in for an infinite variance estimate
  std::size_t mixture_components = 3;
  std::size_t max_restarts = 20;

  void validate() const {
    if (nx_min < 1) throw std::invalid_argument("nx_min must be at least 1");
    if (nx_max < nx_min) throw std::invalid_argument("nx_max must be at least nx_min");
    if (!(esjd_target > 0.0)) throw std::invalid_argument("esjd_target must be positive");
    if (k < 2) throw std::invalid_argument("k must be at least 2");
    if (r_cap < 1) throw std::invalid_argument("r_cap must be at least 1");
    if (!(var_min_base < var_target_base && var_target_base < var_max_base)) {
      throw std::invalid_argument("variance band must satisfy min < target < max");
    }
    if (stage2 == Stage2::novel_esjd && stage3 == Stage3::reinit) {
      throw std::invalid_argument("novel_esjd scores candidates in place and cannot be combined with reinit");
    }
  }
};

/// Stage 1: ESJD below target, or (except for double and reinit) above
/// `upper_trigger_factor` times the target.
inline Trigger adaptation_trigger(double esjd_prev, const AdaptPolicy& policy) {
  if (esjd_prev < policy.esjd_target) {
    return Trigger::low_esjd;
  }
  const bool can_decrease = policy.stage2 != Stage2::double_nx && policy.stage3 != Stage3::reinit;
  if (can_decrease && esjd_prev > policy.upper_trigger_factor * policy.esjd_target) {
    return Trigger::high_esjd;
  }
  return Trigger::none;
}

inline bool should_adapt(double esjd_prev, const AdaptPolicy& policy) {
  return adaptation_trigger(esjd_prev, policy) != Trigger::none;
}

/// G: 1 under data annealing, 1 / max(g_floor^2, g^2) under tempering.
inline double variance_scale(Flavor flavor, double g, const AdaptPolicy& policy) {
  if (flavor == Flavor::data_annealing) {
    return 1.0;
  }
  return 1.0 / std::max(policy.g_floor * policy.g_floor, g * g);
}

/// ceil(6 / 2.5) = 3 sweeps etc., capped at `r_cap`; a zero ESJD hits the cap.
inline std::size_t sweeps_for_target(double esjd_single, double esjd_target, std::size_t r_cap) {
  if (!(esjd_single > 0.0)) {
    return r_cap;
  }
  const double r = robust_ceil(esjd_target / esjd_single);
  if (r >= static_cast<double>(r_cap)) {
    return r_cap;
  }
  return std::max<std::size_t>(1, static_cast<std::size_t>(r));
}

/// Stage 2 candidate set, sorted ascending and clamped to [nx_min, nx_max].
///
/// `G` is `variance_scale(...)`. Single-valued strategies return one entry.
inline std::vector<std::size_t> candidates_stage2(std::size_t nx, double sigma2_hat, double G,
                                                  const AdaptPolicy& policy) {
  const double s2 = std::isfinite(sigma2_hat) ? sigma2_hat : policy.sigma2_cap;
  const double n = static_cast<double>(nx);
  auto finish = [&](double raw) {
    double v = policy.rounding == Rounding::ceil ? robust_ceil(raw) : 10.0 * robust_ceil(raw / 10.0);
    v = std::clamp(v, static_cast<double>(policy.nx_min), static_cast<double>(policy.nx_max));
    return static_cast<std::size_t>(v);
  };
  std::vector<std::size_t> out;
  switch (policy.stage2) {
    case Stage2::fixed:
      out = {nx};
      break;
    case Stage2::double_nx:
      out = {finish(2.0 * n)};
      break;
    case Stage2::rescale_var:
      out = {finish(s2 * n)};
      break;
    case Stage2::rescale_std:
      out = {finish(std::sqrt(s2) * n)};
      break;
    case Stage2::novel_var: {
      if (policy.var_min_base * G < s2 && s2 < policy.var_max_base * G) {
        out = {finish(n)};
        break;
      }
      const double s = s2 / (policy.var_target_base * G);
      out = {finish(n * std::sqrt(s)), finish(n * std::pow(s, 0.75)), finish(n * s)};
      break;
    }
    case Stage2::novel_esjd: {
      const double s = s2 / G;
      out = {finish(n), finish(2.0 * n), finish(n * std::sqrt(s)), finish(n * s)};
      break;
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

struct VarEstimate {
  std::size_t nx = 0;
  double sigma2_hat = 0.0;  // +inf if any replicate degenerated
  std::vector<double> theta_bar;
  std::uint64_t ll_count = 0;
};

/// Sample variance (denominator k - 1) of k independent log-likelihood
/// estimates at `theta_bar` using y_1..y_{t_end}.
template <StateSpaceModel M>
VarEstimate estimate_loglik_variance(const M& model, const Dataset& data, std::size_t t_end,
                                     std::span<const double> theta_bar, std::size_t nx, std::size_t k, Rng& rng) {
  if (k < 2) {
    throw std::invalid_argument("estimate_loglik_variance needs k >= 2");
  }
  VarEstimate out{nx, 0.0, {theta_bar.begin(), theta_bar.end()}, 0};
  const auto params = model.unpack(theta_bar);
  std::vector<double> ll(k);
  bool degenerate = false;
  for (std::size_t i = 0; i < k; ++i) {
    Rng replicate{rng()};
    const PfOutput pf = run_filter(model, params, data, t_end, nx, replicate);
    ll[i] = pf.log_lik;
    out.ll_count += pf.ll_count;
    degenerate = degenerate || !std::isfinite(pf.log_lik);
  }
  out.sigma2_hat = degenerate ? kInf : sample_variance(ll);
  return out;
}

/// Weighted mean of the parameter particles on their natural scale. Every
/// prior support here is a box, so the mean stays inside it.
template <StateSpaceModel M>
std::vector<double> ensemble_mean_theta(const M& model, const Ensemble& e) {
  const std::vector<double> w = e.weights();
  std::vector<double> mean(param_dim(model), 0.0);
  for (std::size_t n = 0; n < e.size(); ++n) {
    for (std::size_t i = 0; i < mean.size(); ++i) {
      mean[i] += w[n] * e.particles[n].theta[i];
    }
  }
  return mean;
}

namespace detail {

/// Re-centres log-weights; resets to uniform if every weight vanished.
inline void recentre_log_weights(std::vector<double>& log_w) {
  const double max = *std::max_element(log_w.begin(), log_w.end());
  if (!std::isfinite(max)) {
    std::fill(log_w.begin(), log_w.end(), 0.0);
    return;
  }
  for (double& x : log_w) {
    x -= max;
  }
}

template <StateSpaceModel M>
std::vector<double> refresh_clouds(Ensemble& e, const M& model, const Dataset& data, std::size_t nx_new) {
  const std::size_t t_end = e.t_end(data);
  const std::uint64_t epoch = e.streams.next_epoch();
  std::vector<double> old_ll(e.size());
  for (std::size_t n = 0; n < e.size(); ++n) {
    ThetaParticle& p = e.particles[n];
    old_ll[n] = p.log_lik();
    Rng rng = e.streams.stream(epoch, n);
    PfOutput pf = run_filter(model, p.theta, data, t_end, nx_new, rng);
    p.cloud = std::move(pf.cloud);
    e.tll += pf.ll_count;
  }
  e.nx = nx_new;
  return old_ll;
}

}  // namespace detail

/// REPLACE: fresh filters with `nx_new` particles for every theta; the
/// parameter weights are not touched (the incremental weight is one).
template <StateSpaceModel M>
void replace_clouds(Ensemble& e, const M& model, const Dataset& data, std::size_t nx_new) {
  detail::refresh_clouds(e, model, data, nx_new);
}

/// Incremental log-weight of REWEIGHT: exponent * (log p_new - log p_old).
/// An old estimate of -inf contributes nothing.
inline double reweight_increment(double old_ll, double new_ll, double exponent) {
  if (old_ll == kNegInf) {
    return 0.0;
  }
  return tempered(exponent, new_ll - old_ll);
}

/// REWEIGHT: like REPLACE, then w *= (p_new / p_old)^g (g = 1 under data annealing).
template <StateSpaceModel M>
void reweight_clouds(Ensemble& e, const M& model, const Dataset& data, std::size_t nx_new) {
  const std::vector<double> old_ll = detail::refresh_clouds(e, model, data, nx_new);
  const double exponent = e.temperature();
  for (std::size_t n = 0; n < e.size(); ++n) {
    e.log_weights[n] += reweight_increment(old_ll[n], e.particles[n].log_lik(), exponent);
  }
  detail::recentre_log_weights(e.log_weights);
}

/// REINIT: fits a Gaussian mixture Q to the current unconstrained sample and
/// restarts from stage zero with `nx_new` state particles.
///
/// Under tempering the restarted sequence is Q^(1-g) [p(theta) p_hat]^g from
/// g = 0 with draws from Q. Under data annealing the draws from Q are
/// importance-weighted by p(theta) / Q and the observations re-annealed from d = 0.
template <StateSpaceModel M>
void reinit_smc2(Ensemble& e, const M& model, const Dataset& data, std::size_t nx_new, std::size_t components,
                 Rng& rng) {
  std::vector<std::vector<double>> u;
  u.reserve(e.size());
  for (const ThetaParticle& p : e.particles) {
    u.push_back(to_unconstrained(model, p.theta));
  }
  GaussianMixture q = GaussianMixture::fit(u, e.weights(), components, rng);

  const std::size_t n_theta = e.size();
  const std::uint64_t epoch = e.streams.next_epoch();
  e.d = 0;
  e.g = e.flavor == Flavor::density_tempering ? 0.0 : 1.0;
  e.nx = nx_new;
  for (std::size_t n = 0; n < n_theta; ++n) {
    Rng stream = e.streams.stream(epoch, n);
    ThetaParticle& p = e.particles[n];
    std::vector<double> draw;
    double lp = kNegInf;
    // Draws outside the prior support would carry zero target mass.
    for (int attempt = 0; attempt < 1000 && lp == kNegInf; ++attempt) {
      draw = q.sample(stream);
      lp = log_prior_unconstrained(model, draw);
    }
    if (lp == kNegInf) {
      throw std::runtime_error("reinit: the fitted mixture places no mass inside the prior support");
    }
    p.theta = from_unconstrained(model, draw);
    p.log_prior = lp;
    p.log_reference = q.log_density(draw);
    if (e.flavor == Flavor::density_tempering) {
      PfOutput pf = run_filter(model, p.theta, data, data.size(), nx_new, stream);
      p.cloud = std::move(pf.cloud);
      e.tll += pf.ll_count;
      e.log_weights[n] = 0.0;
    } else {
      p.cloud = StateCloud{nx_new, M::state_dim};
      e.log_weights[n] = p.log_prior - p.log_reference;
    }
  }
  detail::recentre_log_weights(e.log_weights);
  e.reference = std::move(q);
  ++e.restarts;
}

}  // namespace smc2

#endif  // SMC2_ADAPTATION_HPP
