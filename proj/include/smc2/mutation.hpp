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

#ifndef SMC2_MUTATION_HPP
#define SMC2_MUTATION_HPP

#include <algorithm>
#include <cstdint>
#include <optional>
#include <vector>

#include "smc2/adaptation.hpp"
#include "smc2/ensemble.hpp"
#include "smc2/model.hpp"
#include "smc2/pmmh.hpp"

namespace smc2 {

struct MutationResult {
  std::size_t R = 0;     // sweeps performed, scoring sweep included
  double esjd = 0.0;     // sum over sweeps of the per-sweep ESJD
  bool restarted = false;
};

namespace detail {

template <StateSpaceModel M>
void exchange_clouds(Ensemble& e, const M& model, const Dataset& data, std::size_t nx_new, Stage3 scheme) {
  if (scheme == Stage3::reweight) {
    reweight_clouds(e, model, data, nx_new);
  } else {
    replace_clouds(e, model, data, nx_new);
  }
}

inline AdaptationEvent start_event(const Ensemble& e, Trigger trigger) {
  AdaptationEvent ev;
  ev.d = e.d;
  ev.g = e.g;
  ev.trigger = std::string(to_string(trigger));
  ev.nx_before = e.nx;
  return ev;
}

/// Stage 2 for every strategy but novel-esjd; returns the chosen Nx.
template <StateSpaceModel M>
std::size_t select_nx(Ensemble& e, const M& model, const Dataset& data, const AdaptPolicy& policy,
                      AdaptationEvent& ev) {
  if (policy.stage2 == Stage2::fixed) {
    ev.candidates = {e.nx};
    return e.nx;
  }
  const double G = variance_scale(e.flavor, e.g, policy);
  if (policy.stage2 == Stage2::double_nx) {
    ev.candidates = candidates_stage2(e.nx, 1.0, G, policy);
    return ev.candidates.front();
  }
  const std::size_t t_end = e.t_end(data);
  const std::vector<double> theta_bar = ensemble_mean_theta(model, e);
  Rng rng = e.streams.stream(e.streams.next_epoch(), kCoordinatorStream);
  const VarEstimate v = estimate_loglik_variance(model, data, t_end, theta_bar, e.nx, policy.k, rng);
  e.tll += v.ll_count;
  ev.sigma2_hat = v.sigma2_hat;
  ev.candidates = candidates_stage2(e.nx, v.sigma2_hat, G, policy);
  if (policy.stage2 != Stage2::novel_var || ev.candidates.size() == 1) {
    return ev.candidates.back();
  }
  // Highest variance still within the upper band; the largest candidate otherwise.
  const double upper = policy.var_max_base * G;
  std::size_t chosen = ev.candidates.back();
  double best = -1.0;
  for (std::size_t c : ev.candidates) {
    const VarEstimate vc = estimate_loglik_variance(model, data, t_end, theta_bar, c, policy.k, rng);
    e.tll += vc.ll_count;
    ev.scores.push_back(vc.sigma2_hat);
    if (vc.sigma2_hat <= upper && vc.sigma2_hat > best) {
      best = vc.sigma2_hat;
      chosen = c;
    }
  }
  return chosen;
}

template <StateSpaceModel M>
double remaining_sweeps(Ensemble& e, const M& model, const Dataset& data, const ProposalSpec& proposal,
                        std::size_t R) {
  double esjd = 0.0;
  for (std::size_t r = 1; r < R; ++r) {
    esjd += mutation_sweep(e, model, data, proposal).esjd;
  }
  return esjd;
}

}  // namespace detail

enum class ScanStep { next, revert, keep };

/// Early-stopping rule of the novel-esjd scan, on costs Nx * R (score 1 / cost):
/// a worse score reverts to the previous candidate, a tie keeps the current one.
inline ScanStep esjd_scan_step(std::size_t cost_prev, std::size_t cost) {
  if (cost > cost_prev) return ScanStep::revert;
  if (cost == cost_prev) return ScanStep::keep;
  return ScanStep::next;
}

/// novel-esjd: candidates are scored in ascending order by 1 / (Nx * R) where R
/// follows from one sweep at that Nx. The scan stops at the first candidate that
/// scores worse (reverting to its predecessor) or ties (keeping it). The
/// winning candidate's scoring sweep counts as its first sweep.
template <StateSpaceModel M>
MutationResult adaptive_mutation_esjd(Ensemble& e, const M& model, const Dataset& data, const AdaptPolicy& policy,
                                      const ProposalSpec& proposal) {
  MutationResult out;
  const Trigger trigger = adaptation_trigger(e.esjd_prev, policy);
  if (trigger == Trigger::none) {
    out.R = e.r_prev;
    out.esjd = mutation_sweep(e, model, data, proposal).esjd;
    out.esjd += detail::remaining_sweeps(e, model, data, proposal, out.R);
    e.esjd_prev = out.esjd;
    return out;
  }

  AdaptationEvent ev = detail::start_event(e, trigger);
  const std::size_t t_end = e.t_end(data);
  const std::vector<double> theta_bar = ensemble_mean_theta(model, e);
  Rng rng = e.streams.stream(e.streams.next_epoch(), kCoordinatorStream);
  const VarEstimate v = estimate_loglik_variance(model, data, t_end, theta_bar, e.nx, policy.k, rng);
  e.tll += v.ll_count;
  ev.sigma2_hat = v.sigma2_hat;
  ev.candidates = candidates_stage2(e.nx, v.sigma2_hat, variance_scale(e.flavor, e.g, policy), policy);

  std::vector<std::size_t> sweeps;
  std::vector<double> esjd;
  std::size_t winner = ev.candidates.size() - 1;
  for (std::size_t m = 0; m < ev.candidates.size(); ++m) {
    const std::size_t c = ev.candidates[m];
    if (c != e.nx) {
      detail::exchange_clouds(e, model, data, c, policy.stage3);
    }
    esjd.push_back(mutation_sweep(e, model, data, proposal).esjd);
    sweeps.push_back(sweeps_for_target(esjd.back(), policy.esjd_target, policy.r_cap));
    ev.scores.push_back(1.0 / static_cast<double>(c * sweeps.back()));
    if (m == 0) {
      continue;
    }
    // Costs are compared exactly rather than through floating-point reciprocals.
    const ScanStep step = esjd_scan_step(ev.candidates[m - 1] * sweeps[m - 1], c * sweeps[m]);
    if (step == ScanStep::revert) {
      winner = m - 1;
      detail::exchange_clouds(e, model, data, ev.candidates[winner], policy.stage3);
      break;
    }
    if (step == ScanStep::keep) {
      winner = m;
      break;
    }
  }

  out.R = sweeps[winner];
  out.esjd = esjd[winner];
  out.esjd += detail::remaining_sweeps(e, model, data, proposal, out.R);
  e.esjd_prev = out.esjd;
  e.r_prev = out.R;
  ev.nx_after = e.nx;
  ev.R = out.R;
  e.events.push_back(std::move(ev));
  return out;
}

/// One mutation step with the three-stage adaptation of Nx and R.
///
/// `proposal` is frozen for the whole step. With reinit the population is
/// restarted instead of mutated; the caller resumes from stage zero.
template <StateSpaceModel M>
MutationResult adaptive_mutation(Ensemble& e, const M& model, const Dataset& data, const AdaptPolicy& policy,
                                 const ProposalSpec& proposal) {
  if (policy.stage2 == Stage2::novel_esjd) {
    return adaptive_mutation_esjd(e, model, data, policy, proposal);
  }
  MutationResult out;
  const Trigger trigger = adaptation_trigger(e.esjd_prev, policy);
  std::optional<AdaptationEvent> ev;
  if (trigger != Trigger::none) {
    ev = detail::start_event(e, trigger);
    std::size_t nx_new = detail::select_nx(e, model, data, policy, *ev);
    if (policy.stage3 == Stage3::reinit) {
      // Restarts only ever increase Nx, and there is a cap on how often.
      nx_new = std::max(nx_new, e.nx);
      if (nx_new > e.nx && e.restarts < policy.max_restarts) {
        Rng rng = e.streams.stream(e.streams.next_epoch(), kCoordinatorStream);
        reinit_smc2(e, model, data, nx_new, policy.mixture_components, rng);
        ev->nx_after = e.nx;
        ev->restarted = true;
        e.events.push_back(std::move(*ev));
        e.esjd_prev = 0.0;
        e.r_prev = 1;
        out.restarted = true;
        return out;
      }
    } else if (nx_new != e.nx) {
      detail::exchange_clouds(e, model, data, nx_new, policy.stage3);
    }
  }

  const double first = mutation_sweep(e, model, data, proposal).esjd;
  out.R = trigger != Trigger::none ? sweeps_for_target(first, policy.esjd_target, policy.r_cap) : e.r_prev;
  out.esjd = first + detail::remaining_sweeps(e, model, data, proposal, out.R);
  e.esjd_prev = out.esjd;
  e.r_prev = out.R;
  if (ev) {
    ev->nx_after = e.nx;
    ev->R = out.R;
    e.events.push_back(std::move(*ev));
  }
  return out;
}

}  // namespace smc2

#endif  // SMC2_MUTATION_HPP
