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

#ifndef SMC2_PMMH_HPP
#define SMC2_PMMH_HPP

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <Eigen/LU>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "smc2/ensemble.hpp"
#include "smc2/model.hpp"
#include "smc2/particle_filter.hpp"

namespace smc2 {

/// Gaussian random-walk proposal on the unconstrained scale.
///
/// `cov` is the ensemble covariance (also the Mahalanobis metric of the ESJD)
/// and the walk uses `scale * cov`.
struct ProposalSpec {
  Eigen::MatrixXd cov;
  double scale = 1.0;
  Eigen::MatrixXd chol;     // lower factor of scale * cov
  Eigen::MatrixXd cov_inv;

  /// Adds 1e-9 I (repeatedly, growing tenfold) until `cov` factorises.
  static ProposalSpec from_covariance(Eigen::MatrixXd cov, double scale) {
    const auto dim = cov.rows();
    double jitter = 1e-9;
    Eigen::LLT<Eigen::MatrixXd> llt(cov);
    for (int attempt = 0; llt.info() != Eigen::Success; ++attempt) {
      if (attempt > 20) {
        throw std::domain_error("proposal covariance cannot be made positive definite");
      }
      cov += jitter * Eigen::MatrixXd::Identity(dim, dim);
      jitter *= 10.0;
      llt.compute(cov);
    }
    ProposalSpec spec;
    spec.cov = cov;
    spec.scale = scale;
    spec.chol = std::sqrt(scale) * Eigen::MatrixXd(llt.matrixL());
    spec.cov_inv = llt.solve(Eigen::MatrixXd::Identity(dim, dim));
    return spec;
  }
};

/// Optimal-scaling random walk: weighted ensemble covariance times 2.38^2 / dim.
template <StateSpaceModel M>
ProposalSpec default_proposal(const M& model, const Ensemble& e) {
  std::vector<std::vector<double>> u;
  u.reserve(e.size());
  for (const ThetaParticle& p : e.particles) {
    u.push_back(to_unconstrained(model, p.theta));
  }
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
  weighted_moments(u, e.weights(), mean, cov);
  return ProposalSpec::from_covariance(cov, 2.38 * 2.38 / static_cast<double>(mean.size()));
}

/// (u - u*)^T cov_inv (u - u*) * alpha.
inline double esjd_increment(std::span<const double> u, std::span<const double> u_star, double alpha,
                             const Eigen::MatrixXd& cov_inv) {
  const auto dim = static_cast<Eigen::Index>(u.size());
  const Eigen::VectorXd diff =
      Eigen::Map<const Eigen::VectorXd>(u.data(), dim) - Eigen::Map<const Eigen::VectorXd>(u_star.data(), dim);
  return diff.dot(cov_inv * diff) * alpha;
}

struct TargetTerms {
  double log_prior = 0.0;
  double log_lik = 0.0;
  double log_reference = 0.0;
};

/// log of the Metropolis-Hastings ratio for a symmetric walk on u.
inline double log_acceptance_ratio(const TargetView& view, const TargetTerms& current, const TargetTerms& proposed) {
  return log_target(view, proposed.log_prior, proposed.log_lik, proposed.log_reference) -
         log_target(view, current.log_prior, current.log_lik, current.log_reference);
}

/// min(1, exp(log_ratio)) with NaN mapped to zero.
inline double acceptance_probability(double log_ratio) {
  if (std::isnan(log_ratio)) {
    return 0.0;
  }
  return log_ratio >= 0.0 ? 1.0 : std::exp(log_ratio);
}

struct PmmhStep {
  bool accepted = false;
  double mahalanobis_sq = 0.0;
  double alpha = 0.0;
  std::uint64_t ll_count = 0;
};

/// One particle-marginal Metropolis-Hastings iteration for `particle`.
///
/// On acceptance theta, the filter cloud and the likelihood estimate are
/// replaced together. Proposals outside the prior support, or whose filter
/// degenerates, have alpha = 0.
template <StateSpaceModel M>
PmmhStep pmmh_step(ThetaParticle& particle, const M& model, const TargetView& view, const ProposalSpec& proposal,
                   std::size_t nx, Rng& rng) {
  const std::vector<double> u = to_unconstrained(model, particle.theta);
  const auto dim = static_cast<Eigen::Index>(u.size());
  Eigen::VectorXd z(dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    z[i] = standard_normal(rng);
  }
  const Eigen::VectorXd step = proposal.chol * z;
  std::vector<double> u_star(u);
  for (Eigen::Index i = 0; i < dim; ++i) {
    u_star[static_cast<std::size_t>(i)] += step[i];
  }

  PmmhStep out;
  out.mahalanobis_sq = step.dot(proposal.cov_inv * step);
  const double lp_star = log_prior_unconstrained(model, u_star);
  if (lp_star == kNegInf) {
    return out;
  }
  std::vector<double> theta_star = from_unconstrained(model, u_star);
  PfOutput pf = run_filter(model, theta_star, *view.data, view.t_end, nx, rng);
  out.ll_count = pf.ll_count;
  const double lq_star = view.reference != nullptr ? view.reference->log_density(u_star) : 0.0;

  const TargetTerms current{particle.log_prior, particle.log_lik(), particle.log_reference};
  const TargetTerms proposed{lp_star, pf.log_lik, lq_star};
  const double log_ratio = log_acceptance_ratio(view, current, proposed);
  out.alpha = pf.cloud.degenerate ? 0.0 : acceptance_probability(log_ratio);

  const double log_u = std::log(uniform01(rng));
  if (out.alpha > 0.0 && log_u < log_ratio) {
    particle.theta = std::move(theta_star);
    particle.cloud = std::move(pf.cloud);
    particle.log_prior = lp_star;
    particle.log_reference = lq_star;
    out.accepted = true;
  }
  return out;
}

struct MutationReport {
  std::size_t accepted = 0;
  std::size_t proposed = 0;
  double esjd = 0.0;  // mean over particles of the alpha-weighted squared jump
  std::uint64_t ll_count = 0;
};

/// One PMMH iteration for every particle, each on its own RNG stream.
template <StateSpaceModel M>
MutationReport mutation_sweep(Ensemble& e, const M& model, const Dataset& data, const ProposalSpec& proposal) {
  const TargetView view = target_of(e, data);
  const std::uint64_t epoch = e.streams.next_epoch();
  MutationReport report;
  double esjd_sum = 0.0;
  for (std::size_t n = 0; n < e.size(); ++n) {
    Rng rng = e.streams.stream(epoch, n);
    const PmmhStep s = pmmh_step(e.particles[n], model, view, proposal, e.nx, rng);
    report.accepted += s.accepted ? 1 : 0;
    report.proposed += 1;
    report.ll_count += s.ll_count;
    esjd_sum += s.mahalanobis_sq * s.alpha;
  }
  report.esjd = esjd_sum / static_cast<double>(e.size());
  e.tll += report.ll_count;
  return report;
}

}  // namespace smc2

#endif  // SMC2_PMMH_HPP
