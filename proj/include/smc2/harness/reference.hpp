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

#ifndef SMC2_HARNESS_REFERENCE_HPP
#define SMC2_HARNESS_REFERENCE_HPP

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <type_traits>
#include <vector>

#include "smc2/dataset.hpp"
#include "smc2/harness/kalman.hpp"
#include "smc2/model.hpp"
#include "smc2/models/brownian_motion.hpp"
#include "smc2/numeric.hpp"
#include "smc2/particle_filter.hpp"
#include "smc2/random.hpp"

namespace smc2::harness {

enum class ReferenceMethod { exact_mcmc, pmmh };

struct ChainSummary {
  std::vector<double> mean;  // per coordinate, post burn-in
  std::vector<double> se;    // batch-means standard error
  double acceptance = 0.0;   // post burn-in
  std::size_t kept = 0;
};

struct ChainOptions {
  std::size_t length = 200000;
  double burn_in_fraction = 0.1;
  std::size_t batches = 50;
  double initial_step = 0.1;
};

/// Batch-means standard error of the mean of `x`.
inline double batch_means_se(std::span<const double> x, std::size_t batches) {
  const std::size_t size = x.size() / batches;
  if (batches < 2 || size == 0) {
    throw std::invalid_argument("batch_means_se: not enough samples for the batches");
  }
  std::vector<double> means(batches);
  for (std::size_t b = 0; b < batches; ++b) {
    means[b] = mean(x.subspan(b * size, size));
  }
  return std::sqrt(sample_variance(means) / static_cast<double>(batches));
}

/// Random-walk Metropolis on R^d where `log_target(u, rng)` may be a noisy
/// unbiased estimate (pseudo-marginal): the current value is never recomputed.
///
/// During burn-in the proposal covariance is re-estimated from the burn-in
/// draws every 500 iterations; it is frozen afterwards. The chain statistics
/// (`function_of_state` applied to each kept state) are then summarised.
inline ChainSummary random_walk_chain(const std::function<double(std::span<const double>, Rng&)>& log_target,
                                      std::vector<double> u0,
                                      const std::function<std::vector<double>(std::span<const double>)>& stat,
                                      const ChainOptions& opt, Rng& rng) {
  if (opt.length == 0) {
    throw std::invalid_argument("reference chain length must be positive");
  }
  const auto dim = static_cast<Eigen::Index>(u0.size());
  const auto burn = static_cast<std::size_t>(std::floor(opt.burn_in_fraction * static_cast<double>(opt.length)));
  const std::size_t kept = opt.length - burn;
  if (kept < opt.batches) {
    throw std::invalid_argument("reference chain too short for the batch count");
  }
  Eigen::MatrixXd chol = opt.initial_step * Eigen::MatrixXd::Identity(dim, dim);
  const double scale = 2.38 / std::sqrt(static_cast<double>(dim));

  std::vector<double> u = std::move(u0);
  double lt = log_target(u, rng);
  if (!std::isfinite(lt)) {
    throw std::invalid_argument("reference chain starts where the target vanishes");
  }
  std::vector<std::vector<double>> burn_draws;
  std::vector<std::vector<double>> stats;
  stats.reserve(kept);
  std::size_t accepted = 0;
  std::vector<double> prop(u.size());
  for (std::size_t it = 0; it < opt.length; ++it) {
    Eigen::VectorXd z(dim);
    for (Eigen::Index i = 0; i < dim; ++i) z[i] = standard_normal(rng);
    const Eigen::VectorXd step = chol * z;
    for (Eigen::Index i = 0; i < dim; ++i) prop[i] = u[i] + step[i];
    const double lt_prop = log_target(prop, rng);
    const bool accept = std::log(uniform01(rng)) < lt_prop - lt;
    if (accept) {
      u = prop;
      lt = lt_prop;
    }
    if (it < burn) {
      burn_draws.push_back(u);
      if ((it + 1) % 500 == 0 && burn_draws.size() >= 1000) {
        Eigen::VectorXd m = Eigen::VectorXd::Zero(dim);
        for (const auto& b : burn_draws) m += Eigen::Map<const Eigen::VectorXd>(b.data(), dim);
        m /= static_cast<double>(burn_draws.size());
        Eigen::MatrixXd c = Eigen::MatrixXd::Zero(dim, dim);
        for (const auto& b : burn_draws) {
          const Eigen::VectorXd diff = Eigen::Map<const Eigen::VectorXd>(b.data(), dim) - m;
          c += diff * diff.transpose();
        }
        c /= static_cast<double>(burn_draws.size() - 1);
        c += 1e-10 * Eigen::MatrixXd::Identity(dim, dim);
        Eigen::LLT<Eigen::MatrixXd> llt(c);
        if (llt.info() == Eigen::Success) {
          chol = scale * Eigen::MatrixXd(llt.matrixL());
        }
      }
    } else {
      accepted += accept ? 1 : 0;
      stats.push_back(stat(u));
    }
  }

  ChainSummary out;
  out.kept = kept;
  out.acceptance = static_cast<double>(accepted) / static_cast<double>(kept);
  const std::size_t k = stats.front().size();
  std::vector<double> column(kept);
  for (std::size_t j = 0; j < k; ++j) {
    for (std::size_t i = 0; i < kept; ++i) column[i] = stats[i][j];
    out.mean.push_back(mean(column));
    out.se.push_back(batch_means_se(column, opt.batches));
  }
  return out;
}

struct ReferencePosterior {
  std::vector<double> mean;                // constrained scale
  std::vector<double> se;
  std::vector<double> mean_unconstrained;
  std::vector<double> se_unconstrained;
  double acceptance = 0.0;
};

/// Long-run posterior means used as ground truth. Brownian motion with
/// `exact_mcmc` uses the Kalman likelihood; otherwise PMMH with `nx` particles.
template <StateSpaceModel M>
ReferencePosterior reference_posterior_mean(const M& model, const Dataset& data, ReferenceMethod method,
                                            std::span<const double> theta_start, const ChainOptions& opt, Rng& rng,
                                            std::size_t nx = 0) {
  if (opt.length == 0) {
    throw std::invalid_argument("reference chain length must be positive");
  }
  std::function<double(std::span<const double>, Rng&)> target;
  if (method == ReferenceMethod::exact_mcmc) {
    if constexpr (std::is_same_v<M, models::BrownianMotion>) {
      target = [&](std::span<const double> u, Rng&) {
        const double lp = log_prior_unconstrained(model, u);
        if (lp == kNegInf) return kNegInf;
        return lp + kalman_loglik(from_unconstrained(model, u), data, data.size());
      };
    } else {
      throw std::invalid_argument("exact reference is only available for the Brownian-motion model");
    }
  } else {
    if (nx == 0) throw std::invalid_argument("pmmh reference needs nx > 0");
    target = [&, nx](std::span<const double> u, Rng& r) {
      const double lp = log_prior_unconstrained(model, u);
      if (lp == kNegInf) return kNegInf;
      return lp + run_filter(model, from_unconstrained(model, u), data, data.size(), nx, r).log_lik;
    };
  }
  const std::size_t dim = param_dim(model);
  auto stat = [&](std::span<const double> u) {
    std::vector<double> s(u.begin(), u.end());
    const std::vector<double> theta = from_unconstrained(model, u);
    s.insert(s.end(), theta.begin(), theta.end());
    return s;
  };
  const ChainSummary c = random_walk_chain(target, to_unconstrained(model, theta_start), stat, opt, rng);
  ReferencePosterior out;
  out.acceptance = c.acceptance;
  out.mean_unconstrained.assign(c.mean.begin(), c.mean.begin() + dim);
  out.se_unconstrained.assign(c.se.begin(), c.se.begin() + dim);
  out.mean.assign(c.mean.begin() + dim, c.mean.end());
  out.se.assign(c.se.begin() + dim, c.se.end());
  return out;
}

}  // namespace smc2::harness

#endif  // SMC2_HARNESS_REFERENCE_HPP
