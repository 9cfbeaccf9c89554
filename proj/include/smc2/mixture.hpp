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

#ifndef SMC2_MIXTURE_HPP
#define SMC2_MIXTURE_HPP

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include "smc2/numeric.hpp"
#include "smc2/random.hpp"

namespace smc2 {

/// Weighted mean and covariance (normalised by the weight total) of row-major points.
inline void weighted_moments(const std::vector<std::vector<double>>& points, std::span<const double> weights,
                             Eigen::VectorXd& mean, Eigen::MatrixXd& cov) {
  const auto dim = static_cast<Eigen::Index>(points.front().size());
  mean = Eigen::VectorXd::Zero(dim);
  cov = Eigen::MatrixXd::Zero(dim, dim);
  double total = 0.0;
  for (std::size_t n = 0; n < points.size(); ++n) {
    mean += weights[n] * Eigen::Map<const Eigen::VectorXd>(points[n].data(), dim);
    total += weights[n];
  }
  mean /= total;
  for (std::size_t n = 0; n < points.size(); ++n) {
    const Eigen::VectorXd diff = Eigen::Map<const Eigen::VectorXd>(points[n].data(), dim) - mean;
    cov += weights[n] * diff * diff.transpose();
  }
  cov /= total;
}

/// Multivariate normal with a cached Cholesky factor.
class Gaussian {
 public:
  Gaussian() = default;
  Gaussian(Eigen::VectorXd mean, Eigen::MatrixXd cov) : mean_{std::move(mean)}, cov_{std::move(cov)} {
    llt_.compute(cov_);
    if (llt_.info() != Eigen::Success) {
      throw std::domain_error("covariance is not positive definite");
    }
    const Eigen::MatrixXd l = llt_.matrixL();
    log_norm_ = -0.5 * static_cast<double>(mean_.size()) * std::log(2.0 * std::numbers::pi) -
                l.diagonal().array().log().sum();
  }

  [[nodiscard]] const Eigen::VectorXd& mean() const { return mean_; }
  [[nodiscard]] const Eigen::MatrixXd& cov() const { return cov_; }

  [[nodiscard]] double log_density(const Eigen::VectorXd& u) const {
    const Eigen::VectorXd z = llt_.matrixL().solve(u - mean_);
    return log_norm_ - 0.5 * z.squaredNorm();
  }

  [[nodiscard]] Eigen::VectorXd sample(Rng& rng) const {
    Eigen::VectorXd z(mean_.size());
    for (Eigen::Index i = 0; i < z.size(); ++i) {
      z[i] = standard_normal(rng);
    }
    return mean_ + llt_.matrixL() * z;
  }

 private:
  Eigen::VectorXd mean_;
  Eigen::MatrixXd cov_;
  Eigen::LLT<Eigen::MatrixXd> llt_;
  double log_norm_ = 0.0;
};

/// Finite Gaussian mixture fitted by weighted EM.
class GaussianMixture {
 public:
  GaussianMixture() = default;
  GaussianMixture(std::vector<double> weights, std::vector<Gaussian> components)
      : weights_{std::move(weights)}, components_{std::move(components)} {}

  /// Fits `k` components to weighted points. Falls back to a single moment-matched
  /// Gaussian (jittered when singular) if EM cannot produce `k` usable components.
  static GaussianMixture fit(const std::vector<std::vector<double>>& points, std::span<const double> weights,
                             std::size_t k, Rng& rng, std::size_t max_iter = 200) {
    if (points.empty()) {
      throw std::invalid_argument("cannot fit a mixture to zero points");
    }
    Eigen::VectorXd mean;
    Eigen::MatrixXd cov;
    weighted_moments(points, weights, mean, cov);
    const auto dim = mean.size();
    const auto n = points.size();
    const double scale = cov.trace() / static_cast<double>(dim);

    auto fallback = [&]() {
      Eigen::MatrixXd c = cov;
      Eigen::LLT<Eigen::MatrixXd> llt(c);
      if (llt.info() != Eigen::Success) {
        c += 1e-9 * Eigen::MatrixXd::Identity(dim, dim);
      }
      return GaussianMixture{{1.0}, {Gaussian{mean, c}}};
    };
    if (k <= 1 || n < k * static_cast<std::size_t>(dim + 1) || !(scale > 0.0) ||
        Eigen::LLT<Eigen::MatrixXd>(cov).info() != Eigen::Success) {
      return fallback();
    }

    std::vector<Eigen::VectorXd> x(n);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = Eigen::Map<const Eigen::VectorXd>(points[i].data(), dim);
    }
    std::vector<double> w(weights.begin(), weights.end());
    const double w_total = std::accumulate(w.begin(), w.end(), 0.0);
    for (double& wi : w) {
      wi /= w_total;
    }

    // k-means++ seeding of the means
    std::vector<Eigen::VectorXd> means;
    means.push_back(x[std::discrete_distribution<std::size_t>(w.begin(), w.end())(rng)]);
    while (means.size() < k) {
      std::vector<double> d2(n);
      for (std::size_t i = 0; i < n; ++i) {
        double best = kInf;
        for (const auto& m : means) {
          best = std::min(best, (x[i] - m).squaredNorm());
        }
        d2[i] = w[i] * best;
      }
      if (std::accumulate(d2.begin(), d2.end(), 0.0) <= 0.0) {
        return fallback();
      }
      means.push_back(x[std::discrete_distribution<std::size_t>(d2.begin(), d2.end())(rng)]);
    }
    std::vector<Eigen::MatrixXd> covs(k, cov);
    std::vector<double> pis(k, 1.0 / static_cast<double>(k));
    const Eigen::MatrixXd ridge = 1e-6 * scale * Eigen::MatrixXd::Identity(dim, dim);

    std::vector<std::vector<double>> resp(n, std::vector<double>(k));
    double prev_ll = kNegInf;
    for (std::size_t iter = 0; iter < max_iter; ++iter) {
      std::vector<Gaussian> comps;
      try {
        for (std::size_t j = 0; j < k; ++j) {
          comps.emplace_back(means[j], covs[j]);
        }
      } catch (const std::domain_error&) {
        return fallback();
      }
      double ll = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        double max = kNegInf;
        for (std::size_t j = 0; j < k; ++j) {
          resp[i][j] = std::log(pis[j]) + comps[j].log_density(x[i]);
          max = std::max(max, resp[i][j]);
        }
        double s = 0.0;
        for (std::size_t j = 0; j < k; ++j) {
          resp[i][j] = std::exp(resp[i][j] - max);
          s += resp[i][j];
        }
        for (std::size_t j = 0; j < k; ++j) {
          resp[i][j] /= s;
        }
        ll += w[i] * (max + std::log(s));
      }
      for (std::size_t j = 0; j < k; ++j) {
        double nj = 0.0;
        Eigen::VectorXd mj = Eigen::VectorXd::Zero(dim);
        for (std::size_t i = 0; i < n; ++i) {
          nj += w[i] * resp[i][j];
          mj += w[i] * resp[i][j] * x[i];
        }
        if (nj < 1e-3) {
          return fallback();
        }
        mj /= nj;
        Eigen::MatrixXd cj = Eigen::MatrixXd::Zero(dim, dim);
        for (std::size_t i = 0; i < n; ++i) {
          const Eigen::VectorXd diff = x[i] - mj;
          cj += w[i] * resp[i][j] * diff * diff.transpose();
        }
        means[j] = mj;
        covs[j] = cj / nj + ridge;
        pis[j] = nj;
      }
      if (std::abs(ll - prev_ll) < 1e-8 * std::max(1.0, std::abs(ll))) {
        break;
      }
      prev_ll = ll;
    }
    std::vector<Gaussian> comps;
    try {
      for (std::size_t j = 0; j < k; ++j) {
        comps.emplace_back(means[j], covs[j]);
      }
    } catch (const std::domain_error&) {
      return fallback();
    }
    return GaussianMixture{pis, std::move(comps)};
  }

  [[nodiscard]] std::size_t components() const noexcept { return components_.size(); }
  [[nodiscard]] const std::vector<double>& weights() const noexcept { return weights_; }
  [[nodiscard]] const Gaussian& component(std::size_t j) const { return components_[j]; }

  [[nodiscard]] double log_density(std::span<const double> u) const {
    const Eigen::VectorXd v = Eigen::Map<const Eigen::VectorXd>(u.data(), static_cast<Eigen::Index>(u.size()));
    std::vector<double> terms(components_.size());
    for (std::size_t j = 0; j < components_.size(); ++j) {
      terms[j] = std::log(weights_[j]) + components_[j].log_density(v);
    }
    return log_sum_exp(terms);
  }

  [[nodiscard]] std::vector<double> sample(Rng& rng) const {
    const std::size_t j =
        components_.size() == 1 ? 0 : std::discrete_distribution<std::size_t>(weights_.begin(), weights_.end())(rng);
    const Eigen::VectorXd v = components_[j].sample(rng);
    return {v.data(), v.data() + v.size()};
  }

 private:
  std::vector<double> weights_;
  std::vector<Gaussian> components_;
};

}  // namespace smc2

#endif  // SMC2_MIXTURE_HPP
