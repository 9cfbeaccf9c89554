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

#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>
#include <array>
#include <cmath>
#include <numbers>
#include <vector>

#include "smc2/harness/kalman.hpp"
#include "smc2/harness/reference.hpp"
#include "smc2/harness/scoring.hpp"
#include "smc2/models/brownian_motion.hpp"
#include "smc2/particle_filter.hpp"

namespace {

using smc2::models::BrownianMotion;

double log_normal_pdf(double x, double m, double s) {
  return -0.5 * std::log(2.0 * std::numbers::pi) - std::log(s) - 0.5 * (x - m) * (x - m) / (s * s);
}

// Golub-Welsch nodes and weights for E[f(Z)], Z ~ N(0, 1).
void gauss_hermite(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) J(k, k - 1) = J(k - 1, k) = std::sqrt(static_cast<double>(k));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  nodes.resize(n);
  weights.resize(n);
  for (int i = 0; i < n; ++i) {
    nodes[i] = es.eigenvalues()[i];
    const double v = es.eigenvectors()(0, i);
    weights[i] = v * v;
  }
}

TEST(Kalman, AgreesWithGaussHermiteQuadrature) {
  const BrownianMotion bm;
  const std::array<double, 4> theta{1.0, 1.2, 0.8, 1.1};
  const auto data = smc2::simulate_dataset(bm, theta, 3, 4);
  const auto p = bm.unpack(theta);
  std::vector<double> z;
  std::vector<double> w;
  gauss_hermite(48, z, w);
  double integral = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    const double x1 = p.x0 + p.drift + p.gamma * z[i];
    const double l1 = log_normal_pdf(data[0][0], x1, p.sigma);
    for (std::size_t j = 0; j < z.size(); ++j) {
      const double x2 = x1 + p.drift + p.gamma * z[j];
      const double l2 = l1 + log_normal_pdf(data[1][0], x2, p.sigma);
      for (std::size_t k = 0; k < z.size(); ++k) {
        const double x3 = x2 + p.drift + p.gamma * z[k];
        integral += w[i] * w[j] * w[k] * std::exp(l2 + log_normal_pdf(data[2][0], x3, p.sigma));
      }
    }
  }
  EXPECT_NEAR(smc2::harness::kalman_loglik(p, data, 3), std::log(integral), 1e-6);
}

TEST(Kalman, NoiseFreeLatentLimit) {
  const BrownianMotion bm;
  const auto data = smc2::simulate_dataset(bm, BrownianMotion::default_theta, 20, 5);
  const std::array<double, 4> theta{1.0, 1.2, 1e-9, 1.0};
  const auto p = bm.unpack(theta);
  double expected = 0.0;
  for (std::size_t t = 0; t < 20; ++t) {
    expected += log_normal_pdf(data[t][0], 1.0 + p.drift * static_cast<double>(t + 1), 1.0);
  }
  EXPECT_NEAR(smc2::harness::kalman_loglik(p, data, 20), expected, 1e-8);
}

TEST(Kalman, ParticleEstimatesConcentrate) {
  const BrownianMotion bm;
  const auto data = smc2::simulate_dataset(bm, BrownianMotion::default_theta, 30, 6);
  const double exact = smc2::harness::kalman_loglik(BrownianMotion::default_theta, data, 30);
  std::vector<double> ll(50);
  for (std::size_t i = 0; i < ll.size(); ++i) {
    smc2::Rng rng = smc2::make_stream(7, 0, i);
    ll[i] = smc2::run_filter(bm, BrownianMotion::default_theta, data, 30, 10000, rng).log_lik;
  }
  // E[log p_hat] - log p = -var / 2 + O(1/Nx^2); the variance is tiny here.
  const double m = smc2::mean(ll);
  const double v = smc2::sample_variance(ll);
  EXPECT_NEAR(m, exact - 0.5 * v, 3.0 * std::sqrt(v / ll.size()) + 0.01);
  EXPECT_LT(v, 0.05);
}

TEST(Reference, TightPriorConcentratesAtTruth) {
  const BrownianMotion bm;
  const auto data = smc2::simulate_dataset(bm, BrownianMotion::default_theta, 100, 7);
  const auto truth = smc2::to_unconstrained(bm, BrownianMotion::default_theta);
  auto target = [&](std::span<const double> u, smc2::Rng&) {
    double lp = 0.0;
    for (std::size_t i = 0; i < 4; ++i) lp += log_normal_pdf(u[i], truth[i], 0.01);
    return lp + smc2::harness::kalman_loglik(smc2::from_unconstrained(bm, u), data, 100);
  };
  auto stat = [](std::span<const double> u) { return std::vector<double>(u.begin(), u.end()); };
  smc2::harness::ChainOptions opt;
  opt.length = 20000;
  opt.initial_step = 0.005;
  smc2::Rng rng = smc2::make_stream(8, 0, 0);
  const auto c = smc2::harness::random_walk_chain(target, truth, stat, opt, rng);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(c.mean[i], truth[i], 0.03);
}

TEST(Reference, IndependentChainsAgree) {
  const BrownianMotion bm;
  const auto data = smc2::simulate_dataset(bm, BrownianMotion::default_theta, 100, 9);
  smc2::harness::ChainOptions opt;
  opt.length = 50000;
  smc2::Rng r1 = smc2::make_stream(10, 0, 0);
  smc2::Rng r2 = smc2::make_stream(11, 0, 0);
  using smc2::harness::ReferenceMethod;
  const auto a = smc2::harness::reference_posterior_mean(bm, data, ReferenceMethod::exact_mcmc,
                                                         BrownianMotion::default_theta, opt, r1);
  const auto b = smc2::harness::reference_posterior_mean(bm, data, ReferenceMethod::exact_mcmc,
                                                         BrownianMotion::default_theta, opt, r2);
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_NEAR(a.mean[i], b.mean[i], 3.0 * std::hypot(a.se[i], b.se[i])) << i;
  }
  EXPECT_GT(a.acceptance, 0.1);
  EXPECT_LT(a.acceptance, 0.6);
}

TEST(Reference, ZeroLengthIsAnError) {
  const BrownianMotion bm;
  const auto data = smc2::simulate_dataset(bm, BrownianMotion::default_theta, 10, 1);
  smc2::harness::ChainOptions opt;
  opt.length = 0;
  smc2::Rng rng = smc2::make_stream(1, 0, 0);
  EXPECT_THROW(smc2::harness::reference_posterior_mean(bm, data, smc2::harness::ReferenceMethod::exact_mcmc,
                                                       BrownianMotion::default_theta, opt, rng),
               std::invalid_argument);
}

TEST(Reference, PmmhChainRuns) {
  const BrownianMotion bm;
  const auto data = smc2::simulate_dataset(bm, BrownianMotion::default_theta, 20, 2);
  smc2::harness::ChainOptions opt;
  opt.length = 3000;
  smc2::Rng rng = smc2::make_stream(3, 0, 0);
  const auto r = smc2::harness::reference_posterior_mean(bm, data, smc2::harness::ReferenceMethod::pmmh,
                                                         BrownianMotion::default_theta, opt, rng, 50);
  ASSERT_EQ(r.mean.size(), 4u);
  for (double m : r.mean) EXPECT_TRUE(std::isfinite(m));
  EXPECT_GT(r.acceptance, 0.0);
}

TEST(Scoring, BaselineAgainstItself) {
  const std::vector<smc2::harness::RunInput> runs{{"gold_standard", 0.2, 1000}, {"novel", 0.1, 2000}};
  const auto s = smc2::harness::score_runs(runs, 0);
  EXPECT_EQ(s[0].z_mse, 1.0);
  EXPECT_EQ(s[0].z_tll, 1.0);
  EXPECT_EQ(s[0].z, 1.0);
  EXPECT_DOUBLE_EQ(s[1].z_mse, 2.0);
  EXPECT_DOUBLE_EQ(s[1].z_tll, 0.5);
  EXPECT_DOUBLE_EQ(s[1].z, 1.0);
}

TEST(Scoring, ZeroCostIsAnError) {
  const std::vector<smc2::harness::RunInput> runs{{"a", 0.2, 1000}, {"b", 0.1, 0}};
  EXPECT_THROW(smc2::harness::score_runs(runs, 0), std::invalid_argument);
}

TEST(Scoring, MeanSquaredError) {
  const std::vector<double> a{1.0, 2.0, 3.0};
  const std::vector<double> b{1.0, 4.0, 2.0};
  EXPECT_DOUBLE_EQ(smc2::harness::mean_squared_error(a, b), 5.0 / 3.0);
}

}  // namespace
