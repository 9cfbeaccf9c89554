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

#include <array>
#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

#include "smc2/dataset.hpp"
#include "smc2/model.hpp"
#include "smc2/models/brownian_motion.hpp"
#include "smc2/models/ricker.hpp"
#include "smc2/models/stochastic_volatility.hpp"
#include "smc2/models/theta_logistic.hpp"
#include "smc2/registry.hpp"

namespace {

using smc2::models::BrownianMotion;
using smc2::models::Ricker;
using smc2::models::StochasticVolatility;
using smc2::models::ThetaLogistic;

constexpr double kLog2Pi = 1.8378770664093453;

TEST(BrownianMotion, MeanIncrementMatchesDrift) {
  const BrownianMotion bm;
  const auto data = smc2::simulate_dataset(bm, BrownianMotion::default_theta, 100, 1);
  ASSERT_EQ(data.size(), 100u);
  std::vector<double> inc;
  for (std::size_t t = 1; t < data.size(); ++t) inc.push_back(data[t][0] - data[t - 1][0]);
  const double m = smc2::mean(inc);
  // Increments are MA(1): var = gamma^2 + 2 sigma^2, lag-one covariance -sigma^2.
  const double long_run_var = 1.5 * 1.5 + 2.0 - 2.0;
  const double se = std::sqrt(long_run_var / static_cast<double>(inc.size()));
  EXPECT_NEAR(m, 0.075, 3.0 * se);
}

TEST(BrownianMotion, NoiseFreeLimit) {
  const BrownianMotion bm;
  const std::array<double, 4> theta{1.0, 1.2, 1e-6, 1e-6};
  const auto data = smc2::simulate_dataset(bm, theta, 20, 3);
  for (std::size_t t = 0; t < data.size(); ++t) {
    EXPECT_NEAR(data[t][0], 1.0 + 1.2 * static_cast<double>(t + 1), 1e-3);
  }
}

TEST(BrownianMotion, ObservationDensityAtZeroResidual) {
  const BrownianMotion bm;
  const auto p = bm.unpack(BrownianMotion::default_theta);
  const std::array<double, 1> x{2.5};
  EXPECT_NEAR(bm.log_obs_density(p, x, x), -0.5 * kLog2Pi, 1e-14);
}

TEST(BrownianMotion, VanishingTransitionNoise) {
  const BrownianMotion bm;
  const std::array<double, 4> theta{1.0, 1.2, 1e-9, 1.0};
  const auto p = bm.unpack(theta);
  smc2::Rng rng = smc2::make_stream(1, 0, 0);
  const std::array<double, 1> prev{3.0};
  std::array<double, 1> next{};
  bm.sample_transition(p, prev, next, rng);
  EXPECT_NEAR(next[0], 3.0 + 1.2, 1e-6);
}

TEST(BrownianMotion, InitialStateMean) {
  const BrownianMotion bm;
  const auto p = bm.unpack(BrownianMotion::default_theta);
  smc2::Rng rng = smc2::make_stream(2, 0, 0);
  constexpr int n = 100000;
  double sum = 0.0;
  std::array<double, 1> x{};
  for (int i = 0; i < n; ++i) {
    bm.sample_initial(p, x, rng);
    sum += x[0];
  }
  EXPECT_NEAR(sum / n, 1.0 + 0.075, 3.0 * 1.5 / std::sqrt(n));
}

TEST(BrownianMotion, DegenerateInitialSpread) {
  const BrownianMotion bm;
  const std::array<double, 4> theta{1.0, 0.0, 0.0, 1.0};
  const auto p = bm.unpack(theta);
  smc2::Rng rng = smc2::make_stream(3, 0, 0);
  std::array<double, 1> x{};
  for (int i = 0; i < 10; ++i) {
    bm.sample_initial(p, x, rng);
    EXPECT_EQ(x[0], 1.0);
  }
}

TEST(BrownianMotion, PriorAtModeMatchesClosedForm) {
  const BrownianMotion bm;
  // Half-normal densities are maximal at 0+, so take a point just inside.
  const std::array<double, 4> theta{3.0, 2.0, 0.5, 0.25};
  auto normal = [](double x, double m, double s) {
    return -0.5 * kLog2Pi - std::log(s) - 0.5 * (x - m) * (x - m) / (s * s);
  };
  auto half_normal = [&](double x, double s) { return std::log(2.0) + normal(x, 0.0, s); };
  const double expected = normal(3.0, 3.0, 5.0) + normal(2.0, 2.0, 5.0) + half_normal(0.5, 2.0) + half_normal(0.25, 2.0);
  EXPECT_NEAR(bm.log_prior(theta), expected, 1e-12);
  const std::array<double, 4> outside{3.0, 2.0, -0.5, 0.25};
  EXPECT_EQ(bm.log_prior(outside), smc2::kNegInf);
}

TEST(Ricker, ObservationsAreNonNegativeIntegers) {
  const Ricker model;
  const std::array<double, 3> theta{std::log(10.0), std::log(44.7), std::log(0.6)};
  const auto data = smc2::simulate_dataset(model, theta, 700, 4);
  ASSERT_EQ(data.size(), 700u);
  for (std::size_t t = 0; t < data.size(); ++t) {
    EXPECT_GE(data[t][0], 0.0);
    EXPECT_EQ(data[t][0], std::floor(data[t][0]));
  }
}

TEST(Ricker, PoissonObservationEdgeCases) {
  const Ricker model;
  const auto p = model.unpack(Ricker::default_theta);
  const std::array<double, 1> zero{0.0};
  const std::array<double, 1> three{3.0};
  EXPECT_EQ(model.log_obs_density(p, zero, zero), 0.0);
  EXPECT_EQ(model.log_obs_density(p, zero, three), smc2::kNegInf);
}

TEST(Ricker, UniformPrior) {
  const Ricker model;
  const std::array<double, 3> inside{2.0, 3.0, 0.0};
  const double expected = -std::log(3.0 - 1.61) - std::log(5.0 - 2.0) - std::log(1.0 + 1.8);
  EXPECT_NEAR(model.log_prior(inside), expected, 1e-12);
  const std::array<double, 3> outside{3.5, 3.0, 0.0};
  EXPECT_EQ(model.log_prior(outside), smc2::kNegInf);
}

TEST(StochasticVolatility, LongRunMeanOfZ) {
  const StochasticVolatility sv;
  const auto p = sv.unpack(StochasticVolatility::default_theta);
  smc2::Rng rng = smc2::make_stream(5, 0, 0);
  std::array<double, 2> x{};
  std::array<double, 2> next{};
  sv.sample_initial(p, x, rng);
  constexpr int n = 100000;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    sv.sample_transition(p, x, next, rng);
    x = next;
    sum += x[1];
  }
  // Stationary Gamma(4, 1): variance 4, lag-one autocorrelation exp(-0.5).
  const double rho = std::exp(-0.5);
  const double se = std::sqrt(4.0 / n * (1.0 + rho) / (1.0 - rho));
  EXPECT_NEAR(sum / n, 4.0, 3.0 * se);
}

TEST(StochasticVolatility, InitialGammaMean) {
  const StochasticVolatility sv;
  const auto p = sv.unpack(StochasticVolatility::default_theta);
  smc2::Rng rng = smc2::make_stream(6, 0, 0);
  constexpr int n = 100000;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    sum += std::gamma_distribution<double>{p.gamma_shape, 1.0 / p.jump_rate}(rng);
  }
  EXPECT_NEAR(sum / n, 4.0, 3.0 * 2.0 / std::sqrt(n));
}

TEST(StochasticVolatility, IntegratedVolatilityIsPositive) {
  const StochasticVolatility sv;
  const auto p = sv.unpack(StochasticVolatility::default_theta);
  smc2::Rng rng = smc2::make_stream(7, 0, 0);
  std::array<double, 2> x{};
  sv.sample_initial(p, x, rng);
  std::array<double, 2> next{};
  for (int i = 0; i < 1000; ++i) {
    sv.sample_transition(p, x, next, rng);
    x = next;
    EXPECT_GT(x[0], 0.0);
  }
}

TEST(ThetaLogistic, NoDriftNoNoiseIsStationary) {
  const ThetaLogistic model;
  std::array<double, 7> theta = ThetaLogistic::default_theta;
  theta[0] = 0.0;
  theta[1] = 0.0;
  theta[4] = 1e-9;
  const auto p = model.unpack(theta);
  smc2::Rng rng = smc2::make_stream(8, 0, 0);
  const std::array<double, 1> prev{6.5};
  std::array<double, 1> next{};
  model.sample_transition(p, prev, next, rng);
  EXPECT_NEAR(next[0], 6.5, 1e-6);
}

template <class M>
void prior_predictive_smoke(std::uint64_t seed) {
  const M model;
  const auto data = smc2::simulate_dataset(model, M::default_theta, 50, seed);
  // Re-simulate the latent path with the same stream and score it.
  smc2::Rng rng = smc2::make_stream(seed, 0, 0);
  const auto p = model.unpack(M::default_theta);
  std::array<double, M::state_dim> x{};
  std::array<double, M::state_dim> next{};
  std::array<double, M::obs_dim> y{};
  model.sample_initial(p, x, rng);
  for (std::size_t t = 0; t < data.size(); ++t) {
    if (t > 0) {
      model.sample_transition(p, x, next, rng);
      x = next;
    }
    model.sample_observation(p, x, y, rng);
    EXPECT_EQ(y[0], data[t][0]);
    EXPECT_TRUE(std::isfinite(model.log_obs_density(p, x, data[t])));
  }
}

TEST(AllModels, PriorPredictiveSmoke) {
  prior_predictive_smoke<BrownianMotion>(11);
  prior_predictive_smoke<StochasticVolatility>(12);
  prior_predictive_smoke<ThetaLogistic>(13);
  prior_predictive_smoke<Ricker>(14);
}

template <class M>
void transform_round_trip(std::uint64_t seed) {
  const M model;
  smc2::Rng rng = smc2::make_stream(seed, 0, 0);
  for (int i = 0; i < 100; ++i) {
    const auto theta = smc2::sample_prior(model, rng);
    ASSERT_TRUE(smc2::in_support(model, theta));
    const auto back = smc2::from_unconstrained(model, smc2::to_unconstrained(model, theta));
    for (std::size_t j = 0; j < theta.size(); ++j) {
      EXPECT_NEAR(back[j], theta[j], 1e-12 * std::max(1.0, std::abs(theta[j])));
    }
    EXPECT_TRUE(std::isfinite(smc2::log_prior_unconstrained(model, smc2::to_unconstrained(model, theta))));
  }
}

TEST(AllModels, TransformRoundTrip) {
  transform_round_trip<BrownianMotion>(21);
  transform_round_trip<StochasticVolatility>(22);
  transform_round_trip<ThetaLogistic>(23);
  transform_round_trip<Ricker>(24);
}

TEST(SimulateDataset, Errors) {
  const BrownianMotion bm;
  const std::array<double, 4> bad{1.0, 1.2, -1.5, 1.0};
  EXPECT_THROW(smc2::simulate_dataset(bm, bad, 10, 1), std::domain_error);
  EXPECT_THROW(smc2::simulate_dataset(bm, BrownianMotion::default_theta, 0, 1), std::invalid_argument);
}

TEST(SimulateDataset, DeterministicGivenSeed) {
  const StochasticVolatility sv;
  const auto a = smc2::simulate_dataset(sv, StochasticVolatility::default_theta, 30, 5);
  const auto b = smc2::simulate_dataset(sv, StochasticVolatility::default_theta, 30, 5);
  for (std::size_t t = 0; t < a.size(); ++t) EXPECT_EQ(a[t][0], b[t][0]);
}

TEST(Dataset, CsvRoundTrip) {
  const BrownianMotion bm;
  const auto data = smc2::simulate_dataset(bm, BrownianMotion::default_theta, 25, 6);
  std::stringstream ss;
  smc2::write_dataset_csv(data, ss);
  EXPECT_EQ(ss.str().substr(0, 4), "t,y\n");
  const auto back = smc2::read_dataset_csv(ss, "round-trip");
  ASSERT_EQ(back.size(), data.size());
  for (std::size_t t = 0; t < data.size(); ++t) EXPECT_EQ(back[t][0], data[t][0]);
}

TEST(Dataset, RejectsNonFinite) {
  EXPECT_THROW(smc2::Dataset(1, {1.0, std::nan("")}, "bad"), std::invalid_argument);
}

TEST(Registry, DispatchesById) {
  for (std::string_view id : smc2::kModelIds) {
    const std::size_t dim = smc2::with_model(id, [](const auto& m) { return smc2::param_dim(m); });
    EXPECT_GT(dim, 0u);
  }
  EXPECT_THROW(smc2::with_model("nope", [](const auto& m) { return smc2::param_dim(m); }), std::invalid_argument);
}

}  // namespace
