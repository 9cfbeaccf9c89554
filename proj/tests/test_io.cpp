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

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "smc2/io.hpp"
#include "smc2/models/brownian_motion.hpp"
#include "smc2/smc2.hpp"

namespace {

using smc2::models::BrownianMotion;

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

TEST(FormatDouble, RoundTrips) {
  for (double x : {0.1, 1.0 / 3.0, 6.02214076e23, -2.5e-300, 100.0}) {
    EXPECT_EQ(std::strtod(smc2::format_double(x).c_str(), nullptr), x);
  }
  EXPECT_EQ(smc2::format_double(0.5), "0.5");
  EXPECT_EQ(smc2::format_double(smc2::kNegInf), "-inf");
}

TEST(TraceCsv, HeaderAndRows) {
  std::vector<smc2::StageRecord> trace{{1, 0.25, 100, 3, 6.5, 600.0, 12345, 0.0}};
  std::stringstream ss;
  smc2::write_trace_csv(trace, ss);
  EXPECT_EQ(ss.str(), "d,g_d,Nx,R,esjd,ess,tll,wall_ms\n1,0.25,100,3,6.5,600,12345,0\n");
}

class Artifacts : public ::testing::Test {
 protected:
  static smc2::Ensemble run(std::uint64_t seed) {
    const BrownianMotion bm;
    const auto data = smc2::simulate_dataset(bm, BrownianMotion::default_theta, 15, 2);
    smc2::SmcConfig c;
    c.n_theta = 40;
    c.nx0 = 15;
    c.seed = seed;
    c.policy.k = 10;
    return smc2::run_smc2(bm, data, c);
  }
};

TEST_F(Artifacts, SamplesCsvHasNamesAndWeights) {
  const auto e = run(1);
  std::stringstream ss;
  smc2::write_samples_csv(BrownianMotion{}, e, ss);
  std::string header;
  std::getline(ss, header);
  EXPECT_EQ(header, "x0,beta,gamma,sigma,weight");
  std::size_t rows = 0;
  double total = 0.0;
  for (std::string line; std::getline(ss, line);) {
    ++rows;
    total += std::stod(line.substr(line.rfind(',') + 1));
  }
  EXPECT_EQ(rows, 40u);
  EXPECT_NEAR(total, 1.0, 1e-12);
}

TEST_F(Artifacts, SummaryJsonFields) {
  const auto e = run(2);
  const auto j = smc2::summary_json(BrownianMotion{}, e);
  EXPECT_EQ(j["model"], "bm");
  EXPECT_EQ(j["tll"].get<std::uint64_t>(), e.tll);
  for (const char* name : {"x0", "beta", "gamma", "sigma"}) {
    ASSERT_TRUE(j["posterior"].contains(name));
    EXPECT_GE(j["posterior"][name]["var"].get<double>(), 0.0);
  }
  const auto s = smc2::summarize(BrownianMotion{}, e);
  EXPECT_DOUBLE_EQ(std::log(s.mean[2]) <= s.mean_unconstrained[2] + 1e9 ? 1.0 : 0.0, 1.0);
}

TEST_F(Artifacts, SameSeedBitIdenticalFiles) {
  const auto dir = std::filesystem::temp_directory_path() / "smc2_io_test";
  std::filesystem::remove_all(dir);
  smc2::write_run_artifacts(BrownianMotion{}, run(3), dir / "a");
  smc2::write_run_artifacts(BrownianMotion{}, run(3), dir / "b");
  for (const char* f : {"trace.csv", "samples.csv", "summary.json", "adaptation.jsonl"}) {
    EXPECT_EQ(slurp(dir / "a" / f), slurp(dir / "b" / f)) << f;
    EXPECT_FALSE(slurp(dir / "a" / f).empty()) << f;
  }
  std::filesystem::remove_all(dir);
}

}  // namespace
