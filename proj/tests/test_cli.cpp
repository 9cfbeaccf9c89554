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

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace {

namespace fs = std::filesystem;

int run_cli(const std::string& args) {
  const std::string cmd = std::string(SMC2_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("smc2_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path write_config(const std::string& name, const std::string& body) {
    const fs::path p = dir_ / name;
    std::ofstream(p) << body;
    return p;
  }

  static std::string minimal(const std::string& stage2) {
    return "[run]\nmodel = bm\nflavor = da\nn_theta = 40\nnx0 = 10\nseed = 5\n"
           "[data]\nT = 20\n[adapt]\nstage2 = " + stage2 + "\nstage3 = replace\nk = 10\n";
  }

  fs::path dir_;
};

TEST_F(Cli, RunWritesAllArtifacts) {
  const auto cfg = write_config("run.ini", minimal("novel_esjd"));
  ASSERT_EQ(run_cli("run --quiet --config " + cfg.string() + " --out " + (dir_ / "out").string()), 0);
  for (const char* f : {"trace.csv", "samples.csv", "summary.json"}) EXPECT_TRUE(fs::exists(dir_ / "out" / f)) << f;
  EXPECT_EQ(slurp(dir_ / "out" / "trace.csv").substr(0, 32), "d,g_d,Nx,R,esjd,ess,tll,wall_ms\n");
}

TEST_F(Cli, SameSeedSameSummary) {
  const auto cfg = write_config("run.ini", minimal("novel_esjd"));
  ASSERT_EQ(run_cli("run --quiet --config " + cfg.string() + " --out " + (dir_ / "a").string()), 0);
  ASSERT_EQ(run_cli("run --quiet --config " + cfg.string() + " --out " + (dir_ / "b").string()), 0);
  EXPECT_EQ(slurp(dir_ / "a" / "summary.json"), slurp(dir_ / "b" / "summary.json"));
  EXPECT_EQ(slurp(dir_ / "a" / "trace.csv"), slurp(dir_ / "b" / "trace.csv"));
  ASSERT_EQ(run_cli("run --quiet --seed 6 --config " + cfg.string() + " --out " + (dir_ / "c").string()), 0);
  EXPECT_NE(slurp(dir_ / "a" / "samples.csv"), slurp(dir_ / "c" / "samples.csv"));
}

TEST_F(Cli, UnknownStage2IsConfigError) {
  const auto cfg = write_config("bad.ini", minimal("triple"));
  EXPECT_EQ(run_cli("run --quiet --config " + cfg.string() + " --out " + (dir_ / "out").string()), 2);
}

TEST_F(Cli, MissingConfigIsConfigError) { EXPECT_EQ(run_cli("run --config " + (dir_ / "none.ini").string()), 2); }

TEST_F(Cli, Table1) {
  const std::string cmd = std::string(SMC2_CLI_PATH) + " table1 > " + (dir_ / "t.csv").string();
  ASSERT_EQ(std::system(cmd.c_str()), 0);
  const std::string t = slurp(dir_ / "t.csv");
  EXPECT_NE(t.find("50,\"200\",\"5000\",\"708\",\"708, 1881, 5000\",\"100, 200, 708, 5000\""), std::string::npos);
  EXPECT_NE(t.find("1,\"200\""), std::string::npos);
  EXPECT_NE(t.find("0.5,\"200\",\"50\""), std::string::npos);
}

TEST_F(Cli, BenchEmptyGridIsConfigError) {
  const auto cfg = write_config("bench.ini", minimal("novel_esjd") + "gold_standard_nx = 20\n[bench]\nmethods =\n");
  EXPECT_EQ(run_cli("bench --quiet --config " + cfg.string() + " --out " + (dir_ / "out").string()), 2);
}

TEST_F(Cli, BenchBaselineRowIsOne) {
  const auto cfg = write_config("bench.ini", minimal("novel_esjd") +
                                                 "gold_standard_nx = 20\n[bench]\nmethods = gold_standard, "
                                                 "novel_esjd+replace\nnx0 = 10\nreplicates = 2\n"
                                                 "reference_length = 5000\n");
  ASSERT_EQ(run_cli("bench --quiet --config " + cfg.string() + " --out " + (dir_ / "out").string()), 0);
  std::istringstream scores(slurp(dir_ / "out" / "scores.csv"));
  std::string header;
  std::string base;
  std::getline(scores, header);
  std::getline(scores, base);
  EXPECT_EQ(header, "method,nx0,Z_MSE,Z_TLL,Z,mse,tll");
  EXPECT_EQ(base.substr(0, 23), "gold_standard,20,1,1,1,");
  // Reproducible from (config, seed).
  ASSERT_EQ(run_cli("bench --quiet --config " + cfg.string() + " --out " + (dir_ / "again").string()), 0);
  EXPECT_EQ(slurp(dir_ / "out" / "scores.csv"), slurp(dir_ / "again" / "scores.csv"));
}

TEST_F(Cli, SimulateWritesDataset) {
  const auto cfg = write_config("run.ini", minimal("novel_esjd"));
  ASSERT_EQ(run_cli("simulate --config " + cfg.string() + " --out " + (dir_ / "d.csv").string()), 0);
  EXPECT_EQ(slurp(dir_ / "d.csv").substr(0, 4), "t,y\n");
}

}  // namespace
