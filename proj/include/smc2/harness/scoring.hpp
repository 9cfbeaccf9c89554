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

#ifndef SMC2_HARNESS_SCORING_HPP
#define SMC2_HARNESS_SCORING_HPP

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace smc2::harness {

struct RunInput {
  std::string method;
  double mse = 0.0;
  std::uint64_t tll = 0;
};

struct RunMetrics {
  std::string method;
  double mse = 0.0;
  std::uint64_t tll = 0;
  double z_mse = 0.0;
  double z_tll = 0.0;
  double z = 0.0;
};

/// Mean over parameters of the squared error of `estimate` against `reference`.
inline double mean_squared_error(std::span<const double> estimate, std::span<const double> reference) {
  if (estimate.size() != reference.size() || estimate.empty()) {
    throw std::invalid_argument("mean_squared_error: size mismatch");
  }
  double s = 0.0;
  for (std::size_t i = 0; i < estimate.size(); ++i) {
    const double e = estimate[i] - reference[i];
    s += e * e;
  }
  return s / static_cast<double>(estimate.size());
}

/// Z scores relative to `runs[baseline]`: higher is better.
inline std::vector<RunMetrics> score_runs(std::span<const RunInput> runs, std::size_t baseline) {
  if (baseline >= runs.size()) {
    throw std::out_of_range("score_runs: baseline index out of range");
  }
  for (const RunInput& r : runs) {
    if (r.tll == 0) throw std::invalid_argument("score_runs: a run reports zero likelihood evaluations");
    if (!(r.mse >= 0.0)) throw std::invalid_argument("score_runs: negative or NaN MSE");
  }
  const RunInput& base = runs[baseline];
  std::vector<RunMetrics> out;
  out.reserve(runs.size());
  for (const RunInput& r : runs) {
    RunMetrics m{r.method, r.mse, r.tll, 0.0, 0.0, 0.0};
    m.z_mse = base.mse / r.mse;
    m.z_tll = static_cast<double>(base.tll) / static_cast<double>(r.tll);
    m.z = m.z_mse * m.z_tll;
    out.push_back(m);
  }
  return out;
}

}  // namespace smc2::harness

#endif  // SMC2_HARNESS_SCORING_HPP
