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

#ifndef SMC2_IO_HPP
#define SMC2_IO_HPP

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "smc2/adaptation.hpp"
#include "smc2/ensemble.hpp"
#include "smc2/model.hpp"

namespace smc2 {

/// Shortest decimal that round-trips, so artifacts are reproducible byte for byte.
inline std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  for (int precision = 15; precision <= 17; ++precision) {
    std::snprintf(buf, sizeof buf, "%.*g", precision, x);
    if (std::strtod(buf, nullptr) == x) break;
  }
  return buf;
}

struct PosteriorSummary {
  std::vector<std::string> names;
  std::vector<double> mean;
  std::vector<double> var;
  std::vector<double> mean_unconstrained;
  std::vector<double> var_unconstrained;
};

/// Weighted posterior moments on both parameter scales.
template <StateSpaceModel M>
PosteriorSummary summarize(const M& model, const Ensemble& e) {
  const std::size_t dim = param_dim(model);
  const std::vector<double> w = e.weights();
  PosteriorSummary s;
  s.names = parameter_names(model);
  s.mean.assign(dim, 0.0);
  s.var.assign(dim, 0.0);
  s.mean_unconstrained.assign(dim, 0.0);
  s.var_unconstrained.assign(dim, 0.0);
  std::vector<std::vector<double>> u(e.size());
  for (std::size_t n = 0; n < e.size(); ++n) {
    u[n] = to_unconstrained(model, e.particles[n].theta);
    for (std::size_t i = 0; i < dim; ++i) {
      s.mean[i] += w[n] * e.particles[n].theta[i];
      s.mean_unconstrained[i] += w[n] * u[n][i];
    }
  }
  for (std::size_t n = 0; n < e.size(); ++n) {
    for (std::size_t i = 0; i < dim; ++i) {
      const double a = e.particles[n].theta[i] - s.mean[i];
      const double b = u[n][i] - s.mean_unconstrained[i];
      s.var[i] += w[n] * a * a;
      s.var_unconstrained[i] += w[n] * b * b;
    }
  }
  return s;
}

inline void write_trace_csv(const std::vector<StageRecord>& trace, std::ostream& out) {
  out << "d,g_d,Nx,R,esjd,ess,tll,wall_ms\n";
  for (const StageRecord& r : trace) {
    out << r.d << ',' << format_double(r.g) << ',' << r.nx << ',' << r.R << ',' << format_double(r.esjd) << ','
        << format_double(r.ess) << ',' << r.tll << ',' << format_double(r.wall_ms) << '\n';
  }
}

/// One row per parameter particle: constrained theta then its normalised weight.
template <StateSpaceModel M>
void write_samples_csv(const M& model, const Ensemble& e, std::ostream& out) {
  const std::vector<std::string> names = parameter_names(model);
  for (const std::string& n : names) out << n << ',';
  out << "weight\n";
  const std::vector<double> w = e.weights();
  for (std::size_t n = 0; n < e.size(); ++n) {
    for (double v : e.particles[n].theta) out << format_double(v) << ',';
    out << format_double(w[n]) << '\n';
  }
}

template <StateSpaceModel M>
nlohmann::ordered_json summary_json(const M& model, const Ensemble& e) {
  const PosteriorSummary s = summarize(model, e);
  nlohmann::ordered_json j;
  j["model"] = std::string(M::id);
  j["flavor"] = e.flavor == Flavor::density_tempering ? "dt" : "da";
  j["n_theta"] = e.size();
  j["final_nx"] = e.nx;
  j["stages"] = e.trace.size();
  j["restarts"] = e.restarts;
  j["tll"] = e.tll;
  nlohmann::ordered_json params = nlohmann::ordered_json::object();
  for (std::size_t i = 0; i < s.names.size(); ++i) {
    params[s.names[i]] = {{"mean", s.mean[i]},
                          {"var", s.var[i]},
                          {"mean_unconstrained", s.mean_unconstrained[i]},
                          {"var_unconstrained", s.var_unconstrained[i]}};
  }
  j["posterior"] = params;
  return j;
}

inline nlohmann::ordered_json event_json(const AdaptationEvent& ev) {
  nlohmann::ordered_json j;
  j["d"] = ev.d;
  j["g"] = ev.g;
  j["trigger"] = ev.trigger;
  if (std::isnan(ev.sigma2_hat)) {
    j["sigma2_hat"] = nullptr;
  } else if (std::isinf(ev.sigma2_hat)) {
    j["sigma2_hat"] = "inf";
  } else {
    j["sigma2_hat"] = ev.sigma2_hat;
  }
  j["candidates"] = ev.candidates;
  j["scores"] = ev.scores;
  j["nx_before"] = ev.nx_before;
  j["nx_after"] = ev.nx_after;
  j["R"] = ev.R;
  j["restarted"] = ev.restarted;
  return j;
}

namespace detail {
inline std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path.string() + " for writing");
  return f;
}
}  // namespace detail

/// trace.csv, samples.csv, summary.json and adaptation.jsonl under `dir`.
template <StateSpaceModel M>
void write_run_artifacts(const M& model, const Ensemble& e, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  {
    auto f = detail::open_output(dir / "trace.csv");
    write_trace_csv(e.trace, f);
  }
  {
    auto f = detail::open_output(dir / "samples.csv");
    write_samples_csv(model, e, f);
  }
  {
    auto f = detail::open_output(dir / "summary.json");
    f << summary_json(model, e).dump(2) << '\n';
  }
  {
    auto f = detail::open_output(dir / "adaptation.jsonl");
    for (const AdaptationEvent& ev : e.events) f << event_json(ev).dump() << '\n';
  }
}

}  // namespace smc2

#endif  // SMC2_IO_HPP
