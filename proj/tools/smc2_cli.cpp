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

// Command-line front end: run, table1, bench and simulate.
//
// Exit codes: 0 success, 1 runtime failure, 2 invalid configuration.

#include <CLI11.hpp>
#include <algorithm>
#include <boost/algorithm/string.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "smc2/harness/reference.hpp"
#include "smc2/harness/scoring.hpp"
#include "smc2/io.hpp"
#include "smc2/registry.hpp"
#include "smc2/smc2.hpp"

namespace {

namespace fs = std::filesystem;
namespace pt = boost::property_tree;

using smc2::config_error;

struct DataSpec {
  std::string path;               // empty: simulate
  std::vector<double> theta;      // empty: the model default
  std::size_t T = 0;              // 0: the model default
  std::uint64_t seed = 1;
};

struct RunSpec {
  std::string model = "bm";
  DataSpec data;
  smc2::SmcConfig smc;
  fs::path out = "out";
};

struct BenchSpec {
  RunSpec base;
  std::vector<std::string> methods;
  std::vector<std::size_t> nx0;
  std::size_t replicates = 5;
  std::string baseline = "gold_standard";
  std::size_t gold_standard_nx = 0;
  std::size_t reference_length = 200000;
};

template <class T>
T get_value(const pt::ptree& tree, const std::string& key, T fallback) {
  const auto node = tree.get_child_optional(key);
  if (!node) return fallback;
  try {
    return node->get_value<T>();
  } catch (const pt::ptree_bad_data&) {
    throw config_error("bad value for '" + key + "': '" + node->data() + "'");
  }
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> parts;
  boost::split(parts, s, boost::is_any_of(","));
  std::vector<std::string> out;
  for (auto& p : parts) {
    boost::trim(p);
    if (!p.empty()) out.push_back(p);
  }
  return out;
}

template <class T>
std::vector<T> parse_list(const std::string& key, const std::string& s) {
  std::vector<T> out;
  for (const auto& item : split_list(s)) {
    std::istringstream in(item);
    T v{};
    if (!(in >> v) || !in.eof()) throw config_error("bad list entry in '" + key + "': '" + item + "'");
    out.push_back(v);
  }
  return out;
}

smc2::Flavor parse_flavor(const std::string& s) {
  if (s == "dt" || s == "density_tempering") return smc2::Flavor::density_tempering;
  if (s == "da" || s == "data_annealing") return smc2::Flavor::data_annealing;
  throw config_error("unknown flavor '" + s + "' (expected dt or da)");
}

smc2::Stage2 parse_stage2_or_throw(const std::string& s) {
  const auto v = smc2::parse_stage2(s);
  if (!v) throw config_error("unknown stage2 strategy '" + s + "'");
  return *v;
}

smc2::Stage3 parse_stage3_or_throw(const std::string& s) {
  const auto v = smc2::parse_stage3(s);
  if (!v) throw config_error("unknown stage3 scheme '" + s + "'");
  return *v;
}

bool known_model(const std::string& id) {
  for (std::string_view m : smc2::kModelIds) {
    if (m == id) return true;
  }
  return false;
}

RunSpec read_run_spec(const pt::ptree& tree) {
  RunSpec spec;
  spec.model = get_value<std::string>(tree, "run.model", spec.model);
  if (!known_model(spec.model)) throw config_error("unknown model '" + spec.model + "'");
  spec.smc.flavor = parse_flavor(get_value<std::string>(tree, "run.flavor", "dt"));
  spec.smc.n_theta = get_value<std::size_t>(tree, "run.n_theta", 1000);
  spec.smc.nx0 = get_value<std::size_t>(tree, "run.nx0", 10);
  spec.smc.seed = get_value<std::uint64_t>(tree, "run.seed", 1);
  spec.smc.theta_ess_fraction = get_value<double>(tree, "run.theta_ess_fraction", 0.6);
  spec.smc.record_wall_time = get_value<bool>(tree, "run.record_wall_time", false);
  spec.out = get_value<std::string>(tree, "run.output", "out");
  if (spec.smc.n_theta == 0) throw config_error("run.n_theta must be positive");
  if (spec.smc.nx0 == 0) throw config_error("run.nx0 must be positive");

  spec.data.path = get_value<std::string>(tree, "data.path", "");
  spec.data.T = get_value<std::size_t>(tree, "data.T", 0);
  spec.data.seed = get_value<std::uint64_t>(tree, "data.seed", 1);
  const std::string theta = get_value<std::string>(tree, "data.theta", "");
  if (!theta.empty()) spec.data.theta = parse_list<double>("data.theta", theta);

  smc2::AdaptPolicy& p = spec.smc.policy;
  p.stage2 = parse_stage2_or_throw(get_value<std::string>(tree, "adapt.stage2", "novel_esjd"));
  p.stage3 = parse_stage3_or_throw(get_value<std::string>(tree, "adapt.stage3", "replace"));
  p.esjd_target = get_value<double>(tree, "adapt.esjd_target", p.esjd_target);
  p.k = get_value<std::size_t>(tree, "adapt.k", p.k);
  p.nx_min = get_value<std::size_t>(tree, "adapt.nx_min", p.nx_min);
  const std::size_t gs_nx = get_value<std::size_t>(tree, "adapt.gold_standard_nx", 0);
  const std::size_t nx_max = get_value<std::size_t>(tree, "adapt.nx_max", 0);
  if (nx_max > 0) {
    p.nx_max = nx_max;
  } else if (gs_nx > 0) {
    p.nx_max = 5 * gs_nx;
  }
  p.g_floor = get_value<double>(tree, "adapt.g_floor", p.g_floor);
  p.upper_trigger_factor = get_value<double>(tree, "adapt.upper_trigger_factor", p.upper_trigger_factor);
  p.r_cap = get_value<std::size_t>(tree, "adapt.r_cap", p.r_cap);
  p.max_restarts = get_value<std::size_t>(tree, "adapt.max_restarts", p.max_restarts);
  const auto rounding = smc2::parse_rounding(get_value<std::string>(tree, "adapt.rounding", "ceil"));
  if (!rounding) throw config_error("adapt.rounding must be ceil or ceil_to_10");
  p.rounding = *rounding;
  try {
    p.validate();
  } catch (const std::invalid_argument& e) {
    throw config_error(e.what());
  }
  if (!(spec.smc.theta_ess_fraction > 0.0 && spec.smc.theta_ess_fraction <= 1.0)) {
    throw config_error("run.theta_ess_fraction must lie in (0, 1]");
  }
  return spec;
}

pt::ptree load_tree(const std::string& path) {
  pt::ptree tree;
  try {
    pt::read_ini(path, tree);
  } catch (const pt::ini_parser_error& e) {
    throw config_error(e.what());
  }
  return tree;
}

template <class M>
smc2::Dataset load_data(const M& model, const DataSpec& spec) {
  if (!spec.path.empty()) {
    smc2::Dataset data = smc2::load_dataset(spec.path);
    if (data.dim() != M::obs_dim) throw config_error("dataset dimension does not match the model");
    return data;
  }
  std::vector<double> theta(M::default_theta.begin(), M::default_theta.end());
  if (!spec.theta.empty()) theta = spec.theta;
  if (theta.size() != smc2::param_dim(model)) throw config_error("data.theta has the wrong length");
  if (!smc2::in_support(model, theta)) throw config_error("data.theta lies outside the prior support");
  return smc2::simulate_dataset(model, theta, spec.T > 0 ? spec.T : M::default_T, spec.seed);
}

void print_progress(const smc2::StageRecord& r) {
  std::cerr << "stage " << r.d << "  g=" << smc2::format_double(r.g) << "  Nx=" << r.nx << "  R=" << r.R
            << "  esjd=" << smc2::format_double(r.esjd) << "  tll=" << r.tll << '\n';
}

int cmd_run(const std::string& config, std::optional<std::uint64_t> seed, const std::string& out, bool quiet) {
  RunSpec spec = read_run_spec(load_tree(config));
  if (seed) spec.smc.seed = *seed;
  if (!out.empty()) spec.out = out;
  if (!quiet) spec.smc.on_stage = print_progress;
  smc2::with_model(spec.model, [&](const auto& model) {
    const smc2::Dataset data = load_data(model, spec.data);
    const smc2::Ensemble e = smc2::run_smc2(model, data, spec.smc);
    smc2::write_run_artifacts(model, e, spec.out);
    if (!quiet) {
      std::cerr << "wrote " << (spec.out / "trace.csv").string() << ", samples.csv, summary.json\n";
    }
  });
  return 0;
}

std::string join_candidates(const std::vector<std::size_t>& c) {
  std::string s;
  for (std::size_t i = 0; i < c.size(); ++i) s += (i ? ", " : "") + std::to_string(c[i]);
  return s;
}

int cmd_table1(std::ostream& out) {
  using smc2::Stage2;
  const std::vector<std::pair<const char*, Stage2>> strategies{{"double", Stage2::double_nx},
                                                               {"rescale_var", Stage2::rescale_var},
                                                               {"rescale_std", Stage2::rescale_std},
                                                               {"novel_var", Stage2::novel_var},
                                                               {"novel_esjd", Stage2::novel_esjd}};
  out << "sigma2";
  for (const auto& s : strategies) out << ',' << s.first;
  out << '\n';
  for (double sigma2 : {0.5, 1.0, 1.5, 50.0}) {
    out << smc2::format_double(sigma2);
    for (const auto& s : strategies) {
      smc2::AdaptPolicy p;
      p.stage2 = s.second;
      out << ",\"" << join_candidates(smc2::candidates_stage2(100, sigma2, 1.0, p)) << '"';
    }
    out << '\n';
  }
  return 0;
}

// "gold_standard" or "<stage2>+<stage3>", e.g. "novel_esjd+replace".
std::pair<smc2::Stage2, smc2::Stage3> parse_method(const std::string& method) {
  if (method == "gold_standard") return {smc2::Stage2::fixed, smc2::Stage3::replace};
  const auto plus = method.find('+');
  if (plus == std::string::npos) throw config_error("method '" + method + "' must look like stage2+stage3");
  return {parse_stage2_or_throw(method.substr(0, plus)), parse_stage3_or_throw(method.substr(plus + 1))};
}

BenchSpec read_bench_spec(const pt::ptree& tree) {
  BenchSpec b;
  b.base = read_run_spec(tree);
  b.methods = split_list(get_value<std::string>(tree, "bench.methods", ""));
  b.nx0 = parse_list<std::size_t>("bench.nx0", get_value<std::string>(tree, "bench.nx0", "10"));
  b.replicates = get_value<std::size_t>(tree, "bench.replicates", b.replicates);
  b.baseline = get_value<std::string>(tree, "bench.baseline", b.baseline);
  b.gold_standard_nx = get_value<std::size_t>(tree, "adapt.gold_standard_nx", 0);
  b.reference_length = get_value<std::size_t>(tree, "bench.reference_length", b.reference_length);
  if (b.methods.empty() || b.nx0.empty() || b.replicates == 0) throw config_error("bench grid is empty");
  if (std::find(b.methods.begin(), b.methods.end(), b.baseline) == b.methods.end()) {
    throw config_error("bench.baseline '" + b.baseline + "' is not in bench.methods");
  }
  for (const auto& m : b.methods) {
    const auto [s2, s3] = parse_method(m);
    smc2::AdaptPolicy p = b.base.smc.policy;
    p.stage2 = s2;
    p.stage3 = s3;
    try {
      p.validate();
    } catch (const std::invalid_argument& e) {
      throw config_error("method '" + m + "': " + e.what());
    }
    if (s2 == smc2::Stage2::fixed && b.gold_standard_nx == 0) {
      throw config_error("gold_standard needs adapt.gold_standard_nx");
    }
  }
  return b;
}

int cmd_bench(const std::string& config, std::optional<std::uint64_t> seed, const std::string& out, bool quiet) {
  BenchSpec b = read_bench_spec(load_tree(config));
  if (seed) b.base.smc.seed = *seed;
  if (!out.empty()) b.base.out = out;
  smc2::with_model(b.base.model, [&](const auto& model) {
    using M = std::decay_t<decltype(model)>;
    const smc2::Dataset data = load_data(model, b.base.data);
    std::vector<double> start(M::default_theta.begin(), M::default_theta.end());
    if (!b.base.data.theta.empty()) start = b.base.data.theta;

    smc2::harness::ChainOptions opt;
    opt.length = b.reference_length;
    smc2::Rng ref_rng = smc2::make_stream(b.base.smc.seed, 0, smc2::kCoordinatorStream - 1);
    const auto method = std::is_same_v<M, smc2::models::BrownianMotion> ? smc2::harness::ReferenceMethod::exact_mcmc
                                                                         : smc2::harness::ReferenceMethod::pmmh;
    if (!quiet) std::cerr << "reference chain of length " << opt.length << '\n';
    const auto reference = smc2::harness::reference_posterior_mean(model, data, method, start, opt, ref_rng,
                                                                   std::max<std::size_t>(b.gold_standard_nx, 1));

    std::vector<smc2::harness::RunInput> inputs;
    std::vector<std::size_t> nx_of;
    std::size_t baseline_index = 0;
    for (const std::string& m : b.methods) {
      const auto [s2, s3] = parse_method(m);
      const bool gs = s2 == smc2::Stage2::fixed;
      const std::vector<std::size_t> nx_grid = gs ? std::vector<std::size_t>{b.gold_standard_nx} : b.nx0;
      for (std::size_t nx0 : nx_grid) {
        double mse = 0.0;
        double tll = 0.0;
        for (std::size_t r = 0; r < b.replicates; ++r) {
          smc2::SmcConfig c = b.base.smc;
          c.policy.stage2 = s2;
          c.policy.stage3 = s3;
          c.nx0 = nx0;
          c.seed = b.base.smc.seed + r;
          c.on_stage = nullptr;
          const smc2::Ensemble e = smc2::run_smc2(model, data, c);
          const auto summary = smc2::summarize(model, e);
          mse += smc2::harness::mean_squared_error(summary.mean_unconstrained, reference.mean_unconstrained);
          tll += static_cast<double>(e.tll);
          if (!quiet) {
            std::cerr << m << " nx0=" << nx0 << " replicate " << r << ": tll=" << e.tll << " final Nx=" << e.nx
                      << '\n';
          }
        }
        const auto n = static_cast<double>(b.replicates);
        if (m == b.baseline) baseline_index = inputs.size();
        inputs.push_back({m, mse / n, static_cast<std::uint64_t>(std::llround(tll / n))});
        nx_of.push_back(nx0);
      }
    }
    const auto scores = smc2::harness::score_runs(inputs, baseline_index);
    fs::create_directories(b.base.out);
    std::ofstream f(b.base.out / "scores.csv", std::ios::binary);
    if (!f) throw std::runtime_error("cannot write scores.csv");
    f << "method,nx0,Z_MSE,Z_TLL,Z,mse,tll\n";
    for (std::size_t i = 0; i < scores.size(); ++i) {
      const auto& s = scores[i];
      f << s.method << ',' << nx_of[i] << ',' << smc2::format_double(s.z_mse) << ',' << smc2::format_double(s.z_tll)
        << ',' << smc2::format_double(s.z) << ',' << smc2::format_double(s.mse) << ',' << s.tll << '\n';
    }
  });
  return 0;
}

int cmd_simulate(const std::string& config, std::optional<std::uint64_t> seed, const std::string& out) {
  RunSpec spec = read_run_spec(load_tree(config));
  if (seed) spec.data.seed = *seed;
  const fs::path path = out.empty() ? spec.out / "data.csv" : fs::path(out);
  smc2::with_model(spec.model, [&](const auto& model) {
    DataSpec d = spec.data;
    d.path.clear();
    const smc2::Dataset data = load_data(model, d);
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    smc2::save_dataset(data, path.string());
  });
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adaptive SMC^2 with automatic tuning of the number of state particles"};
  app.require_subcommand(1);
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  bool quiet = false;

  auto add_common = [&](CLI::App* cmd, bool needs_config) {
    auto* opt = cmd->add_option("--config", config, "INI configuration file");
    if (needs_config) opt->required()->check(CLI::ExistingFile);
    cmd->add_option("--seed", seed, "overrides the configured seed");
    cmd->add_option("--out", out, "output directory (file for simulate)");
    cmd->add_flag("--quiet", quiet, "no progress output");
  };
  CLI::App* run = app.add_subcommand("run", "run SMC^2 and write trace.csv, samples.csv, summary.json");
  CLI::App* table1 = app.add_subcommand("table1", "print the candidate numbers of state particles");
  CLI::App* bench = app.add_subcommand("bench", "score a grid of methods against a baseline");
  CLI::App* simulate = app.add_subcommand("simulate", "simulate a dataset from the configured model");
  add_common(run, true);
  add_common(bench, true);
  add_common(simulate, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (run->parsed()) return cmd_run(config, seed, out, quiet);
    if (table1->parsed()) return cmd_table1(std::cout);
    if (bench->parsed()) return cmd_bench(config, seed, out, quiet);
    if (simulate->parsed()) return cmd_simulate(config, seed, out);
  } catch (const config_error& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
