// Copyright 2026 The QVD Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cstdlib>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "qvd/parallel.hpp"
#include "qvd_harness/run.hpp"

namespace {

using namespace qvd::harness;

struct Common {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  int threads = 0;
};

void add_common(CLI::App* sub, Common& c, bool config_required) {
  auto* opt = sub->add_option("--config", c.config, "Experiment config (JSON, schema qvd.experiment/1)");
  if (config_required) opt->required();
  sub->add_option("--out", c.out, "Output root; overrides the config's output_dir");
  sub->add_option("--seed", c.seed, "Base seed; overrides seeds.base");
  sub->add_option("--threads", c.threads, "Worker threads (default: QVD_THREADS or 1)")->check(CLI::NonNegativeNumber);
}

ExperimentConfig load(const Common& c) {
  Overrides o;
  if (!c.out.empty()) o.out = c.out;
  o.seed = c.seed;
  return load_config(c.config, o);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qvd: quantum neural network operator laboratory"};
  app.require_subcommand(1);
  Common common;
  struct Entry {
    const char* name;
    const char* help;
    bool needs_config;
  };
  const Entry entries[] = {
      {"moments", "Exact vs asymptotic kernel moments (moments.csv)", false},
      {"approximate", "QNNO outputs on the configured n grid (approximation.json)", true},
      {"convergence", "Error curve, expansion terms and order fit (run_experiment)", true},
      {"romberg", "Romberg table (romberg.csv)", true},
      {"interpolate", "Channel geomean and spline path (interpolation.json)", true},
      {"clt-cov", "QCLT covariance form (clt_covariance.json)", true},
      {"report", "Every stage the config enables", true},
  };
  std::map<std::string, CLI::App*> subs;
  for (const auto& e : entries) {
    CLI::App* sub = app.add_subcommand(e.name, e.help);
    add_common(sub, common, e.needs_config);
    subs[e.name] = sub;
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return 2;
  }

  RunOptions opts;
  opts.threads = qvd::resolve_threads(common.threads);
  try {
    std::filesystem::path dir;
    if (subs["moments"]->parsed()) {
      if (common.config.empty()) {
        dir = run_moments_standalone(default_moments_section(), common.out.empty() ? "qvd_out" : common.out);
      } else {
        dir = run_moments(load(common), opts);
      }
    } else {
      const ExperimentConfig cfg = load(common);
      if (subs["approximate"]->parsed()) dir = run_approximate(cfg, opts);
      if (subs["convergence"]->parsed()) dir = run_experiment(cfg, opts);
      if (subs["romberg"]->parsed()) dir = run_romberg(cfg, opts);
      if (subs["interpolate"]->parsed()) dir = run_interpolate(cfg, opts);
      if (subs["clt-cov"]->parsed()) dir = run_clt_cov(cfg, opts);
      if (subs["report"]->parsed()) dir = run_report(cfg, opts);
    }
    std::cout << dir.string() << "\n";
    return 0;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const StageError& e) {
    std::cerr << "numerical failure in stage '" << e.stage() << "': " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure in stage 'setup': " << e.what() << "\n";
    return 3;
  }
}
