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

#include "qvd_harness/run.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>

#include "qvd/applications.hpp"
#include "qvd/error.hpp"
#include "qvd/random.hpp"

namespace qvd::harness {

namespace fs = std::filesystem;

namespace {

RunContext open_context(const fs::path& root, const std::string& hash) {
  const fs::path dir = root / hash;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory '" + dir.string() + "': " + ec.message());
  return RunContext(dir, hash);
}

RunContext open_context(const ExperimentConfig& c) {
  RunContext ctx = open_context(c.output_dir, c.hash());
  Json canonical = c.source;
  canonical.erase("output_dir");
  ctx.write("config.json", canonical.dump(2) + "\n");
  return ctx;
}

void check_regularity(const StateMap& f, int m, double gamma) {
  const Regularity r = f.declared_regularity();
  if (r.m < m || (r.m == m && r.gamma < gamma)) {
    std::ostringstream msg;
    msg << "map '" << f.label() << "' declares regularity (" << r.m << ", " << r.gamma
        << "), below the configured (m, gamma) = (" << m << ", " << gamma << ")";
    throw ConfigError(msg.str());
  }
}

ExpansionOptions expansion_options(const ExperimentConfig& c, const RunOptions& o) {
  ExpansionOptions opts;
  opts.source = c.moment_source;
  opts.threads = o.threads;
  return opts;
}

void write_error_curve(RunContext& ctx, const std::vector<ErrorCurveRow>& rows) {
  std::string csv = "n,lambda,error_trace_norm,raw_weight_sum\n";
  for (const auto& r : rows) {
    csv += std::to_string(r.n) + "," + format_double(r.lambda) + "," + format_double(r.error) + "," +
           format_double(r.raw_sum) + "\n";
  }
  ctx.write("error_curve.csv", csv);
}

void write_order_fit(RunContext& ctx, const std::vector<ErrorCurveRow>& rows) {
  std::vector<double> n;
  std::vector<double> e;
  for (const auto& r : rows) {
    n.push_back(r.n);
    e.push_back(r.error);
  }
  Json j;
  j["points"] = rows.size();
  try {
    const OrderFit fit = order_fit(n, e);
    j["status"] = "ok";
    j["slope"] = fit.slope;
    j["intercept"] = fit.intercept;
    j["r2"] = fit.r2;
    j["dropped"] = fit.dropped;
  } catch (const qvd::InvalidArgument& err) {
    j["status"] = "skipped";
    j["warning"] = err.what();
    std::cerr << "warning: order fit skipped: " << err.what() << "\n";
  }
  ctx.write("order_fit.json", j.dump(2) + "\n");
}

void convergence(RunContext& ctx, const ExperimentConfig& c, const RunOptions& o) {
  const StateMapPtr f = c.build_map();
  const DensityOperator rho = c.build_state();
  check_regularity(*f, c.m, c.gamma);
  const auto rows = ctx.stage("error_curve", [&] {
    return error_curve(*f, rho, c.n_grid, c.lambda_rule, c.q, c.renormalize, o.threads);
  });
  write_error_curve(ctx, rows);
  ctx.stage("order_fit", [&] { write_order_fit(ctx, rows); });

  Json all = Json::array();
  std::string csv = "n,lambda,kind,j,order,norm,predicted_norm,measured_error\n";
  ctx.stage("expansion", [&] {
    const ComplexMatrix exact = f->evaluate(rho.matrix());
    for (int n : c.expansion_n) {
      const KernelSpec spec = c.lambda_rule.spec_for(n, c.dimension, c.q);
      const PredictedError p = predicted_error(*f, rho, n, c.m, c.gamma, spec, expansion_options(c, o));
      const double measured = trace_norm(qnno_apply(*f, rho, n, spec, c.renormalize, o.threads) - exact);
      const double predicted = trace_norm(p.partial_sum);
      Json terms = Json::array();
      for (const auto& t : p.terms) {
        terms.push_back({{"kind", std::string(1, t.kind)}, {"j", t.j}, {"order", t.order}, {"norm", t.norm},
                         {"matrix", matrix_to_json(t.contribution)}});
        csv += std::to_string(n) + "," + format_double(spec.lambda) + "," + t.kind + "," + std::to_string(t.j) +
               "," + format_double(t.order) + "," + format_double(t.norm) + "," + format_double(predicted) + "," +
               format_double(measured) + "\n";
      }
      all.push_back({{"n", n}, {"lambda", spec.lambda}, {"moment_source", to_string(c.moment_source)},
                     {"terms", terms}, {"predicted_norm", predicted}, {"measured_error", measured}});
    }
  });
  ctx.write("expansion.json", all.dump(2) + "\n");
  ctx.write("expansion.csv", csv);
}

void moments(RunContext& ctx, const MomentsSection& s) {
  std::vector<std::string> failures;
  const std::string csv = ctx.stage("moments", [&] { return report_moments(s, &failures); });
  for (const auto& f : failures) std::cerr << "warning: " << f << "\n";
  ctx.write("moments.csv", csv);
}

void approximate(RunContext& ctx, const ExperimentConfig& c, const RunOptions& o) {
  const StateMapPtr f = c.build_map();
  const DensityOperator rho = c.build_state();
  Json out = Json::array();
  ctx.stage("approximate", [&] {
    const ComplexMatrix exact = f->evaluate(rho.matrix());
    for (int n : c.n_grid) {
      const KernelSpec spec = c.lambda_rule.spec_for(n, c.dimension, c.q);
      const ComplexMatrix approx = qnno_apply(*f, rho, n, spec, c.renormalize, o.threads);
      out.push_back({{"n", n}, {"lambda", spec.lambda}, {"error_trace_norm", trace_norm(approx - exact)},
                     {"output", matrix_to_json(approx)}});
    }
  });
  Json j{{"map", f->label()}, {"rho", matrix_to_json(rho.matrix())},
         {"exact", matrix_to_json(f->evaluate(rho.matrix()))}, {"rows", out}};
  ctx.write("approximation.json", j.dump(2) + "\n");
}

void romberg_stage(RunContext& ctx, const ExperimentConfig& c, const RunOptions& o) {
  if (!c.romberg) throw ConfigError("romberg: the config has no 'romberg' section");
  const StateMapPtr f = c.build_map();
  const DensityOperator rho = c.build_state();
  const RombergTable tab = ctx.stage("romberg", [&] {
    return romberg(*f, rho, c.romberg->n0, c.romberg->K, c.romberg->M, c.lambda_rule, c.q, c.renormalize,
                   o.threads);
  });
  std::string csv = "k,l,n,error\n";
  for (int k = 0; k <= tab.K; ++k) {
    for (std::size_t l = 0; l < tab.E[static_cast<std::size_t>(k)].size(); ++l) {
      csv += std::to_string(k) + "," + std::to_string(l) + "," + std::to_string(tab.n[static_cast<std::size_t>(k)]) +
             "," + format_double(tab.E[static_cast<std::size_t>(k)][l]) + "\n";
    }
  }
  ctx.write("romberg.csv", csv);
}

void interpolate(RunContext& ctx, const ExperimentConfig& c) {
  if (!c.interpolate) throw ConfigError("interpolate: the config has no 'interpolate' section");
  const Channel c0 = channel_from_json(c.interpolate->c0, "interpolate.c0");
  const Channel c1 = channel_from_json(c.interpolate->c1, "interpolate.c1");
  Json rows = Json::array();
  ctx.stage("interpolate", [&] {
    for (double t : c.interpolate->t) {
      const InterpolationResult raw = channel_geomean(c0, c1, t, false);
      const InterpolationResult geo = channel_geomean(c0, c1, t, c.interpolate->project);
      const CptpReport check = verify_cptp(Channel::from_choi(geo.mean_choi), 1e-8);
      const InterpolationResult spline =
          spline_path(c0, c1, t, c.lambda_rule, c.q, c.interpolate->project, derive_seed(c.seeds.base, 7));
      rows.push_back({{"t", t},
                      {"geomean",
                       {{"tp_deviation", raw.tp_deviation},
                        {"regularization", raw.regularization},
                        {"projected", geo.projected},
                        {"verify_cptp_pass", check.pass},
                        {"min_choi_eigenvalue", check.min_choi_eigenvalue},
                        {"projected_tp_deviation", check.tp_deviation},
                        {"mean_choi", matrix_to_json(geo.mean_choi)}}},
                      {"spline",
                       {{"n0", spline.n0},
                        {"n1", spline.n1},
                        {"tp_deviation", spline.tp_deviation},
                        {"projected", spline.projected},
                        {"regularization", spline.regularization},
                        {"refit_residual", spline.refit_residual},
                        {"refit_flagged", spline.refit_flagged},
                        {"psd_clip", spline.psd_clip},
                        {"distance_to_geodesic", spline.distance_to_geodesic},
                        {"mean_choi", matrix_to_json(spline.mean_choi)}}}});
    }
  });
  ctx.write("interpolation.json", rows.dump(2) + "\n");
}

void clt_cov(RunContext& ctx, const ExperimentConfig& c, const RunOptions& o) {
  const StateMapPtr f = c.build_map();
  const DensityOperator rho = c.build_state();
  if (f->declared_regularity().m < 2) throw ConfigError("clt-cov: map must declare m >= 2");
  Json rows = Json::array();
  ctx.stage("clt_cov", [&] {
    for (int n : c.expansion_n) {
      const KernelSpec spec = KernelSpec::for_n(n, c.dimension, c.q);
      const ComplexMatrix sigma = qclt_covariance(*f, rho, spec, expansion_options(c, o));
      rows.push_back({{"n", n}, {"lambda", spec.lambda}, {"hermiticity_deviation", hermiticity_deviation(sigma)},
                      {"matrix", matrix_to_json(sigma)}});
    }
  });
  ctx.write("clt_covariance.json", rows.dump(2) + "\n");
}

}  // namespace

RunContext::RunContext(fs::path dir, std::string hash) : dir_(std::move(dir)), hash_(std::move(hash)) {}

void RunContext::write(const std::string& name, const std::string& content) { write_file_atomic(dir_ / name, content); }

void RunContext::finish() {
  std::vector<std::string> names;
  for (const auto& entry : fs::directory_iterator(dir_)) {
    if (!entry.is_regular_file()) continue;
    const std::string name = entry.path().filename().string();
    if (name == "manifest.json" || name == "timings.json" || name.ends_with(".tmp")) continue;
    names.push_back(name);
  }
  std::sort(names.begin(), names.end());
  Json files = Json::object();
  for (const auto& name : names) {
    std::ifstream in(dir_ / name, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    files[name] = hex64(fnv1a64(buf.str()));
  }
  Json manifest{{"schema", "qvd.manifest/1"},
                {"config_hash", hash_},
                {"version", std::string(kVersion)},
                {"files", files},
                {"timings_file", "timings.json"}};
  write("manifest.json", manifest.dump(2) + "\n");
  Json t = Json::object();
  for (const auto& [k, v] : timings_) t[k] = v;
  write("timings.json", Json{{"wall_clock_seconds", t}}.dump(2) + "\n");
}

std::string report_moments(const MomentsSection& s, std::vector<std::string>* failures) {
  std::string csv = "alpha,delta,lambda,n,exact,paper,abs_diff,quad_err\n";
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (const auto& alpha : s.alpha) {
    const int d = static_cast<int>(alpha.size());
    for (double delta : s.delta) {
      for (int n : s.n) {
        std::vector<double> lambdas = s.lambda;
        if (lambdas.empty()) lambdas.push_back(std::log(static_cast<double>(n)));
        for (double lambda : lambdas) {
          double exact = nan;
          double quad_err = nan;
          double paper = nan;
          try {
            const MomentValue mv = moment_exact(KernelSpec{1.0, lambda, d}, alpha, delta);
            exact = mv.value;
            quad_err = mv.quadrature_error_estimate;
          } catch (const qvd::Error& e) {
            if (failures) failures->push_back("alpha=" + format_multi_index(alpha) + " delta=" + format_double(delta) + ": " + e.what());
          }
          try {
            paper = moment_paper(alpha, delta, static_cast<double>(n), d);
          } catch (const qvd::Error& e) {
            if (failures) failures->push_back("alpha=" + format_multi_index(alpha) + " paper: " + e.what());
          }
          csv += format_multi_index(alpha) + "," + format_double(delta) + "," + format_double(lambda) + "," +
                 std::to_string(n) + "," + format_double(exact) + "," + format_double(paper) + "," +
                 format_double(std::abs(exact - paper)) + "," + format_double(quad_err) + "\n";
        }
      }
    }
  }
  return csv;
}

MomentsSection default_moments_section() {
  MomentsSection s;
  for (int deg = 0; deg <= 4; ++deg) s.alpha.push_back({deg});
  for (int deg = 0; deg <= 4; ++deg) {
    for (const auto& a : multi_indices(deg, 2)) s.alpha.push_back(a);
  }
  s.delta = {0.0, 0.5, 1.0};
  s.n = {10, 100, 1000};
  return s;
}

fs::path run_experiment(const ExperimentConfig& c, const RunOptions& o) {
  RunContext ctx = open_context(c);
  convergence(ctx, c, o);
  ctx.finish();
  return ctx.dir();
}

fs::path run_moments(const ExperimentConfig& c, const RunOptions&) {
  RunContext ctx = open_context(c);
  moments(ctx, c.moments ? *c.moments : default_moments_section());
  ctx.finish();
  return ctx.dir();
}

fs::path run_moments_standalone(const MomentsSection& s, const fs::path& out) {
  Json key{{"alpha", s.alpha}, {"delta", s.delta}, {"lambda", s.lambda}, {"n", s.n}};
  RunContext ctx = open_context(out, hex64(fnv1a64(key.dump())));
  moments(ctx, s);
  ctx.finish();
  return ctx.dir();
}

fs::path run_approximate(const ExperimentConfig& c, const RunOptions& o) {
  RunContext ctx = open_context(c);
  approximate(ctx, c, o);
  ctx.finish();
  return ctx.dir();
}

fs::path run_romberg(const ExperimentConfig& c, const RunOptions& o) {
  if (!c.romberg) throw ConfigError("romberg: the config has no 'romberg' section");
  RunContext ctx = open_context(c);
  romberg_stage(ctx, c, o);
  ctx.finish();
  return ctx.dir();
}

fs::path run_interpolate(const ExperimentConfig& c, const RunOptions&) {
  if (!c.interpolate) throw ConfigError("interpolate: the config has no 'interpolate' section");
  RunContext ctx = open_context(c);
  interpolate(ctx, c);
  ctx.finish();
  return ctx.dir();
}

fs::path run_clt_cov(const ExperimentConfig& c, const RunOptions& o) {
  RunContext ctx = open_context(c);
  clt_cov(ctx, c, o);
  ctx.finish();
  return ctx.dir();
}

fs::path run_report(const ExperimentConfig& c, const RunOptions& o) {
  RunContext ctx = open_context(c);
  convergence(ctx, c, o);
  approximate(ctx, c, o);
  if (c.moments) moments(ctx, *c.moments);
  if (c.romberg) romberg_stage(ctx, c, o);
  if (c.interpolate) interpolate(ctx, c);
  if (c.build_map()->declared_regularity().m >= 2) clt_cov(ctx, c, o);
  ctx.finish();
  return ctx.dir();
}

}  // namespace qvd::harness
