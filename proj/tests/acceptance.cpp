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

// Acceptance suite: one PASS/FAIL line per criterion. With a numeric argument
// only that criterion runs; the exit status is nonzero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qvd/applications.hpp"
#include "qvd/channel.hpp"
#include "qvd/error.hpp"
#include "qvd/expansion.hpp"
#include "qvd/kernel.hpp"
#include "qvd/qnno.hpp"
#include "qvd/random.hpp"
#include "qvd/statemaps.hpp"
#include "qvd_harness/run.hpp"

namespace fs = std::filesystem;
using namespace qvd;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

ComplexMatrix random_hermitian(Index d, std::uint64_t seed) {
  CounterRng rng(seed);
  const ComplexMatrix g = complex_gaussian_matrix(d, d, rng);
  return 0.5 * (g + g.adjoint());
}

ComplexMatrix unit_hermitian(Index d, std::uint64_t seed) {
  const ComplexMatrix h = random_hermitian(d, seed);
  return h / h.norm();
}

ComplexMatrix random_pd(Index d, std::uint64_t seed) {
  CounterRng rng(seed);
  const ComplexMatrix g = complex_gaussian_matrix(d, d, rng);
  return g * g.adjoint() + 0.1 * ComplexMatrix::Identity(d, d);
}

// ---------------------------------------------------------------------------

Outcome kernel_normalization() {
  const auto t0 = Clock::now();
  double worst = 0.0;
  for (double lambda : {1.0, 2.0, std::log(10.0), std::log(100.0)}) {
    worst = std::max(worst, std::abs(density_integral(KernelSpec{1.0, lambda, 1}) - 1.0));
  }
  const double t = seconds_since(t0);
  return {worst < 1e-8 && t < 1.0, "max |int - 1| = " + fmt("%.3e", worst) + ", " + fmt("%.3f", t) + " s"};
}

Outcome parity() {
  int checked = 0;
  int nonzero = 0;
  for (int d = 1; d <= 3; ++d) {
    for (int deg = 1; deg <= 5; deg += 2) {
      for (const auto& alpha : multi_indices(deg, d)) {
        for (double lambda : {1.0, std::log(32.0), 8.0}) {
          ++checked;
          if (moment_exact(KernelSpec{1.0, lambda, d}, alpha).value != 0.0) ++nonzero;
        }
      }
    }
  }
  return {nonzero == 0, std::to_string(checked) + " odd moments, " + std::to_string(nonzero) + " not exactly 0"};
}

Outcome box_limit() {
  const double third = 1.0 / 3.0;
  const std::vector<double> lambdas{5.0, 10.0, 20.0, 40.0};
  std::vector<double> gaps;
  double at20 = 0.0;
  for (double l : lambdas) {
    const double m = moment_exact(KernelSpec{1.0, l, 1}, MultiIndex{2}).value;
    if (l == 20.0) at20 = m;
    gaps.push_back(std::abs(m - third));
  }
  bool monotone = true;
  for (std::size_t i = 1; i < gaps.size(); ++i) monotone = monotone && gaps[i] < gaps[i - 1];
  std::string detail = "m2(20) = " + fmt("%.6f", at20) + ", |m2 - 1/3| at 5,10,20,40:";
  for (double g : gaps) detail += " " + fmt("%.2e", g);
  return {at20 >= 0.30 && at20 <= 0.3334 && monotone, detail};
}

Outcome alias_identity() {
  bool ok = true;
  double worst = 0.0;
  std::string detail;
  for (double y : {0.0, 0.3, 0.49}) {
    double prev = std::numeric_limits<double>::infinity();
    for (int n : {32, 64, 128}) {
      const AliasResult r = lattice_alias(KernelSpec::for_n(n, 1), y, 64);
      worst = std::max(worst, r.deviation_from_one);
      ok = ok && !r.flagged && r.deviation_from_one < 1e-6 && r.deviation_from_one <= prev;
      prev = r.deviation_from_one;
      detail += fmt(" %.1e", r.deviation_from_one);
    }
  }
  return {ok, "max deviation " + fmt("%.3e", worst) + "; per (y, n):" + detail};
}

Outcome linearity_degeneracy() {
  double worst_fd = 0.0;
  double worst_a2 = 0.0;
  for (int i = 0; i < 20; ++i) {
    const Index d = i % 2 == 0 ? 2 : 3;
    const std::uint64_t seed = 1000 + static_cast<std::uint64_t>(i);
    const LinearChannelMap f(random_cptp(d, 2, seed));
    const DensityOperator rho = make_density(random_state(d, seed + 77));
    std::vector<ComplexMatrix> dirs;
    for (int k = 0; k < 3; ++k) dirs.push_back(unit_hermitian(d, seed * 31 + static_cast<std::uint64_t>(k)));
    const std::span<const ComplexMatrix> all(dirs);
    worst_fd = std::max(worst_fd, frechet_fd(f, rho.matrix(), all.first(2)).norm());
    worst_fd = std::max(worst_fd, frechet_fd(f, rho.matrix(), all).norm());
    const int n = 32;
    worst_a2 = std::max(worst_a2, coeff_a(2, f, rho, n, KernelSpec::for_n(n, static_cast<int>(d))).norm());
  }
  return {worst_fd < 1e-5 && worst_a2 < 1e-5,
          "unit directions; max ||D^2||, ||D^3|| = " + fmt("%.2e", worst_fd) + ", max ||a_2|| = " + fmt("%.2e", worst_a2)};
}

Outcome qnno_structure() {
  double worst_psd = 0.0;
  double worst_trace = 0.0;
  int runs = 0;
  bool constant_exact = true;
  for (const auto& entry : fs::directory_iterator(QVD_FIXTURE_DIR)) {
    if (entry.path().extension() != ".json") continue;
    const harness::ExperimentConfig cfg = harness::load_config(entry.path());
    const DensityOperator rho = cfg.build_state();
    const Index d = rho.dim();
    const StateMapPtr fixture_map = cfg.build_map();
    const auto* linear = dynamic_cast<const LinearChannelMap*>(fixture_map.get());
    const LinearChannelMap f(linear ? linear->channel() : random_cptp(d, 2, 4242));
    const ComplexMatrix c = random_hermitian(d, 555);
    const ConstantMap constant(c);
    for (int n : cfg.n_grid) {
      const KernelSpec spec = cfg.lambda_rule.spec_for(n, static_cast<int>(d), cfg.q);
      const ComplexMatrix out = qnno_apply(f, rho, n, spec, true);
      worst_psd = std::max(worst_psd, std::max(0.0, -min_eigenvalue(out)));
      worst_psd = std::max(worst_psd, hermiticity_deviation(out));
      worst_trace = std::max(worst_trace, std::abs(out.trace() - Complex{1.0, 0.0}));
      constant_exact = constant_exact && (qnno_apply(constant, rho, n, spec, true) == c);
      ++runs;
    }
  }
  return {runs > 0 && worst_psd <= 1e-10 && worst_trace <= 1e-12 && constant_exact,
          std::to_string(runs) + " runs; max negativity/hermiticity " + fmt("%.1e", worst_psd) +
              ", max |tr - 1| " + fmt("%.1e", worst_trace) + ", constants exact: " +
              (constant_exact ? "yes" : "no")};
}

Outcome convergence() {
  const auto t0 = Clock::now();
  const std::vector<double> p{0.6, 0.4};
  const DensityOperator rho = DensityOperator::diagonal(p);
  const PolynomialMap f(2);
  const std::vector<int> ns{8, 16, 32, 64, 128};
  const auto rows = error_curve(f, rho, ns, LambdaRule::log_n(), 1.0, true, 1);
  std::vector<double> x;
  std::vector<double> y;
  std::string errs;
  for (const auto& r : rows) {
    x.push_back(r.n);
    y.push_back(r.error);
    errs += fmt(" %.3e", r.error);
  }
  const OrderFit fit = order_fit(x, y);
  const double t = seconds_since(t0);
  return {fit.slope <= -1.5 && fit.r2 >= 0.95 && t < 30.0,
          "slope " + fmt("%.3f", fit.slope) + ", r2 " + fmt("%.3f", fit.r2) + ", " + fmt("%.2f", t) +
              " s; errors" + errs};
}

Outcome romberg_acceleration() {
  const std::vector<double> p{0.6, 0.4};
  const DensityOperator rho = DensityOperator::diagonal(p);
  const PolynomialMap f(2);
  const RombergTable tab = romberg(f, rho, 8, 4, 2);
  const double e40 = tab.E[4][0];
  const double e41 = tab.E[4][1];

  // injected F + C / n^2
  const ComplexMatrix limit = f.evaluate(rho.matrix());
  const ComplexMatrix c = random_hermitian(2, 9);
  std::vector<ComplexMatrix> column;
  for (int k = 0; k <= 4; ++k) {
    const double n = 8.0 * std::pow(2.0, k);
    column.push_back(limit + c / (n * n));
  }
  const RombergTable syn = romberg_from_sequence(column, 8, 2, limit);
  double worst = 0.0;
  for (int k = 1; k <= 4; ++k) worst = std::max(worst, syn.E[static_cast<std::size_t>(k)][1]);
  return {e41 <= e40 && worst <= 1e-12, "E[4][0] = " + fmt("%.3e", e40) + ", E[4][1] = " + fmt("%.3e", e41) +
                                            "; synthetic max E[k][1] = " + fmt("%.1e", worst)};
}

Outcome kubo_ando_suite() {
  double boundary = 0.0;
  double symmetry = 0.0;
  double commuting = 0.0;
  for (int i = 0; i < 100; ++i) {
    const Index d = 2 + i % 3;
    const std::uint64_t s = 500 + 3 * static_cast<std::uint64_t>(i);
    const ComplexMatrix a = random_pd(d, s);
    const ComplexMatrix b = random_pd(d, s + 1);
    const double t = (i % 9 + 1) / 10.0;
    if (i < 20) {
      boundary = std::max(boundary, (kubo_ando(a, b, 0.0) - a).cwiseAbs().maxCoeff());
      boundary = std::max(boundary, (kubo_ando(a, b, 1.0) - b).cwiseAbs().maxCoeff());
      symmetry = std::max(symmetry, (kubo_ando(a, b, t) - kubo_ando(b, a, 1.0 - t)).cwiseAbs().maxCoeff());
    }
    // commuting pair: shared eigenbasis, scalar oracle a^(1-t) b^t
    const ComplexMatrix u = random_unitary(d, s + 2);
    CounterRng rng(s + 3);
    RealVector ea(d);
    RealVector eb(d);
    for (Index k = 0; k < d; ++k) {
      ea(k) = 0.05 + 3.0 * rng.uniform();
      eb(k) = 0.05 + 3.0 * rng.uniform();
    }
    RealVector g(d);
    for (Index k = 0; k < d; ++k) g(k) = std::pow(ea(k), 1.0 - t) * std::pow(eb(k), t);
    auto build = [&](const RealVector& v) -> ComplexMatrix { return u * v.cast<Complex>().asDiagonal() * u.adjoint(); };
    commuting = std::max(commuting, (kubo_ando(build(ea), build(eb), t) - build(g)).cwiseAbs().maxCoeff());
  }
  return {boundary <= 1e-10 && symmetry <= 1e-10 && commuting <= 1e-8,
          "boundary " + fmt("%.1e", boundary) + ", symmetry " + fmt("%.1e", symmetry) + ", commuting " +
              fmt("%.1e", commuting)};
}

Outcome geomean_projection() {
  std::vector<double> dev;
  int passed = 0;
  for (int i = 0; i < 50; ++i) {
    const Channel c0 = random_cptp(2, 1 + i % 4, 7000 + 2 * static_cast<std::uint64_t>(i));
    const Channel c1 = random_cptp(2, 1 + (i + 1) % 4, 7001 + 2 * static_cast<std::uint64_t>(i));
    const double t = 0.1 + 0.8 * (i % 5) / 4.0;
    const InterpolationResult r = channel_geomean(c0, c1, t, true);
    dev.push_back(r.tp_deviation);
    if (verify_cptp(Channel::from_choi(r.mean_choi), 1e-8).pass) ++passed;
  }
  std::sort(dev.begin(), dev.end());
  return {passed == 50, std::to_string(passed) + "/50 projected pass; raw tp_deviation min " + fmt("%.2e", dev.front()) +
                            ", median " + fmt("%.2e", dev[25]) + ", max " + fmt("%.2e", dev.back())};
}

// ||(Delta (x) id)(|psi><psi|)||_1 built directly from Kraus operators.
double brute_force_diamond(const std::vector<ComplexMatrix>& k1, const std::vector<ComplexMatrix>& k2, Index d,
                           int samples, std::uint64_t seed) {
  CounterRng rng(seed);
  double best = 0.0;
  for (int s = 0; s < samples; ++s) {
    ComplexVector psi(d * d);
    for (Index i = 0; i < d * d; ++i) psi(i) = rng.complex_normal();
    psi.normalize();
    const ComplexMatrix proj = psi * psi.adjoint();
    ComplexMatrix out = ComplexMatrix::Zero(d * d, d * d);
    const ComplexMatrix id = ComplexMatrix::Identity(d, d);
    for (const auto& k : k1) {
      const ComplexMatrix big = kron(k, id);
      out += big * proj * big.adjoint();
    }
    for (const auto& k : k2) {
      const ComplexMatrix big = kron(k, id);
      out -= big * proj * big.adjoint();
    }
    const Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(0.5 * (out + out.adjoint()));
    best = std::max(best, es.eigenvalues().cwiseAbs().sum());
  }
  return best;
}

Outcome diamond_sandwich() {
  bool sandwich = true;
  for (int i = 0; i < 20; ++i) {
    const Index d = 2 + i % 2;
    const Channel a = random_cptp(d, 1 + i % 3, 9000 + static_cast<std::uint64_t>(i));
    const Channel b = i % 4 == 0 ? depolarizing_channel(d, 0.1 * (1 + i % 5)) : random_cptp(d, 2, 9500 + static_cast<std::uint64_t>(i));
    const DiamondEstimate e = diamond_distance(a, b);
    const double j1 = trace_norm(choi_matrix(a) - choi_matrix(b));
    sandwich = sandwich && e.value >= j1 / static_cast<double>(d) - 1e-12 && e.value <= j1 + 1e-12;
  }
  const Channel id = identity_channel(2);
  const Channel dep = depolarizing_channel(2, 0.2);
  const double est = diamond_distance(id, dep).value;
  const std::vector<ComplexMatrix> kid{ComplexMatrix::Identity(2, 2)};
  const double oracle = brute_force_diamond(kid, *convert_representation(dep, Representation::Kraus).kraus(), 2,
                                            100000, 31337);
  return {sandwich && std::abs(est - oracle) <= 0.005,
          "sandwich holds on 20 pairs: " + std::string(sandwich ? "yes" : "no") + "; estimate " + fmt("%.5f", est) +
              " vs brute force " + fmt("%.5f", oracle)};
}

Outcome remainder_constant_check() {
  const double pi = std::numbers::pi;
  const double hand = 16.0 * std::sqrt(2.0) * std::exp(pi * pi / 4.0) / 2.0 * (1.0 + 1.0 / std::sqrt(2.0 * pi));
  const double v = remainder_constant(1, 1.0, 2).value;
  const bool four_figures = std::abs(v - hand) / hand < 5e-5 && std::abs(v - 186.6) < 0.05;
  bool decreasing = true;
  for (int m = 1; m <= 4; ++m) {
    double prev = std::numeric_limits<double>::infinity();
    for (double g = 0.1; g <= 1.0001; g += 0.1) {
      const double c = remainder_constant(m, std::min(g, 1.0), 2).value;
      decreasing = decreasing && c < prev;
      prev = c;
    }
  }
  const bool dscale = std::abs(remainder_constant(1, 1.0, 1).value - v / std::sqrt(2.0)) < 1e-12 * v;
  return {four_figures && decreasing && dscale, "C(1,1,2) = " + fmt("%.4f", v) + " vs hand " + fmt("%.4f", hand) +
                                                    "; decreasing in gamma: " + (decreasing ? "yes" : "no") +
                                                    "; d^(m/2) scaling: " + (dscale ? "yes" : "no")};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

bool same_tree(const fs::path& a, const fs::path& b, std::string& why) {
  std::vector<std::string> names;
  for (const auto& e : fs::directory_iterator(a)) names.push_back(e.path().filename().string());
  std::size_t count_b = 0;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(b)) ++count_b;
  if (names.size() != count_b) {
    why = "file sets differ";
    return false;
  }
  for (const auto& n : names) {
    if (n == "timings.json") continue;
    if (slurp(a / n) != slurp(b / n)) {
      why = n + " differs";
      return false;
    }
  }
  return true;
}

Outcome determinism() {
  const fs::path root = fs::temp_directory_path() / "qvd_acceptance_determinism";
  fs::remove_all(root);
  int configs = 0;
  std::string why;
  bool ok = true;
  for (const auto& entry : fs::directory_iterator(QVD_FIXTURE_DIR)) {
    if (entry.path().extension() != ".json") continue;
    ++configs;
    std::vector<fs::path> dirs;
    for (const auto& [label, threads] : {std::pair{"a1", 1}, std::pair{"b1", 1}, std::pair{"c4", 4}}) {
      harness::Overrides o;
      o.out = root / label;
      const harness::ExperimentConfig cfg = harness::load_config(entry.path(), o);
      harness::RunOptions ro;
      ro.threads = threads;
      dirs.push_back(harness::run_report(cfg, ro));
    }
    for (std::size_t i = 1; i < dirs.size() && ok; ++i) {
      if (!same_tree(dirs[0], dirs[i], why)) {
        ok = false;
        why = entry.path().filename().string() + ": " + why;
      }
    }
  }
  fs::remove_all(root);
  return {ok && configs > 0, std::to_string(configs) + " fixtures, runs x2 at 1 thread and x1 at 4 threads" +
                                 (ok ? ": byte-identical" : ": " + why)};
}

Outcome marchaud_validation() {
  const double v = marchaud_scalar([](double t) { return t; }, 1.0, 0.5);
  const double oracle = 1.0 / std::tgamma(1.5);
  const std::vector<double> p{0.7, 0.3};
  const DensityOperator rho = DensityOperator::diagonal(p);
  const ConstantMap c(random_hermitian(2, 4));
  const ComplexMatrix h = rho.matrix() - 0.5 * ComplexMatrix::Identity(2, 2);
  bool zero = true;
  for (double g : {0.25, 0.5, 0.75}) zero = zero && (marchaud_fd(c, rho.matrix(), h, g).value.array() == Complex{0.0, 0.0}).all();
  return {std::abs(v - oracle) <= 1e-4 && zero, "power rule " + fmt("%.7f", v) + " vs " + fmt("%.7f", oracle) +
                                                   "; constant map exactly 0: " + (zero ? "yes" : "no")};
}

Outcome moments_report() {
  const harness::MomentsSection s = harness::default_moments_section();
  std::vector<std::string> failures;
  const std::string csv = harness::report_moments(s, &failures);
  std::istringstream in(csv);
  std::string header;
  std::getline(in, header);
  std::size_t rows = 0;
  std::size_t nan_rows = 0;
  for (std::string line; std::getline(in, line);) {
    ++rows;
    if (line.find("nan") != std::string::npos) ++nan_rows;
  }
  const std::size_t expected = s.alpha.size() * s.delta.size() * s.n.size();
  const bool ok = header == "alpha,delta,lambda,n,exact,paper,abs_diff,quad_err" && rows == expected && nan_rows == 0 &&
                  failures.empty();
  return {ok, std::to_string(rows) + "/" + std::to_string(expected) + " rows, " + std::to_string(nan_rows) +
                  " incomplete"};
}

struct Criterion {
  int id;
  const char* name;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria{
      {1, "Kernel normalization", kernel_normalization},
      {2, "Parity", parity},
      {3, "Box limit", box_limit},
      {4, "Alias identity", alias_identity},
      {5, "Linearity degeneracy", linearity_degeneracy},
      {6, "QNNO structure", qnno_structure},
      {7, "Convergence", convergence},
      {8, "Romberg acceleration", romberg_acceleration},
      {9, "Kubo-Ando suite", kubo_ando_suite},
      {10, "Geomean projection", geomean_projection},
      {11, "Diamond sandwich", diamond_sandwich},
      {12, "Remainder constant", remainder_constant_check},
      {13, "Determinism", determinism},
      {14, "Marchaud validation", marchaud_validation},
      {15, "Paper-vs-exact report", moments_report},
  };
  const int only = argc > 1 ? std::atoi(argv[1]) : 0;
  int failed = 0;
  for (const auto& c : criteria) {
    if (only != 0 && c.id != only) continue;
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::printf("[%s] %02d %s: %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
