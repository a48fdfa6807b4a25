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

#include "qvd/expansion.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "qvd/error.hpp"
#include "qvd/parallel.hpp"
#include "qvd/qnno.hpp"

namespace qvd {

namespace {

void check_order(const StateMap& f, int j, int divisor, const char* what) {
  if (j < 1) throw InvalidArgument(std::string(what) + ": j must be >= 1");
  if (j > 4) throw InvalidArgument(std::string(what) + ": derivatives beyond order 4 are not supported");
  const int m = f.declared_regularity().m;
  if (j > m / divisor) {
    std::ostringstream msg;
    msg << what << ": j=" << j << " exceeds the declared regularity m=" << m << " of '" << f.label() << "'";
    throw InvalidArgument(msg.str());
  }
}

void check_gamma(double gamma) {
  if (!(gamma > 0.0 && gamma <= 1.0)) throw InvalidArgument("expansion: gamma must lie in (0, 1]");
}

bool has_odd(std::span<const int> alpha) {
  for (int a : alpha) {
    if (a % 2 != 0) return true;
  }
  return false;
}

KernelSpec with_dim(KernelSpec spec, Index d) {
  spec.dim = static_cast<int>(d);
  return spec;
}

// Sum of `count` matrices produced by `term(i)`, evaluated on up to `threads`
// workers and reduced in index order.
template <typename Fn>
ComplexMatrix ordered_sum(std::size_t count, Index d, int threads, const Fn& term) {
  std::vector<ComplexMatrix> slots(count, ComplexMatrix::Zero(d, d));
  parallel_for(count, resolve_threads(threads), [&](std::size_t i) { slots[i] = term(i); });
  ComplexMatrix out = ComplexMatrix::Zero(d, d);
  for (const auto& s : slots) out += s;
  return out;
}

}  // namespace

ComplexMatrix deformed_commutator(const ComplexMatrix& a, const ComplexMatrix& b, double gamma) {
  if (a.rows() != b.rows() || a.cols() != b.cols() || a.rows() != a.cols()) {
    throw InvalidArgument("deformed_commutator: dimension mismatch");
  }
  const Complex phase = std::polar(1.0, std::numbers::pi * gamma);
  return a * b - phase * (b * a);
}

std::string to_string(MomentSource s) { return s == MomentSource::Exact ? "exact" : "paper"; }

MomentSource moment_source_from_string(const std::string& s) {
  if (s == "exact") return MomentSource::Exact;
  if (s == "paper") return MomentSource::Paper;
  throw InvalidArgument("unknown moment source '" + s + "'");
}

double multinomial(std::span<const int> alpha) {
  double out = std::tgamma(total_degree(alpha) + 1.0);
  for (int a : alpha) out /= std::tgamma(a + 1.0);
  return std::round(out);
}

std::vector<MultiIndex> multi_indices(int j, int d) {
  if (j == 0) return {MultiIndex(static_cast<std::size_t>(d), 0)};
  const SimplexLattice lattice(j, d);
  std::vector<MultiIndex> out;
  out.reserve(lattice.size());
  for (std::size_t i = 0; i < lattice.size(); ++i) {
    const auto k = lattice.point(i);
    out.emplace_back(k.begin(), k.end());
  }
  return out;
}

double moment_value(std::span<const int> alpha, double delta, int n, const KernelSpec& spec,
                    MomentSource source) {
  if (source == MomentSource::Paper) {
    return moment_paper(alpha, delta, static_cast<double>(n), static_cast<int>(alpha.size()));
  }
  return moment_exact(with_dim(spec, static_cast<Index>(alpha.size())), alpha, delta).value;
}

ComplexMatrix coeff_a(int j, const StateMap& f, const DensityOperator& rho, int n,
                      const KernelSpec& spec, const ExpansionOptions& opts) {
  check_order(f, j, 1, "coeff_a");
  const Index d = rho.dim();
  if (opts.source == MomentSource::Exact && j % 2 != 0) return ComplexMatrix::Zero(d, d);
  const DirectionBasis basis = DirectionBasis::from_density(rho);
  const auto alphas = multi_indices(j, static_cast<int>(d));
  const ComplexMatrix out = ordered_sum(alphas.size(), d, opts.threads, [&](std::size_t i) {
    const MultiIndex& alpha = alphas[i];
    if (opts.source == MomentSource::Exact && has_odd(alpha)) return ComplexMatrix::Zero(d, d).eval();
    const double mom = moment_value(alpha, 0.0, n, spec, opts.source);
    if (mom == 0.0) return ComplexMatrix::Zero(d, d).eval();
    return (multinomial(alpha) * mom *
            derivative_on_identity(f, rho.matrix(), alpha, basis, opts.identity_slots))
        .eval();
  });
  return out / std::tgamma(j + 1.0);
}

ComplexMatrix coeff_b(int j, const StateMap& f, const DensityOperator& rho, int n,
                      const KernelSpec& spec, double gamma, const ExpansionOptions& opts) {
  check_gamma(gamma);
  check_order(f, j, 2, "coeff_b");
  const Index d = rho.dim();
  const ComplexMatrix h = opts.marchaud_direction
                              ? *opts.marchaud_direction
                              : ComplexMatrix(rho.matrix() - ComplexMatrix::Identity(d, d) / static_cast<double>(d));
  if (h.rows() != d || h.cols() != d) throw InvalidArgument("coeff_b: Marchaud direction has the wrong shape");
  if (h.norm() == 0.0) return ComplexMatrix::Zero(d, d);
  const DirectionBasis basis = DirectionBasis::from_density(rho);
  // shared_ptr that does not own: the derivative map only lives for this call
  const StateMapPtr base(&f, [](const StateMap*) {});
  const auto alphas = multi_indices(j, static_cast<int>(d));
  const ComplexMatrix out = ordered_sum(alphas.size(), d, opts.threads, [&](std::size_t i) {
    const MultiIndex& alpha = alphas[i];
    if (opts.source == MomentSource::Exact && has_odd(alpha)) return ComplexMatrix::Zero(d, d).eval();
    const double mom = moment_value(alpha, gamma, n, spec, opts.source);
    if (mom == 0.0) return ComplexMatrix::Zero(d, d).eval();
    const DerivativeMap deriv(base, alpha, basis, opts.identity_slots);
    return (multinomial(alpha) * mom * marchaud_fd(deriv, rho.matrix(), h, gamma).value).eval();
  });
  return out / std::tgamma(gamma + 1.0);
}

ComplexMatrix coeff_c(int j, const StateMap& f, const DensityOperator& rho, int n,
                      const KernelSpec& spec, double gamma, const ExpansionOptions& opts) {
  check_gamma(gamma);
  check_order(f, j, 3, "coeff_c");
  const Index d = rho.dim();
  const int di = static_cast<int>(d);
  const DirectionBasis basis = DirectionBasis::from_density(rho);
  // L^(alpha) for every |alpha| <= j
  std::map<MultiIndex, ComplexMatrix> derivs;
  for (int order = 0; order <= j; ++order) {
    for (const auto& alpha : multi_indices(order, di)) {
      derivs[alpha] = order == 0 ? f.evaluate(rho.matrix())
                                 : derivative_on_identity(f, rho.matrix(), alpha, basis, opts.identity_slots);
    }
  }
  const auto pairs = multi_indices(j, 2 * di);
  const ComplexMatrix out = ordered_sum(pairs.size(), d, opts.threads, [&](std::size_t i) {
    const MultiIndex& ab = pairs[i];
    const MultiIndex alpha(ab.begin(), ab.begin() + di);
    const MultiIndex beta(ab.begin() + di, ab.end());
    MultiIndex sum(static_cast<std::size_t>(di));
    for (int k = 0; k < di; ++k) sum[static_cast<std::size_t>(k)] = alpha[static_cast<std::size_t>(k)] + beta[static_cast<std::size_t>(k)];
    if (opts.source == MomentSource::Exact && has_odd(sum)) return ComplexMatrix::Zero(d, d).eval();
    const double mom = moment_value(sum, 2.0 * gamma, n, spec, opts.source);
    if (mom == 0.0) return ComplexMatrix::Zero(d, d).eval();
    return (multinomial(ab) * mom * deformed_commutator(derivs.at(alpha), derivs.at(beta), gamma)).eval();
  });
  return out / (std::tgamma(j + 1.0) * std::tgamma(2.0 * gamma + 1.0));
}

ExpansionCoefficients expansion_coefficients(const StateMap& f, const DensityOperator& rho, int n,
                                             int m, double gamma, const KernelSpec& spec,
                                             const ExpansionOptions& opts) {
  check_gamma(gamma);
  if (m < 1) throw InvalidArgument("expansion_coefficients: m must be >= 1");
  const Regularity reg = f.declared_regularity();
  if (reg.m < m || (reg.m == m && reg.gamma < gamma)) {
    std::ostringstream msg;
    msg << "expansion_coefficients: '" << f.label() << "' declares regularity (" << reg.m << ", "
        << reg.gamma << "), below the requested (" << m << ", " << gamma << ")";
    throw InvalidArgument(msg.str());
  }
  ExpansionCoefficients c;
  c.n = n;
  c.gamma = gamma;
  c.source = opts.source;
  for (int j = 1; j <= std::min(m, 4); ++j) c.a[j] = coeff_a(j, f, rho, n, spec, opts);
  for (int j = 1; j <= m / 2; ++j) c.b[j] = coeff_b(j, f, rho, n, spec, gamma, opts);
  for (int j = 1; j <= m / 3; ++j) c.c[j] = coeff_c(j, f, rho, n, spec, gamma, opts);
  return c;
}

PredictedError predicted_error(const StateMap& f, const DensityOperator& rho, int n, int m,
                               double gamma, const KernelSpec& spec, const ExpansionOptions& opts) {
  PredictedError p;
  p.coefficients = expansion_coefficients(f, rho, n, m, gamma, spec, opts);
  p.partial_sum = ComplexMatrix::Zero(rho.dim(), rho.dim());
  auto add = [&](char kind, const std::map<int, ComplexMatrix>& coeffs, double shift) {
    for (const auto& [j, mat] : coeffs) {
      ExpansionTerm t;
      t.kind = kind;
      t.j = j;
      t.order = j + shift;
      t.contribution = mat / std::pow(static_cast<double>(n), t.order);
      t.norm = trace_norm(t.contribution);
      p.partial_sum += t.contribution;
      p.terms.push_back(std::move(t));
    }
  };
  add('a', p.coefficients.a, 0.0);
  add('b', p.coefficients.b, gamma);
  add('c', p.coefficients.c, 2.0 * gamma);
  return p;
}

RemainderConstant remainder_constant(int m, double gamma, int d) {
  if (m < 1 || !(gamma > 0.0 && gamma <= 1.0) || d < 1) {
    throw InvalidArgument("remainder_constant: need m >= 1, gamma in (0, 1], d >= 1");
  }
  RemainderConstant r{m, gamma, d, 0.0};
  const double pi = std::numbers::pi;
  r.value = std::pow(2.0, m + 3) * std::pow(static_cast<double>(d), 0.5 * m) * std::exp(pi * pi / 4.0) /
            std::tgamma(m + gamma + 1.0) * std::pow(1.0 + 1.0 / std::sqrt(2.0 * pi), m);
  return r;
}

OrderFit order_fit(std::span<const double> n, std::span<const double> error) {
  if (n.size() != error.size()) throw InvalidArgument("order_fit: n and error lengths differ");
  std::vector<double> x;
  std::vector<double> y;
  OrderFit fit;
  for (std::size_t i = 0; i < n.size(); ++i) {
    if (!(error[i] > 0.0) || !(n[i] > 0.0)) {
      ++fit.dropped;
      continue;
    }
    x.push_back(std::log(n[i]));
    y.push_back(std::log(error[i]));
  }
  if (x.size() < 3) {
    std::ostringstream msg;
    msg << "order_fit: " << x.size() << " positive entries left after dropping " << fit.dropped
        << "; need at least 3";
    throw InvalidArgument(msg.str());
  }
  const double k = static_cast<double>(x.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= k;
  my /= k;
  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) throw InvalidArgument("order_fit: all n are equal");
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r2 = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
  return fit;
}

}  // namespace qvd
