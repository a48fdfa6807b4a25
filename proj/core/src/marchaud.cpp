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

#include <array>
#include <cmath>
#include <limits>
#include <sstream>

#include "qvd/error.hpp"
#include "qvd/quadrature.hpp"
#include "qvd/statemaps.hpp"

namespace qvd {

namespace {

constexpr int kHalvings = 24;
constexpr int kFinePoints = 16;
constexpr int kCoarsePoints = 10;

void check_gamma(double gamma) {
  if (!(gamma > 0.0 && gamma <= 1.0)) throw InvalidArgument("marchaud: gamma must lie in (0, 1]");
}

// Integrates g(t) / t^(1+gamma) over (0, t_max]. `Value` is double or ComplexMatrix;
// g(t) is F(x) - F(x - t h). Returns {value, error estimate}.
template <typename Value, typename G, typename Zero, typename Norm>
std::pair<Value, double> graded_integral(const G& g, double t_max, double gamma, Zero zero,
                                         Norm norm) {
  const GaussRule& fine = gauss_legendre(kFinePoints);
  const GaussRule& coarse = gauss_legendre(kCoarsePoints);
  Value total = zero();
  double err = 0.0;
  double hi = t_max;
  for (int k = 0; k < kHalvings; ++k) {
    const double lo = 0.5 * hi;
    const double half = 0.5 * (hi - lo);
    const double mid = 0.5 * (hi + lo);
    Value pf = zero();
    Value pc = zero();
    for (std::size_t i = 0; i < fine.nodes.size(); ++i) {
      const double t = mid + half * fine.nodes[i];
      pf += (half * fine.weights[i] * std::pow(t, -1.0 - gamma)) * g(t);
    }
    for (std::size_t i = 0; i < coarse.nodes.size(); ++i) {
      const double t = mid + half * coarse.nodes[i];
      pc += (half * coarse.weights[i] * std::pow(t, -1.0 - gamma)) * g(t);
    }
    total += pf;
    err += norm(pf - pc);
    hi = lo;
  }
  // innermost [0, a]: g(t) ~ g(a) t / a
  const Value ga = g(hi);
  const Value inner = (std::pow(hi, -gamma) / (1.0 - gamma)) * ga;
  total += inner;
  err += 0.5 * norm(inner);
  return {total, err};
}

}  // namespace

MarchaudResult marchaud_fd(const StateMap& f, const ComplexMatrix& rho, const ComplexMatrix& h,
                           double gamma, double t_max) {
  check_gamma(gamma);
  if (h.rows() != rho.rows() || h.cols() != rho.cols()) {
    throw InvalidArgument("marchaud_fd: direction dimension mismatch");
  }
  MarchaudResult r;
  if (h.norm() == 0.0) {
    r.value = ComplexMatrix::Zero(rho.rows(), rho.cols());
    return r;
  }
  if (gamma == 1.0) {
    const std::array<ComplexMatrix, 1> dirs{h};
    const FrechetResult d = frechet_fd_detailed(f, rho, dirs);
    r.value = d.value;
    r.error_estimate = d.error_estimate;
    return r;
  }
  const ComplexMatrix minus_h = -h;
  double feasible = max_feasible_step(rho, minus_h);
  if (!(feasible > 0.0)) throw NumericalError("marchaud_fd: infeasible direction");
  if (std::isinf(feasible)) feasible = 1.0 / operator_norm(h);
  if (t_max <= 0.0) {
    t_max = 0.9 * feasible;
  } else if (t_max > feasible) {
    std::ostringstream msg;
    msg << "marchaud_fd: t_max " << t_max << " exceeds the feasible step " << feasible;
    throw NumericalError(msg.str());
  }
  const ComplexMatrix f0 = f.evaluate(rho);
  auto g = [&](double t) -> ComplexMatrix { return f0 - f.evaluate(rho - t * h); };
  auto zero = [&] { return ComplexMatrix::Zero(rho.rows(), rho.cols()).eval(); };
  auto norm = [](const ComplexMatrix& m) { return m.cwiseAbs().maxCoeff(); };
  auto [value, err] = graded_integral<ComplexMatrix>(g, t_max, gamma, zero, norm);
  const double scale = gamma / std::tgamma(1.0 - gamma);
  r.value = scale * value;
  r.t_max = t_max;
  r.error_estimate = scale * err;
  if (!r.value.allFinite() || !std::isfinite(r.error_estimate)) {
    throw NumericalError("marchaud_fd: quadrature did not converge");
  }
  return r;
}

double marchaud_scalar(const std::function<double(double)>& f, double x, double gamma,
                       double lower) {
  check_gamma(gamma);
  if (!(x > lower)) throw InvalidArgument("marchaud_scalar: x must exceed the lower limit");
  if (gamma == 1.0) {
    const double step = std::cbrt(std::numeric_limits<double>::epsilon()) * std::max(1.0, std::abs(x));
    const double s = std::min(step, 0.5 * (x - lower));
    return (f(x + s) - f(x - s)) / (2.0 * s);
  }
  const double fx = f(x);
  const double span = x - lower;
  auto g = [&](double t) { return fx - f(x - t); };
  auto zero = [] { return 0.0; };
  auto norm = [](double v) { return std::abs(v); };
  const auto [value, err] = graded_integral<double>(g, span, gamma, zero, norm);
  (void)err;
  const double inv = 1.0 / std::tgamma(1.0 - gamma);
  return gamma * inv * value + fx * std::pow(span, -gamma) * inv;
}

}  // namespace qvd
