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

#include "qvd/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <sstream>

#include "qvd/error.hpp"
#include "qvd/quadrature.hpp"

namespace qvd {

int total_degree(std::span<const int> alpha) {
  int s = 0;
  for (int a : alpha) s += a;
  return s;
}

std::string format_multi_index(std::span<const int> alpha) {
  std::string out;
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    if (i) out += '-';
    out += std::to_string(alpha[i]);
  }
  return out;
}

KernelSpec KernelSpec::for_n(int n, int dim, double q) {
  if (n < 2) throw InvalidArgument("KernelSpec::for_n: n must be >= 2 so that log n > 0");
  KernelSpec spec{q, std::log(static_cast<double>(n)), dim};
  spec.validate();
  return spec;
}

void KernelSpec::validate() const {
  if (!(q > 0.0) || !std::isfinite(q)) throw InvalidArgument("KernelSpec: q must be > 0");
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw InvalidArgument("KernelSpec: lambda must be > 0");
  }
  if (dim < 1) throw InvalidArgument("KernelSpec: dim must be >= 1");
}

double activation(const KernelSpec& spec, double x) {
  return std::tanh(spec.lambda * x - 0.5 * std::log(spec.q));
}

namespace {

double log_cosh(double u) {
  const double a = std::abs(u);
  return a + std::log1p(std::exp(-2.0 * a)) - std::numbers::ln2;
}

double log_sinh_positive(double v) {
  if (v < 20.0) return std::log(std::sinh(v));
  return v + std::log1p(-std::exp(-2.0 * v)) - std::numbers::ln2;
}

// (1/4) [tanh(u + lambda) - tanh(u - lambda)] with u = lambda x - log(q)/2,
// written as (1/4) sinh(2 lambda) / (cosh(u + lambda) cosh(u - lambda)).
double raw_density(double lambda, double log_q, double x) {
  const double u = lambda * x - 0.5 * log_q;
  const double lg = log_sinh_positive(2.0 * lambda) - log_cosh(u + lambda) - log_cosh(u - lambda);
  return 0.25 * std::exp(lg);
}

void check_alpha(const KernelSpec& spec, std::span<const int> alpha) {
  if (static_cast<int>(alpha.size()) != spec.dim) {
    throw InvalidArgument("multi-index length does not match kernel dimension");
  }
  for (int a : alpha) {
    if (a < 0) throw InvalidArgument("multi-index entries must be nonnegative");
  }
}

// Kernel mass sits in [-1, 1] shifted by at most |log q| / (2 lambda).
double mass_shift(const KernelSpec& spec) { return std::abs(std::log(spec.q)) / (2.0 * spec.lambda); }

void check_tail(const KernelSpec& spec) {
  const double w = tail_window(spec);
  if (1.0 + mass_shift(spec) + 2.0 > w) {
    throw InvalidArgument("kernel tail bound unattainable: |log q| / (2 lambda) exceeds the window");
  }
}

std::vector<double> breakpoints_1d(const KernelSpec& spec) {
  const double w = tail_window(spec);
  const double s = std::min(0.5, 6.0 / spec.lambda);
  const double c = mass_shift(spec);
  std::vector<double> pts{0.0, 1.0, -1.0, 1.0 + s + c, -1.0 - s - c, w, -w};
  if (c > 0.0) {
    for (double e : {1.0 - c, 1.0 + c}) {
      pts.push_back(e);
      pts.push_back(-e);
    }
  }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [](double a, double b) { return std::abs(a - b) < 1e-12; }),
            pts.end());
  return pts;
}

// Panels for the product rule on one axis, symmetric about 0.
std::vector<double> axis_breakpoints(const KernelSpec& spec) {
  const double w = tail_window(spec);
  const double s = std::min(0.5, 6.0 / spec.lambda) + mass_shift(spec);
  const double tail = w - (1.0 + s);
  std::vector<double> half{0.0, std::max(0.5, 1.0 - s), 1.0, 1.0 + s, 1.0 + s + tail / 16.0,
                           1.0 + s + tail / 4.0, w};
  std::vector<double> pts;
  for (auto it = half.rbegin(); it != half.rend(); ++it) {
    if (*it != 0.0) pts.push_back(-*it);
  }
  pts.insert(pts.end(), half.begin(), half.end());
  return pts;
}

QuadResult axis_moment(const KernelSpec& spec, int power) {
  const auto bp = breakpoints_1d(spec);
  return integrate_piecewise(
      [&](double x) { return std::pow(x, power) * density1d(spec, x); }, bp, 1e-14, 1e-16);
}

double product_moment(const KernelSpec& spec, std::span<const int> alpha, double delta,
                      int points_per_panel) {
  const auto bp = axis_breakpoints(spec);
  const AxisRule rule = composite_rule(bp, points_per_panel);
  const std::size_t m = rule.nodes.size();
  const int d = spec.dim;
  std::vector<std::vector<double>> wt(static_cast<std::size_t>(d), std::vector<double>(m));
  std::vector<double> sq(m);
  for (std::size_t k = 0; k < m; ++k) {
    const double x = rule.nodes[k];
    sq[k] = x * x;
    const double base = rule.weights[k] * density1d(spec, x);
    for (int i = 0; i < d; ++i) wt[static_cast<std::size_t>(i)][k] = base * std::pow(x, alpha[static_cast<std::size_t>(i)]);
  }
  const double hd = 0.5 * delta;
  double total = 0.0;
  if (d == 1) {
    for (std::size_t a = 0; a < m; ++a) total += wt[0][a] * std::pow(sq[a], hd);
  } else if (d == 2) {
    for (std::size_t a = 0; a < m; ++a) {
      double row = 0.0;
      for (std::size_t b = 0; b < m; ++b) row += wt[1][b] * std::pow(sq[a] + sq[b], hd);
      total += wt[0][a] * row;
    }
  } else {
    for (std::size_t a = 0; a < m; ++a) {
      double plane = 0.0;
      for (std::size_t b = 0; b < m; ++b) {
        const double sab = sq[a] + sq[b];
        double row = 0.0;
        for (std::size_t c = 0; c < m; ++c) row += wt[2][c] * std::pow(sab + sq[c], hd);
        plane += wt[1][b] * row;
      }
      total += wt[0][a] * plane;
    }
  }
  return total;
}

}  // namespace

double density1d(const KernelSpec& spec, double x, DensityMode mode) {
  const double lq = std::log(spec.q);
  if (lq == 0.0) return raw_density(spec.lambda, lq, std::abs(x));
  if (mode == DensityMode::Raw) return raw_density(spec.lambda, lq, x);
  x = std::abs(x);
  return 0.5 * (raw_density(spec.lambda, lq, x) + raw_density(spec.lambda, -lq, x));
}

double kernel_nd(const KernelSpec& spec, std::span<const double> x) {
  if (static_cast<int>(x.size()) != spec.dim) {
    std::ostringstream msg;
    msg << "kernel_nd: point has length " << x.size() << ", kernel dimension " << spec.dim;
    throw InvalidArgument(msg.str());
  }
  double v = 1.0;
  for (double xi : x) v *= density1d(spec, xi);
  return v;
}

double tail_window(const KernelSpec& spec) {
  return 1.0 + std::max(8.0, 40.0 / spec.lambda);
}

double density_integral(const KernelSpec& spec, DensityMode mode) {
  spec.validate();
  check_tail(spec);
  const auto bp = breakpoints_1d(spec);
  return integrate_piecewise([&](double x) { return density1d(spec, x, mode); }, bp, 1e-14, 1e-16)
      .value;
}

FourierComparison fourier_compare(const KernelSpec& spec, std::span<const double> xi) {
  spec.validate();
  if (spec.q != 1.0) throw InvalidArgument("fourier_compare: closed form is stated for q = 1 only");
  if (static_cast<int>(xi.size()) != spec.dim) {
    throw InvalidArgument("fourier_compare: frequency length does not match kernel dimension");
  }
  const auto bp = breakpoints_1d(spec);
  FourierComparison out;
  out.numeric = 1.0;
  out.paper_formula = 1.0;
  for (double f : xi) {
    // Finer panels for oscillatory integrands: about one panel per period.
    std::vector<double> pts(bp.begin(), bp.end());
    const double w = bp.back();
    const int extra = static_cast<int>(std::ceil(std::abs(f) * w / std::numbers::pi));
    for (int i = 1; i < extra; ++i) {
      const double x = w * static_cast<double>(i) / extra;
      pts.push_back(x);
      pts.push_back(-x);
    }
    std::sort(pts.begin(), pts.end());
    const QuadResult r =
        integrate_piecewise([&](double x) { return std::cos(f * x) * density1d(spec, x); }, pts,
                            1e-13, 1e-15);
    out.numeric *= r.value;
    out.converged = out.converged && r.converged;
    const double u = std::numbers::pi * f / (2.0 * spec.lambda);
    out.paper_formula *= (u == 0.0) ? 1.0 : std::sinh(u) / u / std::cosh(u);
  }
  out.deviation = std::abs(out.numeric - out.paper_formula);
  return out;
}

MomentValue moment_exact(const KernelSpec& spec, std::span<const int> alpha, double delta,
                         int nodes_per_axis) {
  spec.validate();
  check_alpha(spec, alpha);
  if (!(delta >= 0.0) || !std::isfinite(delta)) {
    throw InvalidArgument("moment_exact: delta must be >= 0");
  }
  MomentValue mv;
  mv.alpha.assign(alpha.begin(), alpha.end());
  mv.delta = delta;
  if (std::any_of(alpha.begin(), alpha.end(), [](int a) { return a % 2 != 0; })) {
    return mv;  // odd integrand
  }
  check_tail(spec);
  if (delta == 0.0) {
    std::map<int, QuadResult> per_power;
    for (int a : alpha) {
      if (!per_power.count(a)) per_power[a] = axis_moment(spec, a);
    }
    double value = 1.0;
    for (int a : alpha) value *= per_power[a].value;
    double err = 0.0;
    for (std::size_t i = 0; i < alpha.size(); ++i) {
      double others = 1.0;
      for (std::size_t j = 0; j < alpha.size(); ++j) {
        if (j != i) others *= std::abs(per_power[alpha[j]].value);
      }
      err += per_power[alpha[i]].error * others;
    }
    mv.value = value;
    mv.quadrature_error_estimate = err;
    return mv;
  }
  if (spec.dim > 3) {
    throw InvalidArgument("moment_exact: fractional moments are limited to dim <= 3");
  }
  const int panels = static_cast<int>(axis_breakpoints(spec).size()) - 1;
  const int per_panel = std::max(4, nodes_per_axis / panels);
  const double fine = product_moment(spec, alpha, delta, per_panel);
  const double coarse = product_moment(spec, alpha, delta, std::max(2, per_panel / 2));
  mv.value = fine;
  mv.quadrature_error_estimate = std::abs(fine - coarse);
  return mv;
}

double moment_paper(std::span<const int> alpha, double delta, double n, int dim) {
  if (!(n > 1.0)) throw InvalidArgument("moment_paper: n must exceed 1");
  if (dim < 1 || static_cast<int>(alpha.size()) != dim) {
    throw InvalidArgument("moment_paper: multi-index length must equal dim");
  }
  if (!(delta >= 0.0)) throw InvalidArgument("moment_paper: delta must be >= 0");
  const int deg = total_degree(alpha);
  const double logn = std::log(n);
  if (delta == 0.0) {
    if (deg % 2 != 0) return 0.0;
    const int r = deg / 2;
    double dfact = 1.0;  // (2r - 1)!!, with (-1)!! = 1
    for (int k = 2 * r - 1; k > 1; k -= 2) dfact *= k;
    const double sign = (r % 2 == 0) ? 1.0 : -1.0;
    return sign / dfact * std::pow(std::numbers::pi / (2.0 * logn), r);
  }
  const double s = static_cast<double>(deg) + delta;
  return std::exp(std::lgamma(0.5 * (s + dim)) - std::lgamma(0.5 * dim)) *
         std::pow(2.0 / logn, 0.5 * s);
}

AliasResult lattice_alias(const KernelSpec& spec, double y, int window) {
  spec.validate();
  if (spec.q != 1.0) throw InvalidArgument("lattice_alias: requires q = 1");
  if (window < 2) throw InvalidArgument("lattice_alias: window must be >= 2");
  // q = 1 terms and the compensated sum in long double
  const long double l = spec.lambda;
  long double sum = 0.0L;
  long double comp = 0.0L;
  for (int k = -window; k <= window; ++k) {
    const long double x = static_cast<long double>(y) - k;
    const long double v = 0.25L * (std::tanh(l * (x + 1.0L)) - std::tanh(l * (x - 1.0L)));
    const long double t = sum + v;
    comp += (std::fabs(sum) >= std::fabs(v)) ? (sum - t) + v : (v - t) + sum;
    sum = t;
  }
  AliasResult r;
  r.sum = static_cast<double>(sum + comp);
  r.deviation_from_one = std::abs(r.sum - 1.0);
  r.flagged = std::abs(y) + 1.0 > static_cast<double>(window);
  return r;
}

}  // namespace qvd
