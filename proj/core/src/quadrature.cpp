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

#include "qvd/quadrature.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "qvd/error.hpp"

namespace qvd {

namespace {

GaussRule build_rule(int n) {
  GaussRule rule;
  rule.nodes.resize(static_cast<std::size_t>(n));
  rule.weights.resize(static_cast<std::size_t>(n));
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0;
      double p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
      }
      dp = n * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    // recompute the derivative at the converged node
    double p0 = 1.0;
    double p1 = 0.0;
    for (int j = 0; j < n; ++j) {
      const double p2 = p1;
      p1 = p0;
      p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
    }
    dp = n * (z * p0 - p1) / (z * z - 1.0);
    const double w = 2.0 / ((1.0 - z * z) * dp * dp);
    const auto lo = static_cast<std::size_t>(i);
    const auto hi = static_cast<std::size_t>(n - 1 - i);
    rule.nodes[lo] = -z;
    rule.nodes[hi] = z;
    rule.weights[lo] = w;
    rule.weights[hi] = w;
  }
  if (n % 2 == 1) rule.nodes[static_cast<std::size_t>(n / 2)] = 0.0;
  return rule;
}

}  // namespace

const GaussRule& gauss_legendre(int n) {
  if (n < 1) throw InvalidArgument("gauss_legendre: n must be >= 1");
  static std::mutex mu;
  static std::map<int, std::unique_ptr<GaussRule>> cache;
  std::lock_guard lock(mu);
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<GaussRule>(build_rule(n));
  return *slot;
}

QuadResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                              double rel_tol, double abs_tol, int max_depth) {
  using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
  double err = 0.0;
  const double value = GK::integrate(f, a, b, static_cast<unsigned>(max_depth), rel_tol, &err);
  QuadResult r;
  r.value = value;
  r.error = err;
  r.converged = std::isfinite(value) && err <= std::max(abs_tol, rel_tol * std::abs(value)) * 10.0;
  return r;
}

QuadResult integrate_piecewise(const std::function<double(double)>& f,
                               std::span<const double> breakpoints, double rel_tol, double abs_tol) {
  QuadResult total;
  for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
    const QuadResult part = integrate_adaptive(f, breakpoints[i], breakpoints[i + 1], rel_tol, abs_tol);
    total.value += part.value;
    total.error += part.error;
    total.converged = total.converged && part.converged;
  }
  return total;
}

AxisRule composite_rule(std::span<const double> breakpoints, int points_per_panel) {
  const GaussRule& g = gauss_legendre(points_per_panel);
  AxisRule rule;
  for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
    const double a = breakpoints[i];
    const double b = breakpoints[i + 1];
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    for (std::size_t k = 0; k < g.nodes.size(); ++k) {
      rule.nodes.push_back(mid + half * g.nodes[k]);
      rule.weights.push_back(half * g.weights[k]);
    }
  }
  return rule;
}

}  // namespace qvd
