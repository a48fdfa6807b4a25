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

#pragma once

#include <functional>
#include <span>
#include <vector>

namespace qvd {

struct QuadResult {
  double value = 0.0;
  double error = 0.0;
  bool converged = true;
};

/// Gauss-Legendre nodes and weights on [-1, 1], nodes ascending.
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// n-point rule by Newton iteration on the Legendre three-term recurrence.
/// Rules are cached per n; the returned reference stays valid.
const GaussRule& gauss_legendre(int n);

/// Adaptive 61-point Gauss-Kronrod on [a, b]. `converged` is false when the
/// error estimate exceeds max(abs_tol, rel_tol * |value|).
QuadResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                              double rel_tol = 1e-13, double abs_tol = 1e-15, int max_depth = 18);

/// Sums integrate_adaptive over consecutive segments [b_0, b_1], [b_1, b_2], ...
QuadResult integrate_piecewise(const std::function<double(double)>& f,
                               std::span<const double> breakpoints, double rel_tol = 1e-13,
                               double abs_tol = 1e-15);

/// A composite Gauss-Legendre node set on a real interval (panels given by breakpoints).
struct AxisRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// `points_per_panel`-point Gauss-Legendre on each panel [b_i, b_{i+1}].
AxisRule composite_rule(std::span<const double> breakpoints, int points_per_panel);

}  // namespace qvd
