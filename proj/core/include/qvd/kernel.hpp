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

#include <span>
#include <string>
#include <vector>

namespace qvd {

/// Nonnegative integer exponents, one per coordinate.
using MultiIndex = std::vector<int>;

int total_degree(std::span<const int> alpha);
/// Dash-joined form used in CSV output, e.g. {2, 0} -> "2-0".
std::string format_multi_index(std::span<const int> alpha);

/// Parameters of the tanh-difference density: deformation q, bandwidth lambda, dimension.
struct KernelSpec {
  double q = 1.0;
  double lambda = 1.0;
  int dim = 1;

  /// lambda = log n, the default bandwidth schedule.
  static KernelSpec for_n(int n, int dim, double q = 1.0);
  /// Throws InvalidArgument unless q > 0, lambda > 0 and dim >= 1.
  void validate() const;
};

enum class DensityMode {
  /// (1/4) [G_q(x+1) - G_q(x-1)]
  Raw,
  /// (1/2) [M_q(x) + M_{1/q}(x)]; even in x for every q.
  Symmetric,
};

/// (e^{lx} - q e^{-lx}) / (e^{lx} + q e^{-lx}) evaluated as tanh(l x - log(q)/2).
double activation(const KernelSpec& spec, double x);

/// One-dimensional density. Evaluated from a sinh/cosh quotient in log space so
/// it stays nonnegative and accurate in the tails.
double density1d(const KernelSpec& spec, double x, DensityMode mode = DensityMode::Symmetric);

/// Product of symmetric one-dimensional factors. Requires x.size() == spec.dim.
double kernel_nd(const KernelSpec& spec, std::span<const double> x);

/// Half-width of the per-coordinate integration window: 1 + max(8, 40/lambda).
double tail_window(const KernelSpec& spec);

/// Integral of density1d over the real line (adaptive quadrature on the window).
double density_integral(const KernelSpec& spec, DensityMode mode = DensityMode::Symmetric);

struct FourierComparison {
  double numeric = 0.0;
  double paper_formula = 0.0;
  double deviation = 0.0;
  bool converged = true;
};

/// Numeric transform of the q = 1 kernel at frequency xi next to the
/// closed form prod sinh(u)/u * sech(u), u = pi xi_i / (2 lambda).
/// The deviation is reported, not asserted.
FourierComparison fourier_compare(const KernelSpec& spec, std::span<const double> xi);

struct MomentValue {
  MultiIndex alpha;
  double delta = 0.0;
  double value = 0.0;
  double quadrature_error_estimate = 0.0;
};

/// Integral of |x|_2^delta x^alpha kernel_nd(x). Exactly zero (no quadrature)
/// when any alpha_i is odd. delta == 0 uses separable adaptive quadrature;
/// delta > 0 uses a product composite Gauss-Legendre rule with about
/// `nodes_per_axis` nodes per axis and is limited to dim <= 3. The error
/// estimate is the change from halving the nodes per panel.
MomentValue moment_exact(const KernelSpec& spec, std::span<const int> alpha, double delta = 0.0,
                         int nodes_per_axis = 256);

/// Leading-order asymptotic moment formula at lambda = log n, returned as given:
///   delta == 0, |alpha| = 2r even: (-1)^r / (2r-1)!! * (pi / (2 log n))^r
///   delta == 0, |alpha| odd:       0
///   delta > 0:  Gamma((|alpha| + delta + dim)/2) / Gamma(dim/2) * (2 / log n)^((|alpha| + delta)/2)
double moment_paper(std::span<const int> alpha, double delta, double n, int dim);

struct AliasResult {
  double sum = 0.0;
  double deviation_from_one = 0.0;
  /// The unit support [y-1, y+1] is not inside the summation window.
  bool flagged = false;
};

/// sum_{k=-window}^{window} density1d(y - k), compensated summation in index order.
/// Terms are evaluated in extended precision and the sum is rounded once.
AliasResult lattice_alias(const KernelSpec& spec, double y, int window);

}  // namespace qvd
