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

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qvd/kernel.hpp"
#include "qvd/linalg.hpp"
#include "qvd/statemaps.hpp"

namespace qvd {

/// AB - e^{i pi gamma} BA
ComplexMatrix deformed_commutator(const ComplexMatrix& a, const ComplexMatrix& b, double gamma);

enum class MomentSource { Exact, Paper };
std::string to_string(MomentSource s);
MomentSource moment_source_from_string(const std::string& s);

struct ExpansionOptions {
  MomentSource source = MomentSource::Exact;
  /// Differentiate with the identity in every slot instead of eigenprojectors.
  bool identity_slots = false;
  /// Direction of the Marchaud derivative in coeff_b; defaults to rho - I/d.
  std::optional<ComplexMatrix> marchaud_direction;
  int threads = 1;
};

/// j! / prod alpha_i!
double multinomial(std::span<const int> alpha);

/// All multi-indices of length d and total degree j, descending lexicographic.
std::vector<MultiIndex> multi_indices(int j, int d);

/// Scalar moment m_{alpha, delta} from the selected source, at lambda = spec.lambda
/// (exact) or log n (paper).
double moment_value(std::span<const int> alpha, double delta, int n, const KernelSpec& spec,
                    MomentSource source);

/// (1/j!) sum_{|alpha|=j} multinomial(alpha) L^(alpha)(rho) m_alpha.
ComplexMatrix coeff_a(int j, const StateMap& f, const DensityOperator& rho, int n,
                      const KernelSpec& spec, const ExpansionOptions& opts = {});

/// (1/Gamma(gamma+1)) sum_{|alpha|=j} multinomial(alpha) (Delta_gamma L^(alpha))(rho) m_{alpha,gamma}
/// with the Marchaud derivative taken along opts.marchaud_direction.
ComplexMatrix coeff_b(int j, const StateMap& f, const DensityOperator& rho, int n,
                      const KernelSpec& spec, double gamma, const ExpansionOptions& opts = {});

/// (1/(j! Gamma(2 gamma + 1))) sum_{|alpha|+|beta|=j} multinomial(alpha, beta)
/// [L^(alpha), L^(beta)]_gamma m_{alpha+beta, 2 gamma}; L^(0) = F(rho).
ComplexMatrix coeff_c(int j, const StateMap& f, const DensityOperator& rho, int n,
                      const KernelSpec& spec, double gamma, const ExpansionOptions& opts = {});

struct ExpansionCoefficients {
  std::map<int, ComplexMatrix> a;
  std::map<int, ComplexMatrix> b;
  std::map<int, ComplexMatrix> c;
  int n = 0;
  double gamma = 1.0;
  MomentSource source = MomentSource::Exact;
};

/// a_j for j = 1..min(m, 4), b_j for j = 1..floor(m/2), c_j for j = 1..floor(m/3).
ExpansionCoefficients expansion_coefficients(const StateMap& f, const DensityOperator& rho, int n,
                                             int m, double gamma, const KernelSpec& spec,
                                             const ExpansionOptions& opts = {});

struct ExpansionTerm {
  char kind = 'a';
  int j = 0;
  /// n power dividing the coefficient: j, j + gamma or j + 2 gamma.
  double order = 0.0;
  /// coefficient / n^order
  ComplexMatrix contribution;
  double norm = 0.0;
};

struct PredictedError {
  ComplexMatrix partial_sum;
  std::vector<ExpansionTerm> terms;
  ExpansionCoefficients coefficients;
};

/// sum_j a_j / n^j + sum_j b_j / n^(j+gamma) + sum_j c_j / n^(j+2 gamma).
PredictedError predicted_error(const StateMap& f, const DensityOperator& rho, int n, int m,
                               double gamma, const KernelSpec& spec,
                               const ExpansionOptions& opts = {});

struct RemainderConstant {
  int m = 0;
  double gamma = 0.0;
  int d = 0;
  double value = 0.0;
};

/// 2^(m+3) d^(m/2) e^(pi^2/4) / Gamma(m + gamma + 1) * (1 + 1/sqrt(2 pi))^m
RemainderConstant remainder_constant(int m, double gamma, int d);

struct OrderFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  /// Entries left out because error <= 0.
  int dropped = 0;
};

/// Least squares of log(error) against log(n). Needs at least three positive errors.
OrderFit order_fit(std::span<const double> n, std::span<const double> error);

}  // namespace qvd
