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
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qvd/channel.hpp"
#include "qvd/kernel.hpp"
#include "qvd/linalg.hpp"

namespace qvd {

/// Declared smoothness class (m bounded derivatives, gamma-Hoelder m-th derivative).
struct Regularity {
  int m = 0;
  double gamma = 1.0;
};

/// A (possibly nonlinear) map from states to matrices. Implementations are
/// immutable and deterministic. Arguments are Hermitian matrices close to the
/// state space (finite-difference stencils leave unit trace).
class StateMap {
 public:
  virtual ~StateMap() = default;

  virtual ComplexMatrix evaluate(const ComplexMatrix& rho) const = 0;
  virtual Regularity declared_regularity() const = 0;
  virtual std::string label() const = 0;
  /// True for maps that are undefined on singular states.
  virtual bool interior_only() const { return false; }
};

using StateMapPtr = std::shared_ptr<const StateMap>;

class LinearChannelMap final : public StateMap {
 public:
  explicit LinearChannelMap(Channel channel) : channel_(std::move(channel)) {}

  ComplexMatrix evaluate(const ComplexMatrix& rho) const override {
    return apply_channel(channel_, rho);
  }
  Regularity declared_regularity() const override { return {4, 1.0}; }
  std::string label() const override { return "linear"; }
  const Channel& channel() const { return channel_; }

 private:
  Channel channel_;
};

/// rho -> f(rho) through the spectral calculus.
class SpectralFunctionMap final : public StateMap {
 public:
  SpectralFunctionMap(std::string name, std::function<double(double)> f, Regularity reg,
                      bool interior_only = false)
      : name_(std::move(name)), f_(std::move(f)), reg_(reg), interior_only_(interior_only) {}

  ComplexMatrix evaluate(const ComplexMatrix& rho) const override;
  Regularity declared_regularity() const override { return reg_; }
  std::string label() const override { return "spectral:" + name_; }
  bool interior_only() const override { return interior_only_; }

 private:
  std::string name_;
  std::function<double(double)> f_;
  Regularity reg_;
  bool interior_only_;
};

/// Known spectral functions: sqrt, log, exp, tanh, entropy (x log x), power
/// (x^exponent, exponent > 0). Small negative eigenvalues (>= -1e-12) from
/// round-off are treated as zero where the function needs x >= 0.
std::shared_ptr<SpectralFunctionMap> make_spectral_map(const std::string& name,
                                                       double exponent = 1.0);

/// rho -> scale * rho^power (power 0 gives the constant scale * I).
class PolynomialMap final : public StateMap {
 public:
  explicit PolynomialMap(int power, double scale = 1.0);

  ComplexMatrix evaluate(const ComplexMatrix& rho) const override;
  Regularity declared_regularity() const override { return {4, 1.0}; }
  std::string label() const override { return "polynomial:" + std::to_string(power_); }
  int power() const { return power_; }

 private:
  int power_;
  double scale_;
};

/// rho -> |rho - rho0|^gamma through the spectral calculus.
class HolderTestMap final : public StateMap {
 public:
  HolderTestMap(ComplexMatrix reference, double gamma);
  HolderTestMap(ComplexMatrix reference, double gamma, Regularity declared);

  ComplexMatrix evaluate(const ComplexMatrix& rho) const override;
  Regularity declared_regularity() const override { return declared_; }
  std::string label() const override { return "holder"; }
  double gamma() const { return gamma_; }

 private:
  ComplexMatrix reference_;
  double gamma_;
  Regularity declared_;
};

class ConstantMap final : public StateMap {
 public:
  explicit ConstantMap(ComplexMatrix value) : value_(std::move(value)) {}

  ComplexMatrix evaluate(const ComplexMatrix& rho) const override;
  Regularity declared_regularity() const override { return {4, 1.0}; }
  std::string label() const override { return "constant"; }

 private:
  ComplexMatrix value_;
};

/// Pointwise combinations: Sum gives sum_i w_i F_i(rho); Product gives
/// (prod_i w_i) F_1(rho) F_2(rho) ... in term order.
class ScaledCompositeMap final : public StateMap {
 public:
  enum class Op { Sum, Product };
  using Term = std::pair<Complex, StateMapPtr>;

  ScaledCompositeMap(Op op, std::vector<Term> terms);

  ComplexMatrix evaluate(const ComplexMatrix& rho) const override;
  Regularity declared_regularity() const override;
  std::string label() const override;
  bool interior_only() const override;

 private:
  Op op_;
  std::vector<Term> terms_;
};

/// Eigenprojector directions E_j = |e_j><e_j| of a reference state; multi-index
/// coordinate j refers to E_j.
struct DirectionBasis {
  std::vector<ComplexMatrix> projectors;

  static DirectionBasis from_density(const DensityOperator& rho);
  Index dim() const { return static_cast<Index>(projectors.size()); }
  /// Throws InvalidArgument unless the projectors are orthogonal and sum to I.
  void validate(double tol = 1e-9) const;
};

/// Largest t >= 0 with rho + t h positive semidefinite (rho positive definite);
/// +infinity when every t works.
double max_feasible_step(const ComplexMatrix& rho, const ComplexMatrix& h);

struct FrechetResult {
  ComplexMatrix value;
  double step = 0.0;
  /// Max-entry change between the stencil at `step` and at `step / 2`.
  double error_estimate = 0.0;
  bool refined = false;
};

/// Mixed central finite difference of D^j F(rho)[h_1, ..., h_j], j <= 4.
/// Directions are normalized internally; the step is eps^(1/(j+2)) * ||rho||_inf
/// with Richardson refinement when the halved stencil disagrees by more than 1e-5.
FrechetResult frechet_fd_detailed(const StateMap& f, const ComplexMatrix& rho,
                                  std::span<const ComplexMatrix> dirs);
ComplexMatrix frechet_fd(const StateMap& f, const ComplexMatrix& rho,
                         std::span<const ComplexMatrix> dirs);

/// D^alpha F(rho) along E_j repeated alpha_j times. With `identity_slots`, every
/// slot receives the identity instead.
ComplexMatrix derivative_on_identity(const StateMap& f, const ComplexMatrix& rho,
                                     std::span<const int> alpha, const DirectionBasis& basis,
                                     bool identity_slots = false);

/// rho' -> D^alpha F(rho') with a fixed direction basis.
class DerivativeMap final : public StateMap {
 public:
  DerivativeMap(StateMapPtr base, MultiIndex alpha, DirectionBasis basis,
                bool identity_slots = false);

  ComplexMatrix evaluate(const ComplexMatrix& rho) const override;
  Regularity declared_regularity() const override;
  std::string label() const override { return "derivative(" + base_->label() + ")"; }

 private:
  StateMapPtr base_;
  MultiIndex alpha_;
  DirectionBasis basis_;
  bool identity_slots_;
};

struct MarchaudResult {
  ComplexMatrix value;
  /// Upper integration limit actually used (the line leaves the state space beyond it).
  double t_max = 0.0;
  double error_estimate = 0.0;
};

/// (gamma / Gamma(1 - gamma)) * integral_0^{t_max} [F(rho) - F(rho - t h)] / t^(1+gamma) dt
/// by Gauss-Legendre on geometrically graded panels toward t = 0, with a
/// linear model on the innermost panel. t_max <= 0 selects 0.9 times the largest
/// feasible step. gamma == 1 returns the first directional derivative (the limit).
MarchaudResult marchaud_fd(const StateMap& f, const ComplexMatrix& rho, const ComplexMatrix& h,
                           double gamma, double t_max = 0.0);

/// Scalar Marchaud derivative at x of f supported on [lower, inf) and extended by
/// zero below `lower`: the same graded quadrature on [0, x - lower] plus the
/// closed-form tail f(x) (x - lower)^(-gamma) / Gamma(1 - gamma).
double marchaud_scalar(const std::function<double(double)>& f, double x, double gamma,
                       double lower = 0.0);

struct TaylorResidual {
  double residual_norm = 0.0;
  double h_norm = 0.0;
};

/// || F(rho + h) - sum_{j<=m} D^j F(rho)[h,...,h] / j! ||_1 and ||h||_1; m <= 3.
TaylorResidual taylor_residual(const StateMap& f, const DensityOperator& rho,
                               const ComplexMatrix& h, int m);

}  // namespace qvd
