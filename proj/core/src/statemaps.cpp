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

#include "qvd/statemaps.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "qvd/error.hpp"

namespace qvd {

namespace {

constexpr double kRoundoffFloor = 1e-12;

double nonneg(double x) {
  if (x < -kRoundoffFloor) return std::numeric_limits<double>::quiet_NaN();
  return std::max(x, 0.0);
}

}  // namespace

ComplexMatrix SpectralFunctionMap::evaluate(const ComplexMatrix& rho) const {
  return spectral_apply(f_, rho);
}

std::shared_ptr<SpectralFunctionMap> make_spectral_map(const std::string& name, double exponent) {
  const Regularity smooth{4, 1.0};
  if (name == "sqrt") {
    return std::make_shared<SpectralFunctionMap>(
        name, [](double x) { return std::sqrt(nonneg(x)); }, smooth);
  }
  if (name == "log") {
    return std::make_shared<SpectralFunctionMap>(
        name, [](double x) { return x > 0.0 ? std::log(x) : std::numeric_limits<double>::quiet_NaN(); },
        smooth, true);
  }
  if (name == "exp") {
    return std::make_shared<SpectralFunctionMap>(name, [](double x) { return std::exp(x); }, smooth);
  }
  if (name == "tanh") {
    return std::make_shared<SpectralFunctionMap>(name, [](double x) { return std::tanh(x); },
                                                 smooth);
  }
  if (name == "entropy") {
    return std::make_shared<SpectralFunctionMap>(
        name,
        [](double x) {
          const double y = nonneg(x);
          return y > 0.0 ? y * std::log(y) : y;
        },
        smooth);
  }
  if (name == "power") {
    if (!(exponent > 0.0)) throw InvalidArgument("power spectral map needs exponent > 0");
    return std::make_shared<SpectralFunctionMap>(
        "power(" + std::to_string(exponent) + ")",
        [exponent](double x) { return std::pow(nonneg(x), exponent); }, smooth);
  }
  throw InvalidArgument("unknown spectral function '" + name + "'");
}

PolynomialMap::PolynomialMap(int power, double scale) : power_(power), scale_(scale) {
  if (power < 0) throw InvalidArgument("PolynomialMap: power must be >= 0");
}

ComplexMatrix PolynomialMap::evaluate(const ComplexMatrix& rho) const {
  ComplexMatrix out = ComplexMatrix::Identity(rho.rows(), rho.cols());
  for (int i = 0; i < power_; ++i) out = out * rho;
  return scale_ * out;
}

HolderTestMap::HolderTestMap(ComplexMatrix reference, double gamma)
    : HolderTestMap(std::move(reference), gamma, Regularity{0, gamma}) {}

HolderTestMap::HolderTestMap(ComplexMatrix reference, double gamma, Regularity declared)
    : reference_(std::move(reference)), gamma_(gamma), declared_(declared) {
  if (!(gamma > 0.0 && gamma <= 1.0)) throw InvalidArgument("HolderTestMap: gamma must lie in (0, 1]");
}

ComplexMatrix HolderTestMap::evaluate(const ComplexMatrix& rho) const {
  if (rho.rows() != reference_.rows() || rho.cols() != reference_.cols()) {
    throw InvalidArgument("HolderTestMap: dimension mismatch");
  }
  const double g = gamma_;
  return spectral_apply([g](double x) { return std::pow(std::abs(x), g); }, rho - reference_);
}

ComplexMatrix ConstantMap::evaluate(const ComplexMatrix& rho) const {
  if (rho.rows() != value_.rows()) throw InvalidArgument("ConstantMap: dimension mismatch");
  return value_;
}

ScaledCompositeMap::ScaledCompositeMap(Op op, std::vector<Term> terms)
    : op_(op), terms_(std::move(terms)) {
  if (terms_.empty()) throw InvalidArgument("ScaledCompositeMap: no terms");
  for (const auto& t : terms_) {
    if (!t.second) throw InvalidArgument("ScaledCompositeMap: null term");
  }
}

ComplexMatrix ScaledCompositeMap::evaluate(const ComplexMatrix& rho) const {
  if (op_ == Op::Sum) {
    ComplexMatrix out = terms_.front().first * terms_.front().second->evaluate(rho);
    for (std::size_t i = 1; i < terms_.size(); ++i) {
      out += terms_[i].first * terms_[i].second->evaluate(rho);
    }
    return out;
  }
  Complex w = terms_.front().first;
  ComplexMatrix out = terms_.front().second->evaluate(rho);
  for (std::size_t i = 1; i < terms_.size(); ++i) {
    w *= terms_[i].first;
    out = out * terms_[i].second->evaluate(rho);
  }
  return w * out;
}

Regularity ScaledCompositeMap::declared_regularity() const {
  Regularity r = terms_.front().second->declared_regularity();
  for (const auto& t : terms_) {
    const Regularity q = t.second->declared_regularity();
    if (q.m < r.m || (q.m == r.m && q.gamma < r.gamma)) r = q;
  }
  return r;
}

std::string ScaledCompositeMap::label() const {
  std::string out = op_ == Op::Sum ? "sum(" : "product(";
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    if (i) out += ",";
    out += terms_[i].second->label();
  }
  return out + ")";
}

bool ScaledCompositeMap::interior_only() const {
  return std::any_of(terms_.begin(), terms_.end(),
                     [](const Term& t) { return t.second->interior_only(); });
}

DirectionBasis DirectionBasis::from_density(const DensityOperator& rho) {
  DirectionBasis b;
  const ComplexMatrix& v = rho.eigenvectors();
  for (Index j = 0; j < v.cols(); ++j) b.projectors.push_back(v.col(j) * v.col(j).adjoint());
  return b;
}

void DirectionBasis::validate(double tol) const {
  if (projectors.empty()) throw InvalidArgument("DirectionBasis: empty");
  const Index d = projectors.front().rows();
  ComplexMatrix sum = ComplexMatrix::Zero(d, d);
  for (std::size_t i = 0; i < projectors.size(); ++i) {
    const auto& p = projectors[i];
    if ((p * p - p).cwiseAbs().maxCoeff() > tol) throw InvalidArgument("DirectionBasis: not a projector");
    for (std::size_t j = i + 1; j < projectors.size(); ++j) {
      if ((p * projectors[j]).cwiseAbs().maxCoeff() > tol) {
        throw InvalidArgument("DirectionBasis: projectors are not orthogonal");
      }
    }
    sum += p;
  }
  if ((sum - ComplexMatrix::Identity(d, d)).cwiseAbs().maxCoeff() > tol) {
    throw InvalidArgument("DirectionBasis: projectors do not sum to the identity");
  }
}

double max_feasible_step(const ComplexMatrix& rho, const ComplexMatrix& h) {
  const Eigensystem es = eigh(rho);
  if (es.values(0) <= 0.0) return 0.0;
  RealVector inv_sqrt = es.values.cwiseSqrt().cwiseInverse();
  const ComplexMatrix w = es.vectors * inv_sqrt.cast<Complex>().asDiagonal() * es.vectors.adjoint();
  // rho + t h >= 0  <=>  I + t W h W >= 0
  const double lo = min_eigenvalue(w * hermitian_part(h) * w);
  if (lo >= 0.0) return std::numeric_limits<double>::infinity();
  return -1.0 / lo;
}

namespace {

ComplexMatrix stencil(const StateMap& f, const ComplexMatrix& rho,
                      const std::vector<ComplexMatrix>& unit, double t) {
  const std::size_t j = unit.size();
  ComplexMatrix acc = ComplexMatrix::Zero(rho.rows(), rho.cols());
  const std::size_t patterns = std::size_t{1} << j;
  for (std::size_t mask = 0; mask < patterns; ++mask) {
    ComplexMatrix point = rho;
    double sign = 1.0;
    for (std::size_t i = 0; i < j; ++i) {
      const bool neg = (mask >> i) & 1U;
      point += (neg ? -t : t) * unit[i];
      if (neg) sign = -sign;
    }
    acc += sign * f.evaluate(point);
  }
  return acc / std::pow(2.0 * t, static_cast<double>(j));
}

void check_cone(const ComplexMatrix& rho, const std::vector<ComplexMatrix>& unit, double t) {
  const std::size_t patterns = std::size_t{1} << unit.size();
  double feasible = std::numeric_limits<double>::infinity();
  for (std::size_t mask = 0; mask < patterns; ++mask) {
    ComplexMatrix dir = ComplexMatrix::Zero(rho.rows(), rho.cols());
    for (std::size_t i = 0; i < unit.size(); ++i) dir += (((mask >> i) & 1U) ? -1.0 : 1.0) * unit[i];
    feasible = std::min(feasible, max_feasible_step(rho, dir));
  }
  if (t > feasible) {
    std::ostringstream msg;
    msg << "frechet_fd: step " << t << " leaves the positive cone (max feasible step " << feasible
        << ")";
    throw NumericalError(msg.str());
  }
}

}  // namespace

FrechetResult frechet_fd_detailed(const StateMap& f, const ComplexMatrix& rho,
                                  std::span<const ComplexMatrix> dirs) {
  const std::size_t j = dirs.size();
  if (j > 4) throw InvalidArgument("frechet_fd: order must be <= 4");
  FrechetResult r;
  if (j == 0) {
    r.value = f.evaluate(rho);
    return r;
  }
  std::vector<ComplexMatrix> unit;
  double scale = 1.0;
  for (const auto& h : dirs) {
    if (h.rows() != rho.rows() || h.cols() != rho.cols()) {
      throw InvalidArgument("frechet_fd: direction dimension mismatch");
    }
    const double nrm = h.norm();
    if (nrm == 0.0) {
      r.value = ComplexMatrix::Zero(rho.rows(), rho.cols());
      return r;
    }
    unit.push_back(h / nrm);
    scale *= nrm;
  }
  const double eps = std::numeric_limits<double>::epsilon();
  const double t = std::pow(eps, 1.0 / static_cast<double>(j + 2)) * std::max(operator_norm(rho), 1e-3);
  check_cone(rho, unit, t);
  const ComplexMatrix coarse = stencil(f, rho, unit, t);
  const ComplexMatrix fine = stencil(f, rho, unit, 0.5 * t);
  r.step = t;
  r.error_estimate = (fine - coarse).cwiseAbs().maxCoeff() * scale;
  if (r.error_estimate > 1e-5) {
    r.value = scale * (4.0 * fine - coarse) / 3.0;
    r.refined = true;
  } else {
    r.value = scale * coarse;
  }
  return r;
}

ComplexMatrix frechet_fd(const StateMap& f, const ComplexMatrix& rho,
                         std::span<const ComplexMatrix> dirs) {
  return frechet_fd_detailed(f, rho, dirs).value;
}

ComplexMatrix derivative_on_identity(const StateMap& f, const ComplexMatrix& rho,
                                     std::span<const int> alpha, const DirectionBasis& basis,
                                     bool identity_slots) {
  if (static_cast<Index>(alpha.size()) != basis.dim()) {
    throw InvalidArgument("derivative_on_identity: multi-index length must equal the basis size");
  }
  const int order = total_degree(alpha);
  if (order > 4) throw InvalidArgument("derivative_on_identity: |alpha| must be <= 4");
  std::vector<ComplexMatrix> dirs;
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    if (alpha[i] < 0) throw InvalidArgument("derivative_on_identity: negative multi-index entry");
    for (int r = 0; r < alpha[i]; ++r) {
      dirs.push_back(identity_slots ? ComplexMatrix::Identity(rho.rows(), rho.cols())
                                    : basis.projectors[i]);
    }
  }
  return frechet_fd(f, rho, dirs);
}

DerivativeMap::DerivativeMap(StateMapPtr base, MultiIndex alpha, DirectionBasis basis,
                             bool identity_slots)
    : base_(std::move(base)), alpha_(std::move(alpha)), basis_(std::move(basis)),
      identity_slots_(identity_slots) {
  if (!base_) throw InvalidArgument("DerivativeMap: null base map");
}

ComplexMatrix DerivativeMap::evaluate(const ComplexMatrix& rho) const {
  return derivative_on_identity(*base_, rho, alpha_, basis_, identity_slots_);
}

Regularity DerivativeMap::declared_regularity() const {
  Regularity r = base_->declared_regularity();
  r.m = std::max(0, r.m - total_degree(alpha_));
  return r;
}

TaylorResidual taylor_residual(const StateMap& f, const DensityOperator& rho,
                               const ComplexMatrix& h, int m) {
  if (m < 0 || m > 3) throw InvalidArgument("taylor_residual: m must lie in [0, 3]");
  if (h.rows() != rho.dim() || h.cols() != rho.dim()) {
    throw InvalidArgument("taylor_residual: direction dimension mismatch");
  }
  (void)make_density(rho.matrix() + h);  // rho + h must be a state
  ComplexMatrix approx = f.evaluate(rho.matrix());
  double fact = 1.0;
  std::vector<ComplexMatrix> dirs;
  for (int j = 1; j <= m; ++j) {
    dirs.push_back(h);
    fact *= j;
    approx += frechet_fd(f, rho.matrix(), dirs) / fact;
  }
  TaylorResidual r;
  r.residual_norm = trace_norm(f.evaluate(rho.matrix() + h) - approx);
  r.h_norm = trace_norm(h);
  return r;
}

}  // namespace qvd
