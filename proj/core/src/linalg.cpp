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

#include "qvd/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qvd/error.hpp"

namespace qvd {

double hermiticity_deviation(const ComplexMatrix& m) {
  if (m.rows() != m.cols()) {
    throw InvalidArgument("hermiticity_deviation: matrix is not square");
  }
  if (m.size() == 0) return 0.0;
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

ComplexMatrix hermitian_part(const ComplexMatrix& m) { return 0.5 * (m + m.adjoint()); }

Eigensystem eigh(const ComplexMatrix& h, double tol) {
  if (h.rows() != h.cols()) {
    throw InvalidArgument("eigh: matrix is not square");
  }
  const double dev = hermiticity_deviation(h);
  if (!(dev <= tol)) {
    std::ostringstream msg;
    msg << "eigh: matrix is not Hermitian (deviation " << dev << " > " << tol << ")";
    throw InvalidArgument(msg.str());
  }
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(hermitian_part(h));
  if (solver.info() != Eigen::Success) {
    throw NumericalError("eigh: eigendecomposition failed to converge");
  }
  return {solver.eigenvalues(), solver.eigenvectors()};
}

ComplexMatrix spectral_apply(const std::function<double(double)>& f, const Eigensystem& es) {
  RealVector fv(es.values.size());
  for (Index i = 0; i < es.values.size(); ++i) {
    fv(i) = f(es.values(i));
    if (!std::isfinite(fv(i))) {
      std::ostringstream msg;
      msg << "spectral_apply: function undefined at eigenvalue " << es.values(i);
      throw NumericalError(msg.str());
    }
  }
  ComplexMatrix out = es.vectors * fv.cast<Complex>().asDiagonal() * es.vectors.adjoint();
  return hermitian_part(out);
}

ComplexMatrix spectral_apply(const std::function<double(double)>& f, const ComplexMatrix& h,
                             double tol) {
  return spectral_apply(f, eigh(h, tol));
}

double schatten_norm(const ComplexMatrix& m, Schatten p) {
  if (m.size() == 0) return 0.0;
  Eigen::BDCSVD<ComplexMatrix> svd(m);
  const RealVector& s = svd.singularValues();
  switch (p) {
    case Schatten::One:
      return s.sum();
    case Schatten::Two:
      return s.norm();
    case Schatten::Infinity:
      return s.maxCoeff();
  }
  return 0.0;
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

ComplexMatrix partial_trace(const ComplexMatrix& m, Index dim_a, Index dim_b, Subsystem keep) {
  if (dim_a < 1 || dim_b < 1 || m.rows() != dim_a * dim_b || m.cols() != dim_a * dim_b) {
    std::ostringstream msg;
    msg << "partial_trace: matrix of size " << m.rows() << "x" << m.cols()
        << " does not match dims (" << dim_a << ", " << dim_b << ")";
    throw InvalidArgument(msg.str());
  }
  if (keep == Subsystem::A) {
    ComplexMatrix out = ComplexMatrix::Zero(dim_a, dim_a);
    for (Index i = 0; i < dim_a; ++i) {
      for (Index j = 0; j < dim_a; ++j) {
        Complex acc{0.0, 0.0};
        for (Index k = 0; k < dim_b; ++k) acc += m(i * dim_b + k, j * dim_b + k);
        out(i, j) = acc;
      }
    }
    return out;
  }
  ComplexMatrix out = ComplexMatrix::Zero(dim_b, dim_b);
  for (Index k = 0; k < dim_a; ++k) {
    out += m.block(k * dim_b, k * dim_b, dim_b, dim_b);
  }
  return out;
}

ComplexVector vec(const ComplexMatrix& m) {
  return Eigen::Map<const ComplexVector>(m.data(), m.size());
}

ComplexMatrix unvec(const ComplexVector& v, Index rows, Index cols) {
  if (v.size() != rows * cols) {
    throw InvalidArgument("unvec: size mismatch");
  }
  return Eigen::Map<const ComplexMatrix>(v.data(), rows, cols);
}

double min_eigenvalue(const ComplexMatrix& m) {
  if (m.rows() != m.cols()) {
    throw InvalidArgument("min_eigenvalue: matrix is not square");
  }
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(hermitian_part(m), Eigen::EigenvaluesOnly);
  return solver.eigenvalues()(0);
}

namespace {

void clamp_spectrum(RealVector& values, double tol) {
  for (Index i = 0; i < values.size(); ++i) {
    double& v = values(i);
    if (v < -tol || v > 1.0 + tol) {
      std::ostringstream msg;
      msg << "density operator: eigenvalue " << v << " outside [0, 1] beyond tolerance " << tol;
      throw InvalidArgument(msg.str());
    }
    v = std::clamp(v, 0.0, 1.0);
  }
}

void check_trace(const Complex& tr, double tol) {
  if (std::abs(tr - Complex{1.0, 0.0}) > tol) {
    std::ostringstream msg;
    msg << "density operator: trace " << tr.real() << " deviates from 1 beyond tolerance " << tol;
    throw InvalidArgument(msg.str());
  }
}

}  // namespace

DensityOperator DensityOperator::from_matrix(const ComplexMatrix& m, const Tolerances& tol) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw InvalidArgument("density operator: matrix must be square and non-empty");
  }
  Eigensystem es = eigh(m, tol.hermitian);
  check_trace(m.trace(), tol.trace);
  clamp_spectrum(es.values, tol.psd);
  return DensityOperator(hermitian_part(m), std::move(es.values), std::move(es.vectors));
}

DensityOperator DensityOperator::from_spectrum(std::span<const double> spectrum,
                                               const ComplexMatrix& basis, const Tolerances& tol) {
  const auto d = static_cast<Index>(spectrum.size());
  if (d == 0 || basis.rows() != d || basis.cols() != d) {
    throw InvalidArgument("density operator: basis shape does not match spectrum length");
  }
  const double orth = (basis.adjoint() * basis - ComplexMatrix::Identity(d, d)).cwiseAbs().maxCoeff();
  if (orth > tol.round_trip * 100) {
    throw InvalidArgument("density operator: basis is not orthonormal");
  }
  RealVector values = Eigen::Map<const RealVector>(spectrum.data(), d);
  check_trace(Complex{values.sum(), 0.0}, tol.trace);
  clamp_spectrum(values, tol.psd);
  ComplexMatrix m = basis * values.cast<Complex>().asDiagonal() * basis.adjoint();
  return DensityOperator(hermitian_part(m), std::move(values), basis);
}

DensityOperator DensityOperator::diagonal(std::span<const double> spectrum, const Tolerances& tol) {
  const auto d = static_cast<Index>(spectrum.size());
  return from_spectrum(spectrum, ComplexMatrix::Identity(d, d), tol);
}

DensityOperator make_density(const ComplexMatrix& m, double tol) {
  Tolerances t;
  t.hermitian = tol;
  t.trace = tol;
  t.psd = tol;
  return DensityOperator::from_matrix(m, t);
}

}  // namespace qvd
