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

#include <complex>
#include <functional>
#include <span>

#include <Eigen/Dense>

namespace qvd {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Default numerical tolerances. Sized for double precision at d <= 8.
struct Tolerances {
  double hermitian = 1e-9;
  double trace = 1e-9;
  double psd = 1e-9;
  double round_trip = 1e-10;
  double pos_floor = 1e-12;
};

/// Largest absolute entry of M - M^dagger.
double hermiticity_deviation(const ComplexMatrix& m);

/// (M + M^dagger) / 2.
ComplexMatrix hermitian_part(const ComplexMatrix& m);

/// Eigenpairs of a Hermitian matrix, eigenvalues ascending, vectors as columns.
struct Eigensystem {
  RealVector values;
  ComplexMatrix vectors;
};

/// Eigendecomposition of a Hermitian matrix. Inputs within `tol` of Hermitian
/// are symmetrized first; anything further off is rejected with InvalidArgument.
Eigensystem eigh(const ComplexMatrix& h, double tol = Tolerances{}.hermitian);

/// U f(Lambda) U^dagger for H = U Lambda U^dagger. Throws NumericalError if
/// f returns a non-finite value on any eigenvalue.
ComplexMatrix spectral_apply(const std::function<double(double)>& f, const ComplexMatrix& h,
                             double tol = Tolerances{}.hermitian);
ComplexMatrix spectral_apply(const std::function<double(double)>& f, const Eigensystem& es);

enum class Schatten { One, Two, Infinity };

/// Schatten p-norm from singular values (sum, root-sum-square, max).
double schatten_norm(const ComplexMatrix& m, Schatten p);
inline double trace_norm(const ComplexMatrix& m) { return schatten_norm(m, Schatten::One); }
inline double operator_norm(const ComplexMatrix& m) { return schatten_norm(m, Schatten::Infinity); }

/// Kronecker product A (x) B with A as the major (leftmost) factor.
ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

enum class Subsystem { A, B };

/// Partial trace of an operator on H_A (x) H_B, keeping the named factor.
ComplexMatrix partial_trace(const ComplexMatrix& m, Index dim_a, Index dim_b, Subsystem keep);

/// Column-stacking vectorization and its inverse.
ComplexVector vec(const ComplexMatrix& m);
ComplexMatrix unvec(const ComplexVector& v, Index rows, Index cols);

/// Smallest eigenvalue of the Hermitian part.
double min_eigenvalue(const ComplexMatrix& m);

/// A validated quantum state: Hermitian, unit trace, positive semidefinite.
/// The eigendecomposition is cached at construction.
class DensityOperator {
 public:
  /// Validates M and caches its eigensystem (eigenvalues ascending).
  /// Eigenvalues within tolerance of [0, 1] are clamped into it.
  static DensityOperator from_matrix(const ComplexMatrix& m, const Tolerances& tol = {});

  /// Builds sum_j p_j |e_j><e_j| keeping the given order of (p_j, e_j).
  /// `basis` columns must be orthonormal.
  static DensityOperator from_spectrum(std::span<const double> spectrum, const ComplexMatrix& basis,
                                       const Tolerances& tol = {});

  /// diag(p) in the computational basis, order preserved.
  static DensityOperator diagonal(std::span<const double> spectrum, const Tolerances& tol = {});

  Index dim() const { return matrix_.rows(); }
  const ComplexMatrix& matrix() const { return matrix_; }
  const RealVector& eigenvalues() const { return eigenvalues_; }
  const ComplexMatrix& eigenvectors() const { return eigenvectors_; }
  double min_eigenvalue() const { return eigenvalues_.minCoeff(); }
  bool strictly_positive(double pos_floor = Tolerances{}.pos_floor) const {
    return min_eigenvalue() >= pos_floor;
  }

 private:
  DensityOperator(ComplexMatrix m, RealVector values, ComplexMatrix vectors)
      : matrix_(std::move(m)), eigenvalues_(std::move(values)), eigenvectors_(std::move(vectors)) {}

  ComplexMatrix matrix_;
  RealVector eigenvalues_;
  ComplexMatrix eigenvectors_;
};

/// Convenience alias for DensityOperator::from_matrix with a uniform tolerance.
DensityOperator make_density(const ComplexMatrix& m, double tol = 1e-9);

}  // namespace qvd
