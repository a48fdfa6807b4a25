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

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "qvd/linalg.hpp"

namespace qvd {

// Conventions used throughout:
//   Choi       J = sum_ij Phi(|i><j|) (x) |i><j|   (output factor first, reference second)
//   Liouville  vec(Phi(X)) = L vec(X)               (column-stacking vec)
// so J(a*d + i, b*d + j) == L(a + b*d, i + j*d) == Phi(|i><j|)(a, b).

enum class Representation { Kraus, Choi, Liouville };

std::string_view to_string(Representation r);
Representation representation_from_string(std::string_view s);

/// A linear map on d x d matrices in one or more representations.
/// Immutable once built; conversions return new values.
class Channel {
 public:
  /// Fails on ragged or non-square operators. With `demand_cptp`, fails when
  /// sum K^dagger K deviates from I by more than `tol` (operator norm).
  static Channel from_kraus(std::vector<ComplexMatrix> kraus, bool demand_cptp = false,
                            double tol = Tolerances{}.trace);
  static Channel from_choi(ComplexMatrix choi, double tol = Tolerances{}.trace);
  static Channel from_liouville(ComplexMatrix liouville, double tol = Tolerances{}.trace);

  Index dim() const { return dim_; }
  bool cptp() const { return cptp_; }
  bool has(Representation r) const;

  const std::optional<std::vector<ComplexMatrix>>& kraus() const { return kraus_; }
  const std::optional<ComplexMatrix>& choi() const { return choi_; }
  const std::optional<ComplexMatrix>& liouville() const { return liouville_; }

 private:
  friend Channel convert_representation(const Channel& c, Representation target, double tol);
  Channel() = default;

  Index dim_ = 0;
  bool cptp_ = false;
  std::optional<std::vector<ComplexMatrix>> kraus_;
  std::optional<ComplexMatrix> choi_;
  std::optional<ComplexMatrix> liouville_;
};

// Raw conversions between representation matrices.
ComplexMatrix choi_from_kraus(const std::vector<ComplexMatrix>& kraus);
ComplexMatrix liouville_from_kraus(const std::vector<ComplexMatrix>& kraus);
ComplexMatrix liouville_from_choi(const ComplexMatrix& choi, Index dim);
ComplexMatrix choi_from_liouville(const ComplexMatrix& liouville, Index dim);
/// Kraus operators from the eigendecomposition of a PSD Choi matrix; eigenvalues
/// below `tol` are dropped. Throws InvalidArgument if the Choi matrix has an
/// eigenvalue below -tol.
std::vector<ComplexMatrix> kraus_from_choi(const ComplexMatrix& choi, Index dim,
                                           double tol = Tolerances{}.psd);

/// Returns a copy of `c` with `target` populated.
Channel convert_representation(const Channel& c, Representation target,
                               double tol = Tolerances{}.psd);

/// Choi / Liouville matrix of `c`, derived from whichever representation is present.
ComplexMatrix choi_matrix(const Channel& c);
ComplexMatrix liouville_matrix(const Channel& c);

ComplexMatrix apply_channel(const Channel& c, const ComplexMatrix& x);

struct CptpReport {
  double min_choi_eigenvalue = 0.0;
  /// || Tr_out J - I ||_inf
  double tp_deviation = 0.0;
  bool pass = false;
};

CptpReport verify_cptp(const Channel& c, double tol = Tolerances{}.trace);

/// Linear combination a*c1 + b*c2 in the Choi representation (not CPTP in general).
Channel combine(const Channel& c1, Complex a, const Channel& c2, Complex b);

// Channel zoo.
Channel identity_channel(Index d);
Channel unitary_channel(const ComplexMatrix& u);
/// rho -> (1 - p) rho + p I/d, Kraus form via the Weyl (clock and shift) basis.
Channel depolarizing_channel(Index d, double p);
/// Qubit amplitude damping with decay probability gamma.
Channel amplitude_damping_channel(double gamma);
/// Qubit dephasing: rho -> (1 - p) rho + p Z rho Z.
Channel dephasing_channel(double p);

/// Random CPTP map: Kraus blocks of a d*rank x d isometry obtained by
/// orthonormalizing a seeded complex Gaussian matrix column by column.
Channel random_cptp(Index d, Index kraus_rank, std::uint64_t seed);

struct DiamondEstimate {
  double value = 0.0;
  /// ||J(Delta)||_1 / d and ||J(Delta)||_1.
  double lower_bound = 0.0;
  double upper_bound = 0.0;
};

/// Estimates sup_psi || ((Phi - Psi) (x) id)(|psi><psi|) ||_1 over pure states on
/// H (x) H (ancilla of the system dimension) by alternating ascent from
/// `restarts` starting points. Start 0 is the maximally entangled state, so the
/// estimate never falls below the Choi lower bound. Adding restarts never
/// decreases the value for a fixed seed.
DiamondEstimate diamond_distance(const Channel& c1, const Channel& c2, int restarts = 8,
                                 std::uint64_t seed = 1);

/// || ((Delta) (x) id)(|psi><psi|) ||_1 for the bipartite vector psi (length d^2,
/// index a*d + k with a the system and k the ancilla).
double bipartite_output_trace_norm(const ComplexMatrix& delta_choi, Index dim,
                                   const ComplexVector& psi);

}  // namespace qvd
