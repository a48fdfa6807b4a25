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
#include <span>
#include <vector>

#include "qvd/kernel.hpp"
#include "qvd/linalg.hpp"
#include "qvd/statemaps.hpp"

namespace qvd {

/// All k in N^d with sum n, stored row-wise. Points are in descending
/// lexicographic order: (n, 0, ..., 0) first, (0, ..., 0, n) last.
class SimplexLattice {
 public:
  static constexpr std::uint64_t kMaxPoints = 10'000'000;

  /// Throws InvalidArgument for n < 1 or d < 1 and when C(n+d-1, d-1) exceeds kMaxPoints.
  SimplexLattice(int n, int d);

  int n() const { return n_; }
  int d() const { return d_; }
  std::size_t size() const { return data_.size() / static_cast<std::size_t>(d_); }
  std::span<const int> point(std::size_t i) const {
    return {data_.data() + i * static_cast<std::size_t>(d_), static_cast<std::size_t>(d_)};
  }
  bool on_boundary(std::size_t i) const;

 private:
  int n_;
  int d_;
  std::vector<int> data_;
};

/// C(n+d-1, d-1), saturating at UINT64_MAX.
std::uint64_t simplex_size(int n, int d);

/// sum_j (k_j / n) |e_j><e_j| for the columns e_j of `basis`.
DensityOperator quantized_state(int n, std::span<const int> k, const ComplexMatrix& basis);

/// Lattice point nearest n p by largest-remainder rounding; ties go to the
/// lexicographically smaller k.
std::vector<int> nearest_lattice_point(int n, std::span<const double> p);

struct QnnoWeights {
  SimplexLattice lattice;
  std::vector<double> raw;
  std::vector<double> normalized;
  double raw_sum = 0.0;
};

/// raw_k = prod_i density1d(spec, n p_i - k_i). `normalized` is raw / raw_sum
/// when `renormalize`, otherwise a copy of raw.
QnnoWeights qnno_weights(int n, std::span<const double> p, const KernelSpec& spec,
                         bool renormalize = true);

/// sum_k w_k F(rho_{n,k}) on the eigenbasis of rho. Renormalized sums are
/// anchored at the heaviest lattice point, so constant maps come back unchanged.
/// Partial sums are formed over fixed blocks and reduced in block order, making
/// the result independent of `threads`.
ComplexMatrix qnno_apply(const StateMap& f, const DensityOperator& rho, int n,
                         const KernelSpec& spec, bool renormalize = true, int threads = 1);

/// || qnno_apply(...) - F(rho) ||_1
double approx_error(const StateMap& f, const DensityOperator& rho, int n, const KernelSpec& spec,
                    bool renormalize = true, int threads = 1);

/// Largest approx_error over a set of states.
double sup_approx_error(const StateMap& f, std::span<const DensityOperator> states, int n,
                        const KernelSpec& spec, bool renormalize = true, int threads = 1);

struct LambdaRule {
  enum class Kind { LogN, Fixed };
  Kind kind = Kind::LogN;
  double value = 0.0;

  static LambdaRule log_n() { return {}; }
  static LambdaRule fixed(double lambda) { return {Kind::Fixed, lambda}; }
  KernelSpec spec_for(int n, int dim, double q = 1.0) const;
};

struct ErrorCurveRow {
  int n = 0;
  double lambda = 0.0;
  double error = 0.0;
  double raw_sum = 0.0;
};

/// One approx_error per n (n_list strictly increasing).
std::vector<ErrorCurveRow> error_curve(const StateMap& f, const DensityOperator& rho,
                                       std::span<const int> n_list, const LambdaRule& rule,
                                       double q = 1.0, bool renormalize = true, int threads = 1);

}  // namespace qvd
