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

#include "qvd/channel.hpp"
#include "qvd/expansion.hpp"
#include "qvd/qnno.hpp"

namespace qvd {

/// A^{1/2} (A^{-1/2} B A^{-1/2})^t A^{1/2}. With regularization > 0, A + eps I
/// replaces A. Throws InvalidArgument when A (after regularization) has an
/// eigenvalue below pos_floor or B is not PSD.
ComplexMatrix kubo_ando(const ComplexMatrix& a, const ComplexMatrix& b, double t,
                        double regularization = 0.0);

struct InterpolationResult {
  double t = 0.0;
  ComplexMatrix mean_choi;
  /// || Tr_out(mean) - I ||_inf of the unprojected mean.
  double tp_deviation = 0.0;
  bool projected = false;
  /// NaN unless computed (spline_path).
  double distance_to_geodesic = 0.0;
  /// eps added to rank-deficient Choi matrices (0 when none was needed).
  double regularization = 0.0;

  // spline_path only
  int n0 = 0;
  int n1 = 0;
  /// Relative Frobenius residual of the least-squares refits (worst endpoint).
  double refit_residual = 0.0;
  bool refit_flagged = false;
  /// Trace norm of the negative part removed from the refitted Choi matrices.
  double psd_clip = 0.0;
};

/// Kubo-Ando mean of the Choi matrices of two CPTP channels; Choi matrices
/// with lambda_min < 1e-8 get 1e-8 I added. With `project`, the mean is
/// normalized to J' = (I (x) s^{-1/2}) J (I (x) s^{-1/2}), s = Tr_out J.
InterpolationResult channel_geomean(const Channel& c0, const Channel& c1, double t, bool project = true);

/// (I (x) s^{-1/2}) J (I (x) s^{-1/2}) with s = Tr_out J.
ComplexMatrix tp_project_choi(const ComplexMatrix& choi, Index dim);

struct SmoothedChannel {
  Channel channel;
  double refit_residual = 0.0;
  double psd_clip = 0.0;
};

/// QNNO-smoothed channel: qnno_apply of the channel's action on 2 d^2 seeded
/// full-rank states, refitted to a Liouville matrix by least squares, clipped to
/// a PSD Choi matrix and TP-projected.
SmoothedChannel qnno_smooth_channel(const Channel& c, int n, const LambdaRule& rule = LambdaRule::log_n(),
                                    double q = 1.0, std::uint64_t seed = 1);

/// Geomean of QNNO-smoothed endpoints with n0 = max(2, round(1/t)) and
/// n1 = max(2, round(1/(1-t))); distance_to_geodesic is the diamond distance
/// to channel_geomean(c0, c1, t, project).
InterpolationResult spline_path(const Channel& c0, const Channel& c1, double t,
                                const LambdaRule& rule = LambdaRule::log_n(), double q = 1.0,
                                bool project = true, std::uint64_t seed = 1);

struct RombergTable {
  int n0 = 0;
  int K = 0;
  int M = 0;
  std::vector<int> n;
  /// T[k][l] for l <= min(k, M)
  std::vector<std::vector<ComplexMatrix>> T;
  /// trace-norm distance of T[k][l] to the reference
  std::vector<std::vector<double>> E;
};

/// Builds T[k][l] = (4^l T[k][l-1] - T[k-1][l-1]) / (4^l - 1) from the first column.
RombergTable romberg_from_sequence(std::span<const ComplexMatrix> column0, int n0, int M,
                                   const ComplexMatrix& reference);

/// First column T[k][0] = qnno_apply at n_k = 2^k n0, k = 0..K; reference F(rho).
RombergTable romberg(const StateMap& f, const DensityOperator& rho, int n0, int K, int M,
                     const LambdaRule& rule = LambdaRule::log_n(), double q = 1.0,
                     bool renormalize = true, int threads = 1);

/// int (x^alpha - m_alpha)(x^beta - m_beta) Z(x) dx from exact moments at spec.lambda.
double moment_covariance(std::span<const int> alpha, std::span<const int> beta, const KernelSpec& spec);

/// sum_{|alpha|=2, |beta|=2} kron(L^(alpha), L^(beta)) Cov(alpha, beta), a d^2 x d^2
/// matrix. Moments are taken at spec.lambda; use KernelSpec::for_n for lambda = log n.
ComplexMatrix qclt_covariance(const StateMap& f, const DensityOperator& rho, const KernelSpec& spec,
                              const ExpansionOptions& opts = {});

}  // namespace qvd
