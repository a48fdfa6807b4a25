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

#include "qvd/applications.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

#include "qvd/error.hpp"
#include "qvd/random.hpp"

namespace qvd {

namespace {

constexpr double kChoiFloor = 1e-8;
constexpr double kRefitFlag = 1e-6;

ComplexMatrix inverse_sqrt(const ComplexMatrix& m) {
  return spectral_apply([](double x) { return 1.0 / std::sqrt(x); }, m);
}

}  // namespace

ComplexMatrix kubo_ando(const ComplexMatrix& a, const ComplexMatrix& b, double t, double regularization) {
  if (a.rows() != b.rows() || a.cols() != b.cols() || a.rows() != a.cols()) {
    throw InvalidArgument("kubo_ando: dimension mismatch");
  }
  if (!(t >= 0.0 && t <= 1.0)) throw InvalidArgument("kubo_ando: t must lie in [0, 1]");
  if (regularization < 0.0) throw InvalidArgument("kubo_ando: regularization must be >= 0");
  const Tolerances tol;
  ComplexMatrix areg = hermitian_part(a);
  if (regularization > 0.0) areg += regularization * ComplexMatrix::Identity(a.rows(), a.cols());
  const Eigensystem ea = eigh(areg);
  if (ea.values(0) < tol.pos_floor) {
    std::ostringstream msg;
    msg << "kubo_ando: A is singular (lambda_min = " << ea.values(0) << ")";
    throw InvalidArgument(msg.str());
  }
  if (min_eigenvalue(b) < -tol.psd) throw InvalidArgument("kubo_ando: B is not positive semidefinite");
  const ComplexMatrix half = spectral_apply([](double x) { return std::sqrt(x); }, ea);
  const ComplexMatrix inv_half = spectral_apply([](double x) { return 1.0 / std::sqrt(x); }, ea);
  const ComplexMatrix inner = hermitian_part(inv_half * b * inv_half);
  const ComplexMatrix power = spectral_apply([t](double x) { return std::pow(std::max(x, 0.0), t); }, inner);
  return hermitian_part(half * power * half);
}

ComplexMatrix tp_project_choi(const ComplexMatrix& choi, Index dim) {
  const ComplexMatrix sigma = partial_trace(choi, dim, dim, Subsystem::B);
  const ComplexMatrix s = kron(ComplexMatrix::Identity(dim, dim), inverse_sqrt(sigma));
  return hermitian_part(s * choi * s);
}

InterpolationResult channel_geomean(const Channel& c0, const Channel& c1, double t, bool project) {
  if (c0.dim() != c1.dim()) throw InvalidArgument("channel_geomean: dimension mismatch");
  if (!verify_cptp(c0).pass || !verify_cptp(c1).pass) {
    throw InvalidArgument("channel_geomean: both channels must be CPTP");
  }
  const Index d = c0.dim();
  InterpolationResult r;
  r.t = t;
  r.distance_to_geodesic = std::numeric_limits<double>::quiet_NaN();
  ComplexMatrix j0 = choi_matrix(c0);
  ComplexMatrix j1 = choi_matrix(c1);
  for (ComplexMatrix* j : {&j0, &j1}) {
    if (min_eigenvalue(*j) < kChoiFloor) {
      *j += kChoiFloor * ComplexMatrix::Identity(j->rows(), j->cols());
      r.regularization = kChoiFloor;
    }
  }
  r.mean_choi = kubo_ando(j0, j1, t);
  r.tp_deviation =
      operator_norm(partial_trace(r.mean_choi, d, d, Subsystem::B) - ComplexMatrix::Identity(d, d));
  if (project) {
    r.mean_choi = tp_project_choi(r.mean_choi, d);
    r.projected = true;
  }
  return r;
}

SmoothedChannel qnno_smooth_channel(const Channel& c, int n, const LambdaRule& rule, double q,
                                    std::uint64_t seed) {
  const Index d = c.dim();
  const Index count = 2 * d * d;
  const LinearChannelMap map(c);
  const KernelSpec spec = rule.spec_for(n, static_cast<int>(d), q);
  ComplexMatrix x(d * d, count);
  ComplexMatrix y(d * d, count);
  for (Index i = 0; i < count; ++i) {
    const DensityOperator rho = make_density(random_state(d, derive_seed(seed, static_cast<std::uint64_t>(i))));
    x.col(i) = vec(rho.matrix());
    y.col(i) = vec(qnno_apply(map, rho, n, spec));
  }
  // L x = y in the least-squares sense: x^T L^T = y^T
  const ComplexMatrix lt = x.transpose().bdcSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(y.transpose());
  const ComplexMatrix l = lt.transpose();
  SmoothedChannel s{identity_channel(d), 0.0, 0.0};
  s.refit_residual = (l * x - y).norm() / y.norm();
  const Eigensystem es = eigh(hermitian_part(choi_from_liouville(l, d)));
  RealVector clipped = es.values;
  for (Index i = 0; i < clipped.size(); ++i) {
    if (clipped(i) < 0.0) {
      s.psd_clip += -clipped(i);
      clipped(i) = 0.0;
    }
  }
  const ComplexMatrix choi = es.vectors * clipped.cast<Complex>().asDiagonal() * es.vectors.adjoint();
  s.channel = Channel::from_choi(tp_project_choi(choi, d));
  return s;
}

InterpolationResult spline_path(const Channel& c0, const Channel& c1, double t, const LambdaRule& rule,
                                double q, bool project, std::uint64_t seed) {
  if (!(t > 0.0 && t < 1.0)) throw InvalidArgument("spline_path: t must lie in (0, 1)");
  const int n0 = std::max(2, static_cast<int>(std::lround(1.0 / t)));
  const int n1 = std::max(2, static_cast<int>(std::lround(1.0 / (1.0 - t))));
  const SmoothedChannel s0 = qnno_smooth_channel(c0, n0, rule, q, derive_seed(seed, 0));
  const SmoothedChannel s1 = qnno_smooth_channel(c1, n1, rule, q, derive_seed(seed, 1));
  InterpolationResult r = channel_geomean(s0.channel, s1.channel, t, project);
  r.n0 = n0;
  r.n1 = n1;
  r.refit_residual = std::max(s0.refit_residual, s1.refit_residual);
  r.refit_flagged = r.refit_residual > kRefitFlag;
  r.psd_clip = s0.psd_clip + s1.psd_clip;
  const InterpolationResult geodesic = channel_geomean(c0, c1, t, project);
  r.distance_to_geodesic =
      diamond_distance(Channel::from_choi(r.mean_choi), Channel::from_choi(geodesic.mean_choi)).value;
  return r;
}

RombergTable romberg_from_sequence(std::span<const ComplexMatrix> column0, int n0, int M,
                                   const ComplexMatrix& reference) {
  if (column0.size() < 2) throw InvalidArgument("romberg: need at least two first-column entries");
  const int K = static_cast<int>(column0.size()) - 1;
  if (M < 1 || M > K) throw InvalidArgument("romberg: need K >= M >= 1");
  RombergTable tab;
  tab.n0 = n0;
  tab.K = K;
  tab.M = M;
  tab.T.resize(column0.size());
  tab.E.resize(column0.size());
  for (int k = 0; k <= K; ++k) {
    tab.n.push_back(n0 << k);
    tab.T[static_cast<std::size_t>(k)].push_back(column0[static_cast<std::size_t>(k)]);
  }
  for (int l = 1; l <= M; ++l) {
    const double f = std::pow(4.0, l);
    for (int k = l; k <= K; ++k) {
      const auto& cur = tab.T[static_cast<std::size_t>(k)][static_cast<std::size_t>(l - 1)];
      const auto& prev = tab.T[static_cast<std::size_t>(k - 1)][static_cast<std::size_t>(l - 1)];
      tab.T[static_cast<std::size_t>(k)].push_back(((f * cur - prev) / (f - 1.0)).eval());
    }
  }
  for (int k = 0; k <= K; ++k) {
    for (const auto& m : tab.T[static_cast<std::size_t>(k)]) {
      tab.E[static_cast<std::size_t>(k)].push_back(trace_norm(m - reference));
    }
  }
  return tab;
}

RombergTable romberg(const StateMap& f, const DensityOperator& rho, int n0, int K, int M,
                     const LambdaRule& rule, double q, bool renormalize, int threads) {
  if (n0 < 1 || K < 1 || M < 1 || M > K || K > 24) throw InvalidArgument("romberg: need n0 >= 1, K >= M >= 1");
  const int d = static_cast<int>(rho.dim());
  const long long top = static_cast<long long>(n0) << K;
  if (top > std::numeric_limits<int>::max() ||
      simplex_size(static_cast<int>(top), d) > SimplexLattice::kMaxPoints) {
    throw InvalidArgument("romberg: n0 * 2^K exceeds the lattice cost guard");
  }
  std::vector<ComplexMatrix> column;
  for (int k = 0; k <= K; ++k) {
    const int n = n0 << k;
    column.push_back(qnno_apply(f, rho, n, rule.spec_for(n, d, q), renormalize, threads));
  }
  return romberg_from_sequence(column, n0, M, f.evaluate(rho.matrix()));
}

double moment_covariance(std::span<const int> alpha, std::span<const int> beta, const KernelSpec& spec) {
  if (alpha.size() != beta.size()) throw InvalidArgument("moment_covariance: length mismatch");
  MultiIndex sum(alpha.size());
  bool odd = false;
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    sum[i] = alpha[i] + beta[i];
    odd = odd || (sum[i] % 2 != 0);
  }
  if (odd) return 0.0;
  KernelSpec s = spec;
  s.dim = static_cast<int>(alpha.size());
  const MultiIndex zero(alpha.size(), 0);
  const double ma = moment_exact(s, alpha).value;
  const double mb = moment_exact(s, beta).value;
  const double m0 = moment_exact(s, zero).value;
  return moment_exact(s, sum).value - 2.0 * ma * mb + ma * mb * m0;
}

ComplexMatrix qclt_covariance(const StateMap& f, const DensityOperator& rho, const KernelSpec& spec,
                              const ExpansionOptions& opts) {
  if (f.declared_regularity().m < 2) {
    throw InvalidArgument("qclt_covariance: map must declare at least two derivatives");
  }
  const Index d = rho.dim();
  KernelSpec s = spec;
  s.dim = static_cast<int>(d);
  const DirectionBasis basis = DirectionBasis::from_density(rho);
  const auto alphas = multi_indices(2, static_cast<int>(d));
  std::vector<ComplexMatrix> derivs;
  for (const auto& a : alphas) {
    derivs.push_back(derivative_on_identity(f, rho.matrix(), a, basis, opts.identity_slots));
  }
  ComplexMatrix sigma = ComplexMatrix::Zero(d * d, d * d);
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    for (std::size_t j = 0; j < alphas.size(); ++j) {
      const double cov = moment_covariance(alphas[i], alphas[j], s);
      if (cov == 0.0) continue;
      sigma += cov * kron(derivs[i], derivs[j]);
    }
  }
  return sigma;
}

}  // namespace qvd
