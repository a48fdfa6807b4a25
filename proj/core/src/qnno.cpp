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

#include "qvd/qnno.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "qvd/error.hpp"
#include "qvd/parallel.hpp"

namespace qvd {

namespace {

constexpr std::size_t kBlock = 64;
constexpr double kBoundaryDrop = 1e-16;

}  // namespace

std::uint64_t simplex_size(int n, int d) {
  if (n < 0 || d < 1) return 0;
  // C(n + d - 1, d - 1) built incrementally; every partial value is itself a binomial
  std::uint64_t c = 1;
  for (int i = 1; i < d; ++i) {
    const std::uint64_t num = static_cast<std::uint64_t>(n) + static_cast<std::uint64_t>(i);
    if (c > std::numeric_limits<std::uint64_t>::max() / num) return std::numeric_limits<std::uint64_t>::max();
    c = c * num / static_cast<std::uint64_t>(i);
  }
  return c;
}

SimplexLattice::SimplexLattice(int n, int d) : n_(n), d_(d) {
  if (n < 1 || d < 1) throw InvalidArgument("simplex lattice: need n >= 1 and d >= 1");
  const std::uint64_t count = simplex_size(n, d);
  if (count > kMaxPoints) {
    std::ostringstream msg;
    msg << "simplex lattice: " << count << " points for n=" << n << ", d=" << d
        << " exceeds the cost guard of " << kMaxPoints;
    throw InvalidArgument(msg.str());
  }
  data_.reserve(static_cast<std::size_t>(count) * static_cast<std::size_t>(d));
  std::vector<int> k(static_cast<std::size_t>(d), 0);
  k[0] = n;
  for (;;) {
    data_.insert(data_.end(), k.begin(), k.end());
    // predecessor in lexicographic order: move one unit from the last nonzero
    // entry before position d-1 to its right neighbour, gathering the tail
    int pos = d - 2;
    while (pos >= 0 && k[static_cast<std::size_t>(pos)] == 0) --pos;
    if (pos < 0) break;
    const int tail = k[static_cast<std::size_t>(d - 1)];
    k[static_cast<std::size_t>(d - 1)] = 0;
    --k[static_cast<std::size_t>(pos)];
    k[static_cast<std::size_t>(pos + 1)] = tail + 1;
  }
}

bool SimplexLattice::on_boundary(std::size_t i) const {
  const auto k = point(i);
  return std::any_of(k.begin(), k.end(), [](int v) { return v == 0; });
}

DensityOperator quantized_state(int n, std::span<const int> k, const ComplexMatrix& basis) {
  if (n < 1) throw InvalidArgument("quantized_state: n must be >= 1");
  if (std::any_of(k.begin(), k.end(), [](int v) { return v < 0; }) ||
      std::accumulate(k.begin(), k.end(), 0) != n) {
    throw InvalidArgument("quantized_state: k is not a lattice point of order n");
  }
  std::vector<double> spectrum;
  for (int v : k) spectrum.push_back(static_cast<double>(v) / n);
  return DensityOperator::from_spectrum(spectrum, basis);
}

std::vector<int> nearest_lattice_point(int n, std::span<const double> p) {
  if (n < 1 || p.empty()) throw InvalidArgument("nearest_lattice_point: bad arguments");
  std::vector<int> k;
  std::vector<double> rem;
  int used = 0;
  for (double v : p) {
    const double x = n * v;
    const int f = static_cast<int>(std::floor(x));
    k.push_back(f);
    rem.push_back(x - f);
    used += f;
  }
  std::vector<std::size_t> order(p.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  // larger remainder first; on ties the later coordinate gets the unit
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (rem[a] != rem[b]) return rem[a] > rem[b];
    return a > b;
  });
  for (std::size_t i = 0; used < n && i < order.size(); ++i, ++used) ++k[order[i]];
  while (used > n) {
    auto it = std::max_element(k.begin(), k.end());
    --*it;
    --used;
  }
  return k;
}

QnnoWeights qnno_weights(int n, std::span<const double> p, const KernelSpec& spec,
                         bool renormalize) {
  spec.validate();
  if (p.empty()) throw InvalidArgument("qnno_weights: empty probability vector");
  double total = 0.0;
  for (double v : p) {
    if (!(v > 0.0)) throw InvalidArgument("qnno_weights: probability vector has a zero or negative entry");
    total += v;
  }
  if (std::abs(total - 1.0) > 1e-9) throw InvalidArgument("qnno_weights: probabilities do not sum to 1");
  const int d = static_cast<int>(p.size());
  QnnoWeights w{SimplexLattice(n, d), {}, {}, 0.0};
  // factor table: table[i][k] = density1d(n p_i - k)
  std::vector<std::vector<double>> table(p.size(), std::vector<double>(static_cast<std::size_t>(n) + 1));
  for (std::size_t i = 0; i < p.size(); ++i) {
    for (int k = 0; k <= n; ++k) table[i][static_cast<std::size_t>(k)] = density1d(spec, n * p[i] - k);
  }
  const std::size_t count = w.lattice.size();
  w.raw.resize(count);
  for (std::size_t j = 0; j < count; ++j) {
    const auto k = w.lattice.point(j);
    double prod = 1.0;
    for (std::size_t i = 0; i < p.size(); ++i) prod *= table[i][static_cast<std::size_t>(k[i])];
    w.raw[j] = prod;
  }
  // compensated sum in lattice order
  double sum = 0.0;
  double comp = 0.0;
  for (double v : w.raw) {
    const double t = sum + v;
    comp += std::abs(sum) >= std::abs(v) ? (sum - t) + v : (v - t) + sum;
    sum = t;
  }
  w.raw_sum = sum + comp;
  if (!(w.raw_sum >= std::numeric_limits<double>::min()) || !std::isfinite(w.raw_sum)) {
    std::ostringstream msg;
    msg << "qnno_weights: raw weight sum underflow (" << w.raw_sum << ") at n=" << n
        << ", lambda=" << spec.lambda;
    throw NumericalError(msg.str());
  }
  w.normalized = w.raw;
  if (renormalize) {
    for (double& v : w.normalized) v /= w.raw_sum;
  }
  return w;
}

ComplexMatrix qnno_apply(const StateMap& f, const DensityOperator& rho, int n,
                         const KernelSpec& spec, bool renormalize, int threads) {
  if (!rho.strictly_positive()) throw InvalidArgument("qnno_apply: rho must be strictly positive");
  const RealVector& values = rho.eigenvalues();
  const Index d = rho.dim();
  // eigenpairs in descending order, stable on index
  std::vector<Index> order(static_cast<std::size_t>(d));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return values(a) > values(b); });
  std::vector<double> p(static_cast<std::size_t>(d));
  ComplexMatrix basis(d, d);
  for (Index i = 0; i < d; ++i) {
    p[static_cast<std::size_t>(i)] = values(order[static_cast<std::size_t>(i)]);
    basis.col(i) = rho.eigenvectors().col(order[static_cast<std::size_t>(i)]);
  }
  const QnnoWeights w = qnno_weights(n, p, spec, renormalize);
  const std::size_t count = w.lattice.size();
  const bool interior = f.interior_only();

  auto state_at = [&](std::size_t j) {
    const auto k = w.lattice.point(j);
    RealVector diag(d);
    for (Index i = 0; i < d; ++i) diag(i) = static_cast<double>(k[static_cast<std::size_t>(i)]) / n;
    return ComplexMatrix(basis * diag.cast<Complex>().asDiagonal() * basis.adjoint());
  };
  auto skip = [&](std::size_t j) {
    if (w.normalized[j] == 0.0) return true;
    if (interior && w.lattice.on_boundary(j)) {
      if (w.normalized[j] < kBoundaryDrop) return true;
      std::ostringstream msg;
      msg << "qnno_apply: map '" << f.label() << "' is interior-only but boundary lattice point "
          << format_multi_index(w.lattice.point(j)) << " carries weight " << w.normalized[j];
      throw NumericalError(msg.str());
    }
    return false;
  };

  // heaviest point, lowest index on ties
  std::size_t anchor = 0;
  for (std::size_t j = 1; j < count; ++j) {
    if (w.normalized[j] > w.normalized[anchor]) anchor = j;
  }
  ComplexMatrix base = ComplexMatrix::Zero(d, d);
  if (renormalize) {
    skip(anchor);
    base = f.evaluate(state_at(anchor));
  }

  const std::size_t blocks = (count + kBlock - 1) / kBlock;
  std::vector<ComplexMatrix> partial(blocks, ComplexMatrix::Zero(d, d));
  parallel_for(blocks, resolve_threads(threads), [&](std::size_t b) {
    ComplexMatrix acc = ComplexMatrix::Zero(d, d);
    const std::size_t end = std::min(count, (b + 1) * kBlock);
    for (std::size_t j = b * kBlock; j < end; ++j) {
      if (skip(j)) continue;
      if (renormalize && j == anchor) continue;
      ComplexMatrix v = f.evaluate(state_at(j));
      if (renormalize) v -= base;
      acc += w.normalized[j] * v;
    }
    partial[b] = std::move(acc);
  });
  ComplexMatrix out = ComplexMatrix::Zero(d, d);
  for (const auto& m : partial) out += m;
  if (renormalize) out += base;
  if (!out.allFinite()) throw NumericalError("qnno_apply: non-finite result");
  return out;
}

double approx_error(const StateMap& f, const DensityOperator& rho, int n, const KernelSpec& spec,
                    bool renormalize, int threads) {
  return trace_norm(qnno_apply(f, rho, n, spec, renormalize, threads) - f.evaluate(rho.matrix()));
}

double sup_approx_error(const StateMap& f, std::span<const DensityOperator> states, int n,
                        const KernelSpec& spec, bool renormalize, int threads) {
  double worst = 0.0;
  for (const auto& rho : states) worst = std::max(worst, approx_error(f, rho, n, spec, renormalize, threads));
  return worst;
}

KernelSpec LambdaRule::spec_for(int n, int dim, double q) const {
  if (kind == Kind::LogN) return KernelSpec::for_n(n, dim, q);
  KernelSpec s{q, value, dim};
  s.validate();
  return s;
}

std::vector<ErrorCurveRow> error_curve(const StateMap& f, const DensityOperator& rho,
                                       std::span<const int> n_list, const LambdaRule& rule,
                                       double q, bool renormalize, int threads) {
  for (std::size_t i = 1; i < n_list.size(); ++i) {
    if (n_list[i] <= n_list[i - 1]) throw InvalidArgument("error_curve: n_list must be strictly increasing");
  }
  const int d = static_cast<int>(rho.dim());
  const ComplexMatrix exact = f.evaluate(rho.matrix());
  std::vector<ErrorCurveRow> rows;
  for (int n : n_list) {
    const KernelSpec spec = rule.spec_for(n, d, q);
    const RealVector& values = rho.eigenvalues();
    const std::vector<double> p(values.data(), values.data() + values.size());
    ErrorCurveRow row;
    row.n = n;
    row.lambda = spec.lambda;
    row.raw_sum = qnno_weights(n, p, spec, renormalize).raw_sum;
    row.error = trace_norm(qnno_apply(f, rho, n, spec, renormalize, threads) - exact);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace qvd
