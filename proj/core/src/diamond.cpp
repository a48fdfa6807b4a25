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

#include <algorithm>
#include <cmath>

#include "qvd/channel.hpp"
#include "qvd/error.hpp"
#include "qvd/random.hpp"

namespace qvd {

namespace {

// W(k, a) = psi(a*d + k); the output is (I (x) W) J (I (x) W)^dagger.
ComplexMatrix bipartite_output(const ComplexMatrix& j, Index d, const ComplexMatrix& w) {
  ComplexMatrix lifted = ComplexMatrix::Zero(d * d, d * d);
  for (Index x = 0; x < d; ++x) lifted.block(x * d, x * d, d, d) = w;
  return lifted * j * lifted.adjoint();
}

struct AscentResult {
  double value = 0.0;
};

// Alternating maximization of Re Tr(S O(W)) over unitaries S and unit-norm W.
// Each half-step cannot decrease the objective, so the sequence of trace
// norms is nondecreasing.
AscentResult ascend(const ComplexMatrix& j, Index d, ComplexMatrix w) {
  constexpr int kMaxIter = 400;
  constexpr double kRelTol = 1e-14;
  const Index n = d * d;
  double best = trace_norm(bipartite_output(j, d, w));
  for (int it = 0; it < kMaxIter; ++it) {
    const ComplexMatrix out = bipartite_output(j, d, w);
    Eigen::BDCSVD<ComplexMatrix> svd(out, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const ComplexMatrix s = svd.matrixV() * svd.matrixU().adjoint();
    // Q[(l,b),(k,a)] = sum_{x,y} S(y*d+l, x*d+k) J(x*d+a, y*d+b)
    ComplexMatrix q = ComplexMatrix::Zero(n, n);
    for (Index l = 0; l < d; ++l)
      for (Index b = 0; b < d; ++b)
        for (Index k = 0; k < d; ++k)
          for (Index a = 0; a < d; ++a) {
            Complex acc{0.0, 0.0};
            for (Index x = 0; x < d; ++x)
              for (Index y = 0; y < d; ++y) acc += s(y * d + l, x * d + k) * j(x * d + a, y * d + b);
            q(l * d + b, k * d + a) = acc;
          }
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(hermitian_part(q));
    const ComplexVector top = es.eigenvectors().col(n - 1);
    ComplexMatrix next(d, d);
    for (Index k = 0; k < d; ++k)
      for (Index a = 0; a < d; ++a) next(k, a) = top(k * d + a);
    const double value = trace_norm(bipartite_output(j, d, next));
    if (value <= best * (1.0 + kRelTol) + 1e-300) {
      if (value > best) best = value;
      break;
    }
    best = value;
    w = next;
  }
  return {best};
}

}  // namespace

double bipartite_output_trace_norm(const ComplexMatrix& delta_choi, Index dim,
                                   const ComplexVector& psi) {
  if (psi.size() != dim * dim || delta_choi.rows() != dim * dim) {
    throw InvalidArgument("bipartite_output_trace_norm: size mismatch");
  }
  ComplexMatrix w(dim, dim);
  for (Index a = 0; a < dim; ++a)
    for (Index k = 0; k < dim; ++k) w(k, a) = psi(a * dim + k);
  return trace_norm(bipartite_output(delta_choi, dim, w));
}

DiamondEstimate diamond_distance(const Channel& c1, const Channel& c2, int restarts,
                                 std::uint64_t seed) {
  if (c1.dim() != c2.dim()) {
    throw InvalidArgument("diamond_distance: channel dimensions differ");
  }
  if (restarts < 1) {
    throw InvalidArgument("diamond_distance: restarts must be >= 1");
  }
  const Index d = c1.dim();
  const ComplexMatrix j = choi_matrix(c1) - choi_matrix(c2);
  DiamondEstimate est;
  est.upper_bound = trace_norm(j);
  est.lower_bound = est.upper_bound / static_cast<double>(d);
  if (est.upper_bound == 0.0) return est;

  double best = 0.0;
  for (int r = 0; r < restarts; ++r) {
    ComplexMatrix w;
    if (r == 0) {
      w = ComplexMatrix::Identity(d, d) / std::sqrt(static_cast<double>(d));
    } else {
      CounterRng rng(derive_seed(seed, static_cast<std::uint64_t>(r)));
      w = complex_gaussian_matrix(d, d, rng);
      w /= w.norm();
    }
    best = std::max(best, ascend(j, d, w).value);
  }
  est.value = std::clamp(best, est.lower_bound, est.upper_bound);
  return est;
}

}  // namespace qvd
