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

#include "qvd/random.hpp"

#include <cmath>
#include <numbers>

#include "qvd/error.hpp"

namespace qvd {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

std::uint64_t splitmix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace

std::uint64_t CounterRng::next_u64() {
  ++counter_;
  return splitmix64(seed_ + counter_ * kGolden);
}

double CounterRng::uniform() {
  // (k + 0.5) / 2^53 never hits 0 or 1.
  const std::uint64_t k = next_u64() >> 11;
  return (static_cast<double>(k) + 0.5) * 0x1.0p-53;
}

double CounterRng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(theta);
  has_spare_ = true;
  return r * std::cos(theta);
}

Complex CounterRng::complex_normal() {
  const double re = normal();
  const double im = normal();
  return {re, im};
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  return splitmix64(splitmix64(seed) ^ splitmix64(stream + kGolden));
}

ComplexMatrix complex_gaussian_matrix(Index rows, Index cols, CounterRng& rng) {
  ComplexMatrix m(rows, cols);
  for (Index j = 0; j < cols; ++j) {
    for (Index i = 0; i < rows; ++i) m(i, j) = rng.complex_normal();
  }
  return m;
}

ComplexMatrix orthonormalize_columns(const ComplexMatrix& m) {
  ComplexMatrix q = m;
  for (Index j = 0; j < q.cols(); ++j) {
    for (Index k = 0; k < j; ++k) {
      const Complex proj = q.col(k).dot(q.col(j));
      q.col(j) -= proj * q.col(k);
    }
    // second pass keeps orthogonality at machine precision
    for (Index k = 0; k < j; ++k) {
      const Complex proj = q.col(k).dot(q.col(j));
      q.col(j) -= proj * q.col(k);
    }
    const double nrm = q.col(j).norm();
    if (!(nrm > 1e-12)) {
      throw NumericalError("orthonormalize_columns: linearly dependent column");
    }
    q.col(j) /= nrm;
  }
  return q;
}

ComplexMatrix random_unitary(Index d, std::uint64_t seed) {
  CounterRng rng(seed);
  return orthonormalize_columns(complex_gaussian_matrix(d, d, rng));
}

ComplexMatrix random_state(Index d, std::uint64_t seed) {
  CounterRng rng(seed);
  const ComplexMatrix g = complex_gaussian_matrix(d, d, rng);
  const ComplexMatrix s = g * g.adjoint();
  return hermitian_part(s / s.trace().real());
}

}  // namespace qvd
