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

#include "qvd/linalg.hpp"

namespace qvd {

/// Counter-based SplitMix64 stream: draw i is splitmix64(seed + (i+1) * golden).
/// Streams for different seeds never share state, and a stream is fully
/// determined by (seed, position).
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

  std::uint64_t next_u64();
  /// Uniform on the open interval (0, 1) with 53 bits of resolution.
  double uniform();
  /// Standard normal via Box-Muller; both variates of each pair are used.
  double normal();
  /// Complex Gaussian with independent N(0, 1) real and imaginary parts.
  Complex complex_normal();

  std::uint64_t position() const { return counter_; }

 private:
  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// Derives an independent child seed; used to give each restart or sample its own stream.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

/// rows x cols matrix of complex Gaussians, filled column by column.
ComplexMatrix complex_gaussian_matrix(Index rows, Index cols, CounterRng& rng);

/// Modified Gram-Schmidt on columns in index order. Throws NumericalError on
/// a (numerically) dependent column.
ComplexMatrix orthonormalize_columns(const ComplexMatrix& m);

/// Haar-like random unitary from orthonormalizing a seeded Gaussian matrix.
ComplexMatrix random_unitary(Index d, std::uint64_t seed);

/// Full-rank mixed state G G^dagger / tr(G G^dagger) from a seeded d x d Gaussian G.
ComplexMatrix random_state(Index d, std::uint64_t seed);

}  // namespace qvd
