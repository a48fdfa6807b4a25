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

#include <array>
#include <vector>

#include <benchmark/benchmark.h>

#include "qvd/channel.hpp"
#include "qvd/kernel.hpp"
#include "qvd/qnno.hpp"
#include "qvd/random.hpp"
#include "qvd/statemaps.hpp"

namespace {

using namespace qvd;

void BM_QnnoApply(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const int d = static_cast<int>(state.range(1));
  std::vector<double> p(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i) p[static_cast<std::size_t>(i)] = (d - i) * 2.0 / (d * (d + 1.0));
  const DensityOperator rho = DensityOperator::from_spectrum(p, random_unitary(d, 1));
  const LinearChannelMap f(random_cptp(d, 2, 2));
  const KernelSpec spec = KernelSpec::for_n(n, d);
  for (auto _ : state) benchmark::DoNotOptimize(qnno_apply(f, rho, n, spec));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(simplex_size(n, d)));
}
BENCHMARK(BM_QnnoApply)->Args({32, 2})->Args({128, 2})->Args({16, 3})->Args({32, 3})->Args({12, 4});

void BM_MomentExact(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  const double delta = static_cast<double>(state.range(1)) / 2.0;
  const KernelSpec spec{1.0, std::log(64.0), d};
  MultiIndex alpha(static_cast<std::size_t>(d), 0);
  alpha[0] = 2;
  for (auto _ : state) benchmark::DoNotOptimize(moment_exact(spec, alpha, delta));
}
BENCHMARK(BM_MomentExact)->Args({1, 0})->Args({2, 0})->Args({1, 1})->Args({2, 1})->Unit(benchmark::kMillisecond);

void BM_DiamondDistance(benchmark::State& state) {
  const Index d = state.range(0);
  const Channel a = random_cptp(d, 2, 3);
  const Channel b = random_cptp(d, 3, 4);
  for (auto _ : state) benchmark::DoNotOptimize(diamond_distance(a, b));
}
BENCHMARK(BM_DiamondDistance)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);

void BM_FrechetFd(benchmark::State& state) {
  const int order = static_cast<int>(state.range(0));
  const auto f = make_spectral_map("sqrt");
  const ComplexMatrix rho = 0.5 * random_state(3, 5) + ComplexMatrix::Identity(3, 3) / 6.0;
  CounterRng rng(6);
  std::vector<ComplexMatrix> dirs;
  for (int i = 0; i < order; ++i) {
    const ComplexMatrix g = complex_gaussian_matrix(3, 3, rng);
    dirs.push_back(0.5 * (g + g.adjoint()));
  }
  for (auto _ : state) benchmark::DoNotOptimize(frechet_fd(*f, rho, dirs));
}
BENCHMARK(BM_FrechetFd)->DenseRange(1, 4);

}  // namespace

BENCHMARK_MAIN();
