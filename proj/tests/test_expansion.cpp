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

#include <cmath>
#include <memory>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "qvd/channel.hpp"
#include "qvd/error.hpp"
#include "qvd/expansion.hpp"
#include "qvd/random.hpp"

namespace qvd {
namespace {

using namespace std::complex_literals;

double max_abs(const ComplexMatrix& m) { return m.cwiseAbs().maxCoeff(); }

DensityOperator rotated_state(std::vector<double> p, std::uint64_t seed) {
  return DensityOperator::from_spectrum(p, random_unitary(static_cast<Index>(p.size()), seed));
}

TEST(DeformedCommutator, Cases) {
  CounterRng rng(1);
  const ComplexMatrix a = complex_gaussian_matrix(3, 3, rng);
  const ComplexMatrix b = complex_gaussian_matrix(3, 3, rng);
  EXPECT_LT(max_abs(deformed_commutator(a, b, 0.0) - (a * b - b * a)), 1e-14);
  EXPECT_LT(max_abs(deformed_commutator(a, b, 1.0) - (a * b + b * a)), 1e-14);
  EXPECT_LT(max_abs(deformed_commutator(a, a, 0.3) - (1.0 - std::exp(1i * std::numbers::pi * 0.3)) * a * a), 1e-13);
  EXPECT_LT(max_abs(deformed_commutator(a, b, 0.5) - (a * b - 1i * b * a)), 1e-13);
  EXPECT_THROW(deformed_commutator(a, ComplexMatrix::Identity(2, 2), 0.5), InvalidArgument);
}

TEST(MultiIndices, CountAndOrder) {
  const auto idx = multi_indices(2, 3);
  ASSERT_EQ(idx.size(), 6u);
  EXPECT_EQ(idx.front(), (MultiIndex{2, 0, 0}));
  EXPECT_EQ(idx.back(), (MultiIndex{0, 0, 2}));
  EXPECT_EQ(multi_indices(0, 2), (std::vector<MultiIndex>{MultiIndex{0, 0}}));
  EXPECT_EQ(multinomial(MultiIndex{2, 1, 1}), 12.0);
}

TEST(CoeffA, OddOrdersAreExactlyZero) {
  const auto f = make_spectral_map("sqrt");
  const DensityOperator rho = rotated_state({0.5, 0.3, 0.2}, 2);
  for (int j : {1, 3}) {
    const ComplexMatrix a = coeff_a(j, *f, rho, 16, KernelSpec::for_n(16, 3));
    EXPECT_TRUE((a.array() == Complex(0.0, 0.0)).all()) << j;
  }
}

TEST(CoeffA, QuadraticMapHandAssembly) {
  // D^2 rho^2 [E_i, E_i] = 2 E_i, mixed terms vanish (E_1 E_2 = 0), and the
  // one-dimensional second moment is 1/3 + pi^2 / (12 lambda^2), so a_2 = m_2 I.
  const double lambda = 8.0;
  const std::vector<double> p{0.6, 0.4};
  const DensityOperator rho = DensityOperator::diagonal(p);
  const PolynomialMap f(2);
  const ComplexMatrix a2 = coeff_a(2, f, rho, 32, KernelSpec{1.0, lambda, 2});
  const double m2 = 1.0 / 3.0 + std::numbers::pi * std::numbers::pi / (12.0 * lambda * lambda);
  EXPECT_LT(max_abs(a2 - m2 * ComplexMatrix::Identity(2, 2)), 1e-5);
}

TEST(CoeffA, PaperMomentsSelectable) {
  const std::vector<double> p{0.6, 0.4};
  const DensityOperator rho = DensityOperator::diagonal(p);
  const PolynomialMap f(2);
  ExpansionOptions o;
  o.source = MomentSource::Paper;
  const int n = 32;
  const ComplexMatrix a2 = coeff_a(2, f, rho, n, KernelSpec::for_n(n, 2), o);
  const double paper_m2 = -std::numbers::pi / (2.0 * std::log(static_cast<double>(n)));
  EXPECT_LT(max_abs(a2 - paper_m2 * ComplexMatrix::Identity(2, 2)), 1e-5);
}

TEST(CoeffA, LinearMapSecondOrderVanishes) {
  const LinearChannelMap f(random_cptp(2, 2, 3));
  const DensityOperator rho = rotated_state({0.7, 0.3}, 4);
  EXPECT_LT(max_abs(coeff_a(2, f, rho, 32, KernelSpec::for_n(32, 2))), 1e-6);
}

TEST(CoeffA, HermitianForHermitianMaps) {
  const auto f = make_spectral_map("sqrt");
  const DensityOperator rho = rotated_state({0.5, 0.3, 0.2}, 5);
  const ComplexMatrix a2 = coeff_a(2, *f, rho, 16, KernelSpec::for_n(16, 3));
  EXPECT_LT(hermiticity_deviation(a2), 1e-6);
  EXPECT_GT(a2.norm(), 1e-3);
}

TEST(CoeffA, RegularityAndOrderGuards) {
  const HolderTestMap f(ComplexMatrix::Identity(2, 2) / 2.0, 0.5);
  const DensityOperator rho = rotated_state({0.7, 0.3}, 6);
  EXPECT_THROW(coeff_a(1, f, rho, 8, KernelSpec::for_n(8, 2)), InvalidArgument);
  EXPECT_THROW(coeff_a(5, PolynomialMap(2), rho, 8, KernelSpec::for_n(8, 2)), InvalidArgument);
}

TEST(CoeffB, ConstantMapIsZero) {
  const ConstantMap f(ComplexMatrix::Identity(2, 2));
  const DensityOperator rho = rotated_state({0.7, 0.3}, 7);
  EXPECT_EQ(max_abs(coeff_b(1, f, rho, 16, KernelSpec::for_n(16, 2), 0.5)), 0.0);
}

TEST(CoeffB, LinearMapIsZero) {
  const LinearChannelMap f(random_cptp(2, 2, 8));
  const DensityOperator rho = rotated_state({0.7, 0.3}, 9);
  EXPECT_LT(max_abs(coeff_b(1, f, rho, 16, KernelSpec::for_n(16, 2), 0.5)), 1e-5);
}

TEST(CoeffB, HolderMapNonzero) {
  const DensityOperator rho = rotated_state({0.7, 0.3}, 10);
  const HolderTestMap f(ComplexMatrix::Identity(2, 2) / 2.0, 0.5, Regularity{4, 0.5});
  const KernelSpec spec = KernelSpec::for_n(32, 2);
  // first-order multi-indices are odd, so exact moments annihilate b_1
  EXPECT_EQ(max_abs(coeff_b(1, f, rho, 32, spec, 0.5)), 0.0);
  const ComplexMatrix b2 = coeff_b(2, f, rho, 32, spec, 0.5);
  EXPECT_TRUE(b2.allFinite());
  EXPECT_GT(b2.norm(), 1e-6);
  EXPECT_EQ(b2, coeff_b(2, f, rho, 32, spec, 0.5));
}

TEST(CoeffB, MaximallyMixedCentersToZero) {
  const std::vector<double> p{0.5, 0.5};
  const DensityOperator rho = DensityOperator::diagonal(p);
  EXPECT_EQ(max_abs(coeff_b(1, PolynomialMap(3), rho, 16, KernelSpec::for_n(16, 2), 0.5)), 0.0);
}

TEST(CoeffB, ExplicitDirectionUsed) {
  const std::vector<double> p{0.6, 0.4};
  const DensityOperator rho = DensityOperator::diagonal(p);
  ExpansionOptions o;
  o.marchaud_direction = ComplexMatrix::Zero(2, 2);
  EXPECT_EQ(max_abs(coeff_b(1, PolynomialMap(3), rho, 16, KernelSpec::for_n(16, 2), 0.5, o)), 0.0);
}

TEST(CoeffC, ParityAndCommutingCases) {
  const std::vector<double> p{0.6, 0.4};
  const DensityOperator rho = DensityOperator::diagonal(p);
  const PolynomialMap f(3);
  for (double g : {0.5, 1.0}) {
    const ComplexMatrix c1 = coeff_c(1, f, rho, 32, KernelSpec::for_n(32, 2), g);
    EXPECT_TRUE((c1.array() == Complex(0.0, 0.0)).all()) << g;
  }
  EXPECT_THROW(coeff_c(2, f, rho, 32, KernelSpec::for_n(32, 2), 0.5), InvalidArgument);
}

TEST(ExpansionCoefficients, Shapes) {
  const auto f = make_spectral_map("sqrt");
  const DensityOperator rho = rotated_state({0.5, 0.3, 0.2}, 11);
  const ExpansionCoefficients c = expansion_coefficients(*f, rho, 16, 4, 1.0, KernelSpec::for_n(16, 3));
  EXPECT_EQ(c.a.size(), 4u);
  EXPECT_EQ(c.b.size(), 2u);
  EXPECT_EQ(c.c.size(), 1u);
  for (const auto& [j, m] : c.a) {
    EXPECT_EQ(m.rows(), 3);
    EXPECT_EQ(m.cols(), 3);
  }
}

TEST(ExpansionCoefficients, ZooChannelsAreDegenerate) {
  const std::vector<Channel> zoo{identity_channel(2), depolarizing_channel(2, 0.3), amplitude_damping_channel(0.4),
                                 dephasing_channel(0.25), random_cptp(2, 3, 12)};
  const DensityOperator rho = rotated_state({0.7, 0.3}, 13);
  const int n = 16;
  for (const Channel& c : zoo) {
    const LinearChannelMap f(c);
    const ExpansionCoefficients e = expansion_coefficients(f, rho, n, 4, 0.5, KernelSpec::for_n(n, 2));
    // fourth-order stencils at the standard step sit at the eps^(1/3) rounding floor
    for (const auto& [j, m] : e.a) {
      if (j >= 2) EXPECT_LT(max_abs(m), j < 4 ? 1e-6 : 2e-5) << "a" << j;
    }
    for (const auto& [j, m] : e.b) EXPECT_LT(max_abs(m), j < 2 ? 1e-5 : 5e-5) << "b" << j;
  }
}

TEST(ExpansionCoefficients, DeclaredRegularityChecked) {
  const HolderTestMap f(ComplexMatrix::Identity(2, 2) / 2.0, 0.5);
  const DensityOperator rho = rotated_state({0.7, 0.3}, 14);
  EXPECT_THROW(expansion_coefficients(f, rho, 16, 2, 0.5, KernelSpec::for_n(16, 2)), InvalidArgument);
}

TEST(PredictedError, ConstantAndLinear) {
  const DensityOperator rho = rotated_state({0.7, 0.3}, 15);
  const ConstantMap c(ComplexMatrix::Identity(2, 2));
  EXPECT_EQ(max_abs(predicted_error(c, rho, 16, 2, 1.0, KernelSpec::for_n(16, 2)).partial_sum), 0.0);
  const LinearChannelMap f(random_cptp(2, 2, 16));
  EXPECT_LT(max_abs(predicted_error(f, rho, 16, 2, 1.0, KernelSpec::for_n(16, 2)).partial_sum), 1e-6);
}

TEST(PredictedError, TermsScaleByTheirOrder) {
  const auto f = make_spectral_map("sqrt");
  const DensityOperator rho = rotated_state({0.6, 0.4}, 17);
  const int n = 32;
  const double gamma = 0.75;
  const PredictedError pe = predicted_error(*f, rho, n, 4, gamma, KernelSpec::for_n(n, 2));
  ComplexMatrix sum = ComplexMatrix::Zero(2, 2);
  for (const ExpansionTerm& t : pe.terms) {
    const auto& coeffs = t.kind == 'a' ? pe.coefficients.a : t.kind == 'b' ? pe.coefficients.b : pe.coefficients.c;
    const double want_order = t.kind == 'a' ? t.j : t.kind == 'b' ? t.j + gamma : t.j + 2.0 * gamma;
    EXPECT_EQ(t.order, want_order);
    EXPECT_LT(max_abs(t.contribution * std::pow(n, t.order) - coeffs.at(t.j)), 1e-12);
    sum += t.contribution;
  }
  EXPECT_LT(max_abs(sum - pe.partial_sum), 1e-15);
}

TEST(RemainderConstant, HandValue) {
  const double pi = std::numbers::pi;
  const double hand = 16.0 * std::sqrt(2.0) * std::exp(pi * pi / 4.0) / 2.0 * (1.0 + 1.0 / std::sqrt(2.0 * pi));
  const RemainderConstant r = remainder_constant(1, 1.0, 2);
  EXPECT_NEAR(r.value, hand, 1e-9 * hand);
  EXPECT_NEAR(r.value, 186.6, 0.05);
}

TEST(RemainderConstant, Monotone) {
  for (int m = 1; m <= 4; ++m) {
    for (double g = 0.1; g < 0.95; g += 0.1) {
      EXPECT_GT(remainder_constant(m, g, 3).value, remainder_constant(m, g + 0.1, 3).value);
    }
  }
  EXPECT_NEAR(remainder_constant(1, 1.0, 1).value, remainder_constant(1, 1.0, 2).value / std::sqrt(2.0), 1e-12);
  EXPECT_THROW(remainder_constant(0, 1.0, 2), InvalidArgument);
  EXPECT_THROW(remainder_constant(1, 0.0, 2), InvalidArgument);
}

TEST(OrderFit, ExactPowerLaws) {
  std::vector<double> n;
  std::vector<double> e1;
  std::vector<double> e2;
  for (int k = 3; k <= 8; ++k) {
    const double x = std::pow(2.0, k);
    n.push_back(x);
    e1.push_back(1.0 / (x * x));
    e2.push_back(5.0 * std::pow(x, -1.5));
  }
  const OrderFit f1 = order_fit(n, e1);
  EXPECT_NEAR(f1.slope, -2.0, 1e-6);
  EXPECT_NEAR(f1.r2, 1.0, 1e-12);
  const OrderFit f2 = order_fit(n, e2);
  EXPECT_NEAR(f2.slope, -1.5, 1e-9);
  EXPECT_NEAR(f2.intercept, std::log(5.0), 1e-9);
}

TEST(OrderFit, NoisyPowerLaw) {
  CounterRng rng(99);
  std::vector<double> n;
  std::vector<double> e;
  for (int k = 3; k <= 10; ++k) {
    const double x = std::pow(2.0, k);
    n.push_back(x);
    e.push_back(std::pow(x, -2.0) * (1.0 + 0.05 * (2.0 * rng.uniform() - 1.0)));
  }
  const OrderFit f = order_fit(n, e);
  EXPECT_NEAR(f.slope, -2.0, 0.1);
  EXPECT_GT(f.r2, 0.99);
}

TEST(OrderFit, NonPositiveEntriesDropped) {
  const std::vector<double> n{8, 16, 32, 64, 128};
  const std::vector<double> e{1.0 / 64, 0.0, 1.0 / 1024, 1.0 / 4096, -1.0};
  const OrderFit f = order_fit(n, e);
  EXPECT_EQ(f.dropped, 2);
  EXPECT_NEAR(f.slope, -2.0, 1e-9);
  const std::vector<double> few{1.0, 0.0, 0.0, 0.5, 0.0};
  EXPECT_THROW(order_fit(n, few), InvalidArgument);
}

TEST(MomentSource, Strings) {
  EXPECT_EQ(to_string(MomentSource::Paper), "paper");
  EXPECT_EQ(moment_source_from_string("exact"), MomentSource::Exact);
  EXPECT_THROW(moment_source_from_string("other"), InvalidArgument);
}

}  // namespace
}  // namespace qvd
