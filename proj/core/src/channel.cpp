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

#include "qvd/channel.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "qvd/error.hpp"
#include "qvd/random.hpp"

namespace qvd {

std::string_view to_string(Representation r) {
  switch (r) {
    case Representation::Kraus:
      return "kraus";
    case Representation::Choi:
      return "choi";
    case Representation::Liouville:
      return "liouville";
  }
  return "unknown";
}

Representation representation_from_string(std::string_view s) {
  if (s == "kraus") return Representation::Kraus;
  if (s == "choi") return Representation::Choi;
  if (s == "liouville") return Representation::Liouville;
  throw InvalidArgument("unknown channel representation '" + std::string(s) + "'");
}

namespace {

Index superop_dim(const ComplexMatrix& m, const char* what) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw InvalidArgument(std::string(what) + ": matrix must be square and non-empty");
  }
  const auto d = static_cast<Index>(std::llround(std::sqrt(static_cast<double>(m.rows()))));
  if (d * d != m.rows()) {
    throw InvalidArgument(std::string(what) + ": size is not a perfect square");
  }
  return d;
}

double completeness_deviation(const std::vector<ComplexMatrix>& kraus) {
  const Index d = kraus.front().rows();
  ComplexMatrix acc = ComplexMatrix::Zero(d, d);
  for (const auto& k : kraus) acc += k.adjoint() * k;
  return operator_norm(acc - ComplexMatrix::Identity(d, d));
}

}  // namespace

bool Channel::has(Representation r) const {
  switch (r) {
    case Representation::Kraus:
      return kraus_.has_value();
    case Representation::Choi:
      return choi_.has_value();
    case Representation::Liouville:
      return liouville_.has_value();
  }
  return false;
}

Channel Channel::from_kraus(std::vector<ComplexMatrix> kraus, bool demand_cptp, double tol) {
  if (kraus.empty()) {
    throw InvalidArgument("channel_from_kraus: empty Kraus list");
  }
  const Index d = kraus.front().rows();
  for (const auto& k : kraus) {
    if (k.rows() != d || k.cols() != d || d == 0) {
      throw InvalidArgument("channel_from_kraus: Kraus operators must share one square dimension");
    }
  }
  const double dev = completeness_deviation(kraus);
  if (demand_cptp && dev > tol) {
    std::ostringstream msg;
    msg << "channel_from_kraus: completeness violated by " << dev;
    throw InvalidArgument(msg.str());
  }
  Channel c;
  c.dim_ = d;
  c.cptp_ = dev <= tol;
  c.kraus_ = std::move(kraus);
  return c;
}

Channel Channel::from_choi(ComplexMatrix choi, double tol) {
  Channel c;
  c.dim_ = superop_dim(choi, "channel_from_choi");
  c.choi_ = std::move(choi);
  c.cptp_ = verify_cptp(c, tol).pass;
  return c;
}

Channel Channel::from_liouville(ComplexMatrix liouville, double tol) {
  Channel c;
  c.dim_ = superop_dim(liouville, "channel_from_liouville");
  c.liouville_ = std::move(liouville);
  c.cptp_ = verify_cptp(c, tol).pass;
  return c;
}

ComplexMatrix choi_from_kraus(const std::vector<ComplexMatrix>& kraus) {
  const Index d = kraus.front().rows();
  ComplexMatrix j = ComplexMatrix::Zero(d * d, d * d);
  for (const auto& k : kraus) {
    // column (a, i) of the vectorized Kraus operator: v(a*d + i) = K(a, i)
    ComplexVector v(d * d);
    for (Index a = 0; a < d; ++a) {
      for (Index i = 0; i < d; ++i) v(a * d + i) = k(a, i);
    }
    j.noalias() += v * v.adjoint();
  }
  return j;
}

ComplexMatrix liouville_from_kraus(const std::vector<ComplexMatrix>& kraus) {
  const Index d = kraus.front().rows();
  ComplexMatrix l = ComplexMatrix::Zero(d * d, d * d);
  for (const auto& k : kraus) l += kron(k.conjugate(), k);
  return l;
}

ComplexMatrix liouville_from_choi(const ComplexMatrix& choi, Index d) {
  ComplexMatrix l(d * d, d * d);
  for (Index a = 0; a < d; ++a)
    for (Index i = 0; i < d; ++i)
      for (Index b = 0; b < d; ++b)
        for (Index j = 0; j < d; ++j) l(a + b * d, i + j * d) = choi(a * d + i, b * d + j);
  return l;
}

ComplexMatrix choi_from_liouville(const ComplexMatrix& liouville, Index d) {
  ComplexMatrix c(d * d, d * d);
  for (Index a = 0; a < d; ++a)
    for (Index i = 0; i < d; ++i)
      for (Index b = 0; b < d; ++b)
        for (Index j = 0; j < d; ++j) c(a * d + i, b * d + j) = liouville(a + b * d, i + j * d);
  return c;
}

std::vector<ComplexMatrix> kraus_from_choi(const ComplexMatrix& choi, Index d, double tol) {
  Eigensystem es = eigh(choi, std::max(tol, 1e-9));
  if (es.values(0) < -tol) {
    std::ostringstream msg;
    msg << "kraus_from_choi: Choi matrix is not PSD (min eigenvalue " << es.values(0) << ")";
    throw InvalidArgument(msg.str());
  }
  std::vector<ComplexMatrix> kraus;
  // descending eigenvalue order gives a canonical Kraus ordering
  for (Index r = es.values.size() - 1; r >= 0; --r) {
    const double lam = es.values(r);
    if (lam <= tol) continue;
    ComplexMatrix k(d, d);
    for (Index a = 0; a < d; ++a)
      for (Index i = 0; i < d; ++i) k(a, i) = std::sqrt(lam) * es.vectors(a * d + i, r);
    kraus.push_back(std::move(k));
  }
  if (kraus.empty()) kraus.push_back(ComplexMatrix::Zero(d, d));
  return kraus;
}

ComplexMatrix choi_matrix(const Channel& c) {
  if (c.choi()) return *c.choi();
  if (c.liouville()) return choi_from_liouville(*c.liouville(), c.dim());
  if (c.kraus()) return choi_from_kraus(*c.kraus());
  throw InvalidArgument("channel has no representation");
}

ComplexMatrix liouville_matrix(const Channel& c) {
  if (c.liouville()) return *c.liouville();
  if (c.kraus()) return liouville_from_kraus(*c.kraus());
  if (c.choi()) return liouville_from_choi(*c.choi(), c.dim());
  throw InvalidArgument("channel has no representation");
}

Channel convert_representation(const Channel& c, Representation target, double tol) {
  if (!c.kraus() && !c.choi() && !c.liouville()) {
    throw InvalidArgument("convert_representation: channel has no representation");
  }
  Channel out = c;
  switch (target) {
    case Representation::Choi:
      if (!out.choi_) out.choi_ = choi_matrix(c);
      break;
    case Representation::Liouville:
      if (!out.liouville_) out.liouville_ = liouville_matrix(c);
      break;
    case Representation::Kraus:
      if (!out.kraus_) out.kraus_ = kraus_from_choi(choi_matrix(c), c.dim(), tol);
      break;
  }
  return out;
}

ComplexMatrix apply_channel(const Channel& c, const ComplexMatrix& x) {
  const Index d = c.dim();
  if (x.rows() != d || x.cols() != d) {
    std::ostringstream msg;
    msg << "apply_channel: input is " << x.rows() << "x" << x.cols() << ", channel dim " << d;
    throw InvalidArgument(msg.str());
  }
  if (c.kraus()) {
    ComplexMatrix out = ComplexMatrix::Zero(d, d);
    for (const auto& k : *c.kraus()) out.noalias() += k * x * k.adjoint();
    return out;
  }
  return unvec(liouville_matrix(c) * vec(x), d, d);
}

CptpReport verify_cptp(const Channel& c, double tol) {
  const ComplexMatrix j = choi_matrix(c);
  const Index d = c.dim();
  CptpReport report;
  report.min_choi_eigenvalue = min_eigenvalue(j);
  report.tp_deviation =
      operator_norm(partial_trace(j, d, d, Subsystem::B) - ComplexMatrix::Identity(d, d));
  report.pass = report.min_choi_eigenvalue >= -tol && report.tp_deviation <= tol;
  return report;
}

Channel combine(const Channel& c1, Complex a, const Channel& c2, Complex b) {
  if (c1.dim() != c2.dim()) {
    throw InvalidArgument("combine: channel dimensions differ");
  }
  return Channel::from_choi(a * choi_matrix(c1) + b * choi_matrix(c2));
}

Channel identity_channel(Index d) {
  if (d < 1) throw InvalidArgument("identity_channel: d must be >= 1");
  return Channel::from_kraus({ComplexMatrix::Identity(d, d)}, true);
}

Channel unitary_channel(const ComplexMatrix& u) {
  return Channel::from_kraus({u}, true, 1e-9);
}

Channel depolarizing_channel(Index d, double p) {
  const double d2 = static_cast<double>(d * d);
  if (d < 1 || p < 0.0 || p > d2 / std::max(d2 - 1.0, 1.0)) {
    throw InvalidArgument("depolarizing_channel: need d >= 1 and 0 <= p <= d^2/(d^2-1)");
  }
  ComplexMatrix shift = ComplexMatrix::Zero(d, d);
  ComplexMatrix clock = ComplexMatrix::Zero(d, d);
  for (Index j = 0; j < d; ++j) {
    shift((j + 1) % d, j) = 1.0;
    clock(j, j) = std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(j) / d);
  }
  std::vector<ComplexMatrix> kraus;
  ComplexMatrix xa = ComplexMatrix::Identity(d, d);
  for (Index a = 0; a < d; ++a) {
    ComplexMatrix zb = ComplexMatrix::Identity(d, d);
    for (Index b = 0; b < d; ++b) {
      const double w = (a == 0 && b == 0) ? 1.0 - p + p / d2 : p / d2;
      if (w > 0.0) kraus.push_back(std::sqrt(w) * (xa * zb));
      zb = zb * clock;
    }
    xa = xa * shift;
  }
  return Channel::from_kraus(std::move(kraus), true, 1e-9);
}

Channel amplitude_damping_channel(double gamma) {
  if (gamma < 0.0 || gamma > 1.0) {
    throw InvalidArgument("amplitude_damping_channel: gamma must lie in [0, 1]");
  }
  ComplexMatrix k1 = ComplexMatrix::Zero(2, 2);
  ComplexMatrix k2 = ComplexMatrix::Zero(2, 2);
  k1(0, 0) = 1.0;
  k1(1, 1) = std::sqrt(1.0 - gamma);
  k2(0, 1) = std::sqrt(gamma);
  return Channel::from_kraus({k1, k2}, true, 1e-9);
}

Channel dephasing_channel(double p) {
  if (p < 0.0 || p > 1.0) {
    throw InvalidArgument("dephasing_channel: p must lie in [0, 1]");
  }
  ComplexMatrix z = ComplexMatrix::Identity(2, 2);
  z(1, 1) = -1.0;
  return Channel::from_kraus(
      {std::sqrt(1.0 - p) * ComplexMatrix::Identity(2, 2), std::sqrt(p) * z}, true, 1e-9);
}

Channel random_cptp(Index d, Index kraus_rank, std::uint64_t seed) {
  if (d < 1 || kraus_rank < 1 || kraus_rank > d * d) {
    throw InvalidArgument("random_cptp: need 1 <= kraus_rank <= d^2");
  }
  CounterRng rng(seed);
  const ComplexMatrix v = orthonormalize_columns(complex_gaussian_matrix(d * kraus_rank, d, rng));
  std::vector<ComplexMatrix> kraus;
  kraus.reserve(static_cast<std::size_t>(kraus_rank));
  for (Index r = 0; r < kraus_rank; ++r) kraus.push_back(v.block(r * d, 0, d, d));
  return Channel::from_kraus(std::move(kraus), true, 1e-10);
}

}  // namespace qvd
