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

#include "qvd_harness/serialize.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "qvd/error.hpp"

namespace qvd::harness {

namespace {

[[noreturn]] void fail(std::string_view where, const std::string& what) {
  throw ConfigError(std::string(where) + ": " + what);
}

double get_number(const Json& j, std::string_view key, std::string_view where) {
  if (!j.contains(key)) fail(where, "missing key '" + std::string(key) + "'");
  const Json& v = j.at(std::string(key));
  if (!v.is_number()) fail(where, "'" + std::string(key) + "' must be a number");
  return v.get<double>();
}

double get_number_or(const Json& j, std::string_view key, double fallback, std::string_view where) {
  return j.contains(key) ? get_number(j, key, where) : fallback;
}

std::string get_string(const Json& j, std::string_view key, std::string_view where) {
  if (!j.contains(key) || !j.at(std::string(key)).is_string()) {
    fail(where, "'" + std::string(key) + "' must be a string");
  }
  return j.at(std::string(key)).get<std::string>();
}

int get_int(const Json& j, std::string_view key, std::string_view where) {
  if (!j.contains(key) || !j.at(std::string(key)).is_number_integer()) {
    fail(where, "'" + std::string(key) + "' must be an integer");
  }
  return j.at(std::string(key)).get<int>();
}

Channel zoo_channel(const Json& j, std::string_view where) {
  const std::string name = get_string(j, "zoo", where);
  if (name == "identity") {
    check_keys(j, {"zoo", "dim"}, where);
    return identity_channel(get_int(j, "dim", where));
  }
  if (name == "depolarizing") {
    check_keys(j, {"zoo", "dim", "p"}, where);
    return depolarizing_channel(get_int(j, "dim", where), get_number(j, "p", where));
  }
  if (name == "amplitude_damping") {
    check_keys(j, {"zoo", "gamma"}, where);
    return amplitude_damping_channel(get_number(j, "gamma", where));
  }
  if (name == "dephasing") {
    check_keys(j, {"zoo", "p"}, where);
    return dephasing_channel(get_number(j, "p", where));
  }
  if (name == "random") {
    check_keys(j, {"zoo", "dim", "rank", "seed"}, where);
    return random_cptp(get_int(j, "dim", where), get_int(j, "rank", where),
                       static_cast<std::uint64_t>(get_int(j, "seed", where)));
  }
  fail(where, "unknown zoo channel '" + name + "'");
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

void check_keys(const Json& j, std::initializer_list<std::string_view> allowed, std::string_view where) {
  if (!j.is_object()) fail(where, "expected an object");
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (auto a : allowed) ok = ok || key == a;
    if (!ok) fail(where, "unknown key '" + key + "'");
  }
}

Json matrix_to_json(const ComplexMatrix& m) {
  Json re = Json::array();
  Json im = Json::array();
  for (Index r = 0; r < m.rows(); ++r) {
    for (Index c = 0; c < m.cols(); ++c) {
      re.push_back(m(r, c).real());
      im.push_back(m(r, c).imag());
    }
  }
  return Json{{"rows", m.rows()}, {"cols", m.cols()}, {"re", re}, {"im", im}};
}

ComplexMatrix matrix_from_json(const Json& j, std::string_view where) {
  check_keys(j, {"rows", "cols", "re", "im"}, where);
  const int rows = get_int(j, "rows", where);
  const int cols = get_int(j, "cols", where);
  if (rows < 1 || cols < 1) fail(where, "matrix dimensions must be positive");
  const auto count = static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols);
  if (!j.contains("re") || !j["re"].is_array() || j["re"].size() != count) {
    fail(where, "'re' must hold rows*cols numbers");
  }
  const bool has_im = j.contains("im");
  if (has_im && (!j["im"].is_array() || j["im"].size() != count)) {
    fail(where, "'im' must hold rows*cols numbers");
  }
  ComplexMatrix m(rows, cols);
  for (std::size_t i = 0; i < count; ++i) {
    if (!j["re"][i].is_number() || (has_im && !j["im"][i].is_number())) fail(where, "non-numeric entry");
    m(static_cast<Index>(i) / cols, static_cast<Index>(i) % cols) =
        Complex{j["re"][i].get<double>(), has_im ? j["im"][i].get<double>() : 0.0};
  }
  return m;
}

Json channel_to_json(const Channel& c, Representation r) {
  Json j{{"dim", c.dim()}, {"representation", std::string(to_string(r))}};
  if (r == Representation::Kraus) {
    const Channel k = convert_representation(c, Representation::Kraus);
    Json ops = Json::array();
    for (const auto& op : *k.kraus()) ops.push_back(matrix_to_json(op));
    j["operators"] = ops;
  } else if (r == Representation::Choi) {
    j["matrix"] = matrix_to_json(choi_matrix(c));
  } else {
    j["matrix"] = matrix_to_json(liouville_matrix(c));
  }
  return j;
}

Channel channel_from_json(const Json& j, std::string_view where) {
  if (!j.is_object()) fail(where, "channel must be an object");
  try {
    if (j.contains("zoo")) return zoo_channel(j, where);
    const std::string rep = get_string(j, "representation", where);
    const int dim = get_int(j, "dim", where);
    Channel c = [&] {
      const Representation r = representation_from_string(rep);
      if (r == Representation::Kraus) {
        check_keys(j, {"dim", "representation", "operators"}, where);
        if (!j.contains("operators") || !j["operators"].is_array()) fail(where, "'operators' must be an array");
        std::vector<ComplexMatrix> ops;
        for (const auto& op : j["operators"]) ops.push_back(matrix_from_json(op, where));
        return Channel::from_kraus(ops);
      }
      check_keys(j, {"dim", "representation", "matrix"}, where);
      if (!j.contains("matrix")) fail(where, "missing key 'matrix'");
      const ComplexMatrix m = matrix_from_json(j["matrix"], where);
      return r == Representation::Choi ? Channel::from_choi(m) : Channel::from_liouville(m);
    }();
    if (c.dim() != dim) fail(where, "'dim' does not match the matrix shape");
    return c;
  } catch (const qvd::Error& e) {
    fail(where, e.what());
  }
}

StateMapPtr state_map_from_json(const Json& j, Index dim, std::string_view where) {
  const std::string kind = get_string(j, "kind", where);
  try {
    if (kind == "linear") {
      check_keys(j, {"kind", "channel"}, where);
      if (!j.contains("channel")) fail(where, "missing key 'channel'");
      Channel c = channel_from_json(j["channel"], where);
      if (c.dim() != dim) fail(where, "channel dimension differs from the config dimension");
      return std::make_shared<LinearChannelMap>(std::move(c));
    }
    if (kind == "spectral") {
      check_keys(j, {"kind", "function", "exponent"}, where);
      return make_spectral_map(get_string(j, "function", where), get_number_or(j, "exponent", 1.0, where));
    }
    if (kind == "polynomial") {
      check_keys(j, {"kind", "power", "scale"}, where);
      return std::make_shared<PolynomialMap>(get_int(j, "power", where), get_number_or(j, "scale", 1.0, where));
    }
    if (kind == "holder") {
      check_keys(j, {"kind", "gamma", "reference", "declared_m"}, where);
      const double gamma = get_number(j, "gamma", where);
      const ComplexMatrix ref = j.contains("reference") ? matrix_from_json(j["reference"], where)
                                                        : ComplexMatrix::Zero(dim, dim);
      if (ref.rows() != dim || ref.cols() != dim) fail(where, "holder reference has the wrong shape");
      if (j.contains("declared_m")) {
        return std::make_shared<HolderTestMap>(ref, gamma, Regularity{get_int(j, "declared_m", where), gamma});
      }
      return std::make_shared<HolderTestMap>(ref, gamma);
    }
    if (kind == "composite") {
      check_keys(j, {"kind", "op", "terms"}, where);
      const std::string op = get_string(j, "op", where);
      if (op != "sum" && op != "product") fail(where, "'op' must be 'sum' or 'product'");
      if (!j.contains("terms") || !j["terms"].is_array()) fail(where, "'terms' must be an array");
      std::vector<ScaledCompositeMap::Term> terms;
      for (const auto& t : j["terms"]) {
        check_keys(t, {"weight", "map"}, where);
        Complex w{1.0, 0.0};
        if (t.contains("weight")) {
          const Json& wj = t["weight"];
          if (wj.is_number()) {
            w = wj.get<double>();
          } else if (wj.is_array() && wj.size() == 2 && wj[0].is_number() && wj[1].is_number()) {
            w = Complex{wj[0].get<double>(), wj[1].get<double>()};
          } else {
            fail(where, "'weight' must be a number or [re, im]");
          }
        }
        if (!t.contains("map")) fail(where, "composite term needs 'map'");
        terms.emplace_back(w, state_map_from_json(t["map"], dim, where));
      }
      return std::make_shared<ScaledCompositeMap>(
          op == "sum" ? ScaledCompositeMap::Op::Sum : ScaledCompositeMap::Op::Product, std::move(terms));
    }
  } catch (const qvd::Error& e) {
    fail(where, e.what());
  }
  fail(where, "unknown map kind '" + kind + "'");
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write '" + tmp.string() + "'");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw ConfigError("write failed for '" + tmp.string() + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw ConfigError("cannot rename '" + tmp.string() + "': " + ec.message());
}

}  // namespace qvd::harness
