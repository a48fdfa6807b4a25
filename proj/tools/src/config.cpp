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

#include "qvd_harness/config.hpp"

#include <fstream>
#include <sstream>

#include "qvd/error.hpp"
#include "qvd/random.hpp"

namespace qvd::harness {

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw ConfigError(where + ": " + what);
}

template <typename T>
std::vector<T> number_list(const Json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) fail(where, "expected a nonempty array");
  std::vector<T> out;
  for (const auto& v : j) {
    if constexpr (std::is_integral_v<T>) {
      if (!v.is_number_integer()) fail(where, "expected integers");
    } else {
      if (!v.is_number()) fail(where, "expected numbers");
    }
    out.push_back(v.get<T>());
  }
  return out;
}

MultiIndex multi_index(const Json& j, const std::string& where) {
  MultiIndex a = number_list<int>(j, where);
  for (int v : a) {
    if (v < 0) fail(where, "multi-index entries must be >= 0");
  }
  return a;
}

bool strictly_increasing(const std::vector<int>& v) {
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v[i] <= v[i - 1]) return false;
  }
  return true;
}

}  // namespace

StateMapPtr ExperimentConfig::build_map() const { return state_map_from_json(map, dimension, "map"); }

DensityOperator ExperimentConfig::build_state() const {
  const auto d = static_cast<Index>(dimension);
  const ComplexMatrix basis = seeds.basis ? random_unitary(d, *seeds.basis) : ComplexMatrix::Identity(d, d);
  return DensityOperator::from_spectrum(spectrum, basis, tolerances);
}

std::string ExperimentConfig::hash() const {
  Json j = source;
  j.erase("output_dir");
  return hex64(fnv1a64(j.dump()));
}

ExperimentConfig parse_config(const Json& input, const Overrides& overrides) {
  Json j = input;
  check_keys(j, {"schema", "dimension", "map", "state", "n_grid", "expansion_n", "lambda_rule", "q",
                 "renormalize", "gamma", "m", "moment_source", "seeds", "tolerances", "output_dir",
                 "moments", "romberg", "interpolate"},
             "config");
  if (!j.contains("schema") || j["schema"] != kSchema) {
    fail("config", "'schema' must be \"" + std::string(kSchema) + "\"");
  }
  if (overrides.out) j["output_dir"] = overrides.out->string();
  if (overrides.seed) {
    if (!j.contains("seeds")) j["seeds"] = Json::object();
    j["seeds"]["base"] = *overrides.seed;
  }

  ExperimentConfig c;
  if (!j.contains("dimension") || !j["dimension"].is_number_integer()) fail("dimension", "must be an integer");
  c.dimension = j["dimension"].get<int>();
  if (c.dimension < 1 || c.dimension > 6) fail("dimension", "must lie in [1, 6]");

  if (!j.contains("map")) fail("config", "missing 'map'");
  c.map = j["map"];

  if (!j.contains("state")) fail("config", "missing 'state'");
  check_keys(j["state"], {"spectrum", "basis_seed"}, "state");
  if (!j["state"].contains("spectrum")) fail("state", "missing 'spectrum'");
  c.spectrum = number_list<double>(j["state"]["spectrum"], "state.spectrum");
  if (static_cast<int>(c.spectrum.size()) != c.dimension) fail("state.spectrum", "length must equal 'dimension'");
  for (double v : c.spectrum) {
    if (!(v > 0.0)) fail("state.spectrum", "entries must be strictly positive");
  }

  if (!j.contains("n_grid")) fail("config", "missing 'n_grid'");
  c.n_grid = number_list<int>(j["n_grid"], "n_grid");
  if (!strictly_increasing(c.n_grid) || c.n_grid.front() < 1) fail("n_grid", "must be positive and strictly increasing");
  c.expansion_n = j.contains("expansion_n") ? number_list<int>(j["expansion_n"], "expansion_n") : c.n_grid;
  if (!strictly_increasing(c.expansion_n) || c.expansion_n.front() < 2) {
    fail("expansion_n", "must be >= 2 and strictly increasing");
  }

  if (j.contains("lambda_rule")) {
    const Json& r = j["lambda_rule"];
    if (r.is_string() && r == "log_n") {
      c.lambda_rule = LambdaRule::log_n();
    } else if (r.is_object()) {
      check_keys(r, {"fixed"}, "lambda_rule");
      if (!r.contains("fixed") || !r["fixed"].is_number() || !(r["fixed"].get<double>() > 0.0)) {
        fail("lambda_rule", "'fixed' must be a positive number");
      }
      c.lambda_rule = LambdaRule::fixed(r["fixed"].get<double>());
    } else {
      fail("lambda_rule", "must be \"log_n\" or {\"fixed\": value}");
    }
  }
  auto number = [&](const char* key, double& slot) {
    if (!j.contains(key)) return;
    if (!j[key].is_number()) fail(key, "must be a number");
    slot = j[key].get<double>();
  };
  number("q", c.q);
  number("gamma", c.gamma);
  if (!(c.q > 0.0)) fail("q", "must be > 0");
  if (!(c.gamma > 0.0 && c.gamma <= 1.0)) fail("gamma", "must lie in (0, 1]");
  if (j.contains("renormalize")) {
    if (!j["renormalize"].is_boolean()) fail("renormalize", "must be a boolean");
    c.renormalize = j["renormalize"].get<bool>();
  }
  if (j.contains("m")) {
    if (!j["m"].is_number_integer()) fail("m", "must be an integer");
    c.m = j["m"].get<int>();
    if (c.m < 1 || c.m > 4) fail("m", "must lie in [1, 4]");
  }
  if (j.contains("moment_source")) {
    if (!j["moment_source"].is_string()) fail("moment_source", "must be \"exact\" or \"paper\"");
    try {
      c.moment_source = moment_source_from_string(j["moment_source"].get<std::string>());
    } catch (const qvd::Error& e) {
      fail("moment_source", e.what());
    }
  }
  if (j.contains("seeds")) {
    check_keys(j["seeds"], {"base"}, "seeds");
    if (j["seeds"].contains("base")) {
      if (!j["seeds"]["base"].is_number_unsigned()) fail("seeds.base", "must be a nonnegative integer");
      c.seeds.base = j["seeds"]["base"].get<std::uint64_t>();
    }
  }
  if (j["state"].contains("basis_seed")) {
    const Json& b = j["state"]["basis_seed"];
    if (b.is_number_unsigned()) {
      c.seeds.basis = b.get<std::uint64_t>();
    } else if (b.is_string() && b == "derived") {
      c.seeds.basis = derive_seed(c.seeds.base, 0);
    } else if (!b.is_null()) {
      fail("state.basis_seed", "must be null, \"derived\" or a nonnegative integer");
    }
  }
  if (j.contains("tolerances")) {
    const Json& t = j["tolerances"];
    check_keys(t, {"hermitian", "trace", "psd", "round_trip", "pos_floor"}, "tolerances");
    auto tol = [&](const char* key, double& slot) {
      if (!t.contains(key)) return;
      if (!t[key].is_number() || !(t[key].get<double>() > 0.0)) fail(std::string("tolerances.") + key, "must be > 0");
      slot = t[key].get<double>();
    };
    tol("hermitian", c.tolerances.hermitian);
    tol("trace", c.tolerances.trace);
    tol("psd", c.tolerances.psd);
    tol("round_trip", c.tolerances.round_trip);
    tol("pos_floor", c.tolerances.pos_floor);
  }
  if (!j.contains("output_dir") || !j["output_dir"].is_string()) fail("output_dir", "must be a path string");
  c.output_dir = j["output_dir"].get<std::string>();

  if (j.contains("moments")) {
    const Json& s = j["moments"];
    check_keys(s, {"lambda", "alpha", "delta", "n"}, "moments");
    MomentsSection m;
    if (s.contains("lambda")) m.lambda = number_list<double>(s["lambda"], "moments.lambda");
    if (!s.contains("alpha") || !s["alpha"].is_array() || s["alpha"].empty()) fail("moments.alpha", "expected a nonempty array");
    for (const auto& a : s["alpha"]) m.alpha.push_back(multi_index(a, "moments.alpha"));
    m.delta = s.contains("delta") ? number_list<double>(s["delta"], "moments.delta") : std::vector<double>{0.0};
    if (!s.contains("n")) fail("moments", "missing 'n'");
    m.n = number_list<int>(s["n"], "moments.n");
    for (int n : m.n) {
      if (n < 2) fail("moments.n", "entries must be >= 2");
    }
    for (double l : m.lambda) {
      if (!(l > 0.0)) fail("moments.lambda", "entries must be > 0");
    }
    for (double dl : m.delta) {
      if (!(dl >= 0.0)) fail("moments.delta", "entries must be >= 0");
    }
    c.moments = m;
  }
  if (j.contains("romberg")) {
    const Json& s = j["romberg"];
    check_keys(s, {"n0", "K", "M"}, "romberg");
    RombergSection r;
    for (auto [key, slot] : {std::pair{"n0", &r.n0}, std::pair{"K", &r.K}, std::pair{"M", &r.M}}) {
      if (!s.contains(key) || !s[key].is_number_integer()) fail(std::string("romberg.") + key, "must be an integer");
      *slot = s[key].get<int>();
    }
    if (r.n0 < 1 || r.M < 1 || r.K < r.M || r.K > 20) fail("romberg", "need n0 >= 1 and 20 >= K >= M >= 1");
    c.romberg = r;
  }
  if (j.contains("interpolate")) {
    const Json& s = j["interpolate"];
    check_keys(s, {"c0", "c1", "t", "project"}, "interpolate");
    InterpolateSection in;
    if (!s.contains("c0") || !s.contains("c1")) fail("interpolate", "needs 'c0' and 'c1'");
    in.c0 = s["c0"];
    in.c1 = s["c1"];
    (void)channel_from_json(in.c0, "interpolate.c0");
    (void)channel_from_json(in.c1, "interpolate.c1");
    in.t = number_list<double>(s.value("t", Json::array({0.5})), "interpolate.t");
    for (double t : in.t) {
      if (!(t > 0.0 && t < 1.0)) fail("interpolate.t", "entries must lie in (0, 1)");
    }
    if (s.contains("project")) {
      if (!s["project"].is_boolean()) fail("interpolate.project", "must be a boolean");
      in.project = s["project"].get<bool>();
    }
    c.interpolate = in;
  }

  // resolve everything that can fail before any computation
  (void)c.build_map();
  try {
    (void)c.build_state();
  } catch (const qvd::Error& e) {
    fail("state", e.what());
  }
  for (int n : c.n_grid) {
    if (simplex_size(n, c.dimension) > SimplexLattice::kMaxPoints) {
      fail("n_grid", "n=" + std::to_string(n) + " exceeds the simplex cost guard");
    }
  }
  c.source = j;
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path, const Overrides& overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config '" + path.string() + "'");
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ConfigError("config '" + path.string() + "' is not valid JSON: " + e.what());
  }
  return parse_config(j, overrides);
}

}  // namespace qvd::harness
