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
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "qvd/applications.hpp"
#include "qvd/expansion.hpp"
#include "qvd/qnno.hpp"
#include "qvd_harness/serialize.hpp"

namespace qvd::harness {

inline constexpr std::string_view kSchema = "qvd.experiment/1";

struct MomentsSection {
  std::vector<double> lambda;  // empty: lambda = log n per row
  std::vector<MultiIndex> alpha;
  std::vector<double> delta;
  std::vector<int> n;
};

struct RombergSection {
  int n0 = 8;
  int K = 4;
  int M = 2;
};

struct InterpolateSection {
  Json c0;
  Json c1;
  std::vector<double> t;
  bool project = true;
};

struct Seeds {
  std::uint64_t base = 1;
  /// Derived from base when absent.
  std::optional<std::uint64_t> basis;
};

struct ExperimentConfig {
  Json source;  // canonical config (overrides applied), hashed
  int dimension = 0;
  Json map;
  std::vector<double> spectrum;
  std::vector<int> n_grid;
  std::vector<int> expansion_n;
  LambdaRule lambda_rule;
  double q = 1.0;
  bool renormalize = true;
  double gamma = 1.0;
  int m = 2;
  MomentSource moment_source = MomentSource::Exact;
  Seeds seeds;
  Tolerances tolerances;
  std::filesystem::path output_dir;
  std::optional<MomentsSection> moments;
  std::optional<RombergSection> romberg;
  std::optional<InterpolateSection> interpolate;

  StateMapPtr build_map() const;
  DensityOperator build_state() const;
  /// FNV-1a of the canonical JSON without output_dir.
  std::string hash() const;
};

struct Overrides {
  std::optional<std::filesystem::path> out;
  std::optional<std::uint64_t> seed;
};

/// Validates the whole document before returning; throws ConfigError.
ExperimentConfig parse_config(const Json& j, const Overrides& overrides = {});
ExperimentConfig load_config(const std::filesystem::path& path, const Overrides& overrides = {});

}  // namespace qvd::harness
