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
#include <stdexcept>
#include <string>
#include <string_view>

#include <json.hpp>

#include "qvd/channel.hpp"
#include "qvd/linalg.hpp"
#include "qvd/statemaps.hpp"

namespace qvd::harness {

using Json = nlohmann::json;

/// Malformed or inconsistent configuration (exit code 2).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// %.17g
std::string format_double(double v);

/// 64-bit FNV-1a.
std::uint64_t fnv1a64(std::string_view bytes);
std::string hex64(std::uint64_t v);

/// {"rows", "cols", "re": [...], "im": [...]} with row-major entries; "im" may be omitted.
Json matrix_to_json(const ComplexMatrix& m);
ComplexMatrix matrix_from_json(const Json& j, std::string_view where);

/// {"dim", "representation": "kraus"|"choi"|"liouville", "matrix" | "operators"}
/// or a zoo entry {"zoo": "identity"|"depolarizing"|"amplitude_damping"|"dephasing"|"random", ...}.
Json channel_to_json(const Channel& c, Representation r = Representation::Choi);
Channel channel_from_json(const Json& j, std::string_view where);

/// StateMap descriptors: kind linear|spectral|polynomial|holder|composite.
StateMapPtr state_map_from_json(const Json& j, Index dim, std::string_view where);

/// Rejects keys of `j` outside `allowed`.
void check_keys(const Json& j, std::initializer_list<std::string_view> allowed, std::string_view where);

/// Writes `content` to `<path>.tmp` and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace qvd::harness
