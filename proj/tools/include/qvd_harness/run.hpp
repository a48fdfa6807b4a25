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

#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>

#include "qvd_harness/config.hpp"

namespace qvd::harness {

inline constexpr std::string_view kVersion = "0.3.0";

/// Numerical failure inside a named stage (exit code 3).
class StageError : public std::runtime_error {
 public:
  StageError(std::string stage, const std::string& what)
      : std::runtime_error(stage + ": " + what), stage_(std::move(stage)) {}
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

struct RunOptions {
  int threads = 1;
};

/// Collects payload files and stage timings for one output directory.
class RunContext {
 public:
  RunContext(std::filesystem::path dir, std::string hash);

  const std::filesystem::path& dir() const { return dir_; }
  void write(const std::string& name, const std::string& content);
  template <typename Fn>
  auto stage(const std::string& name, Fn&& fn) -> decltype(fn());
  /// manifest.json (hash, version, checksums of every payload file in the
  /// directory) and timings.json (wall-clock seconds per stage).
  void finish();

 private:
  void record(const std::string& name, double seconds) { timings_[name] += seconds; }

  std::filesystem::path dir_;
  std::string hash_;
  std::map<std::string, double> timings_;
};

/// CSV `alpha,delta,lambda,n,exact,paper,abs_diff,quad_err`, one row per
/// (alpha, delta, lambda, n); an empty lambda list means lambda = log n.
/// Rows whose exact moment cannot be computed carry nan and are listed in `failures`.
std::string report_moments(const MomentsSection& s, std::vector<std::string>* failures = nullptr);

/// Moments over |alpha| <= 4, delta in {0, 0.5, 1}, d <= 2.
MomentsSection default_moments_section();

std::filesystem::path run_experiment(const ExperimentConfig& c, const RunOptions& o = {});
std::filesystem::path run_moments(const ExperimentConfig& c, const RunOptions& o = {});
std::filesystem::path run_moments_standalone(const MomentsSection& s, const std::filesystem::path& out);
std::filesystem::path run_approximate(const ExperimentConfig& c, const RunOptions& o = {});
std::filesystem::path run_romberg(const ExperimentConfig& c, const RunOptions& o = {});
std::filesystem::path run_interpolate(const ExperimentConfig& c, const RunOptions& o = {});
std::filesystem::path run_clt_cov(const ExperimentConfig& c, const RunOptions& o = {});
/// Everything the config enables.
std::filesystem::path run_report(const ExperimentConfig& c, const RunOptions& o = {});

}  // namespace qvd::harness

#include "qvd_harness/run_inl.hpp"
