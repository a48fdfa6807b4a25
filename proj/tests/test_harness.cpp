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

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "qvd/channel.hpp"
#include "qvd/random.hpp"
#include "qvd_harness/config.hpp"
#include "qvd_harness/run.hpp"
#include "qvd_harness/serialize.hpp"

namespace qvd::harness {
namespace {

namespace fs = std::filesystem;

const fs::path kFixtures{QVD_FIXTURE_DIR};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

class TempDir {
 public:
  explicit TempDir(const std::string& name) : path_(fs::temp_directory_path() / ("qvd_test_" + name)) {
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::permissions(path_, fs::perms::owner_all, fs::perm_options::add, ec);
    fs::remove_all(path_, ec);
  }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

int run_cli(const std::string& args, const fs::path& log) {
  const std::string cmd = std::string(QVD_CLI) + " " + args + " > " + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

Json minimal() {
  return Json::parse(R"({
    "schema": "qvd.experiment/1",
    "dimension": 2,
    "map": {"kind": "polynomial", "power": 2},
    "state": {"spectrum": [0.6, 0.4]},
    "n_grid": [4, 8, 16],
    "m": 2,
    "output_dir": "out"
  })");
}

TEST(Serialize, MatrixRoundTripAndLayout) {
  ComplexMatrix m(2, 3);
  m << Complex(1, 2), Complex(3, 0), Complex(0.1, -0.2), Complex(4, 0), Complex(5, 5), Complex(6, 0);
  const Json j = matrix_to_json(m);
  EXPECT_EQ(j.at("rows"), 2);
  EXPECT_EQ(j.at("cols"), 3);
  EXPECT_EQ(j.at("re")[1], 3.0);
  EXPECT_EQ(j.at("im")[0], 2.0);
  EXPECT_EQ(matrix_from_json(j, "m"), m);
  Json bad = j;
  bad["re"].erase(0);
  EXPECT_THROW(matrix_from_json(bad, "m"), ConfigError);
}

TEST(Serialize, ChannelRoundTrip) {
  const Channel c = random_cptp(2, 2, 5);
  for (Representation r : {Representation::Kraus, Representation::Choi, Representation::Liouville}) {
    const Json j = channel_to_json(c, r);
    EXPECT_EQ(j.at("dim"), 2);
    EXPECT_EQ(j.at("representation"), std::string(to_string(r)));
    EXPECT_LT((choi_matrix(channel_from_json(j, "c")) - choi_matrix(c)).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Serialize, FullPrecisionDoubles) {
  EXPECT_EQ(format_double(0.1), "0.10000000000000001");
  EXPECT_EQ(std::stod(format_double(1.0 / 3.0)), 1.0 / 3.0);
}

TEST(Serialize, Fnv1a) {
  EXPECT_EQ(hex64(fnv1a64("")), "cbf29ce484222325");
  EXPECT_EQ(hex64(fnv1a64("a")), "af63dc4c8601ec8c");
}

TEST(Config, MinimalParses) {
  const ExperimentConfig c = parse_config(minimal());
  EXPECT_EQ(c.dimension, 2);
  EXPECT_EQ(c.n_grid, (std::vector<int>{4, 8, 16}));
  EXPECT_EQ(c.expansion_n, c.n_grid);
  EXPECT_EQ(c.lambda_rule.kind, LambdaRule::Kind::LogN);
}

TEST(Config, HashIgnoresOutputDir) {
  Json other = minimal();
  other["output_dir"] = "elsewhere";
  EXPECT_EQ(parse_config(minimal()).hash(), parse_config(other).hash());
  Json changed = minimal();
  changed["q"] = 2.0;
  EXPECT_NE(parse_config(minimal()).hash(), parse_config(changed).hash());
}

TEST(Config, Rejections) {
  auto expect_error = [](const std::function<void(Json&)>& edit) {
    Json j = minimal();
    edit(j);
    EXPECT_THROW(parse_config(j), ConfigError) << j.dump();
  };
  expect_error([](Json& j) { j["unexpected"] = 1; });
  expect_error([](Json& j) { j["schema"] = "qvd.experiment/0"; });
  expect_error([](Json& j) { j["n_grid"] = Json::array({8, 4}); });
  expect_error([](Json& j) { j["n_grid"] = Json::array(); });
  expect_error([](Json& j) { j["map"]["kind"] = "mystery"; });
  expect_error([](Json& j) { j["map"]["colour"] = "red"; });
  expect_error([](Json& j) { j["state"]["spectrum"] = Json::array({0.7, 0.4}); });
  expect_error([](Json& j) { j["state"]["spectrum"] = Json::array({1.0, 0.0}); });
  expect_error([](Json& j) { j["m"] = 7; });
  expect_error([](Json& j) { j["lambda_rule"] = "sqrt_n"; });
  expect_error([](Json& j) { j["lambda_rule"] = Json{{"fixed", -1.0}}; });
  expect_error([](Json& j) { j.erase("dimension"); });
}

TEST(Config, StateMapKinds) {
  const Json spectral = Json::parse(R"({"kind": "spectral", "function": "power", "exponent": 1.5})");
  EXPECT_EQ(state_map_from_json(spectral, 2, "map")->label().rfind("spectral:power", 0), 0u);
  const Json composite = Json::parse(R"({"kind": "composite", "op": "sum", "terms": [
      {"weight": 0.5, "map": {"kind": "polynomial", "power": 2}},
      {"weight": [0, 1], "map": {"kind": "linear", "channel": {"zoo": "depolarizing", "dim": 2, "p": 0.2}}}]})");
  const StateMapPtr f = state_map_from_json(composite, 2, "map");
  const ComplexMatrix rho = random_state(2, 3);
  const ComplexMatrix want =
      0.5 * rho * rho + Complex(0.0, 1.0) * apply_channel(depolarizing_channel(2, 0.2), rho);
  EXPECT_LT((f->evaluate(rho) - want).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Config, FixturesLoad) {
  int count = 0;
  for (const auto& e : fs::directory_iterator(kFixtures)) {
    if (e.path().extension() != ".json") continue;
    EXPECT_NO_THROW(load_config(e.path())) << e.path();
    ++count;
  }
  EXPECT_GE(count, 3);
}

TEST(ReportMoments, HeaderAndOddRows) {
  MomentsSection s;
  s.lambda = {20.0};
  s.alpha = {MultiIndex{1}, MultiIndex{2}};
  s.delta = {0.0};
  s.n = {32};
  std::vector<std::string> failures;
  const std::string csv = report_moments(s, &failures);
  std::istringstream in(csv);
  std::string header;
  std::string odd;
  std::string even;
  std::getline(in, header);
  std::getline(in, odd);
  std::getline(in, even);
  EXPECT_EQ(header, "alpha,delta,lambda,n,exact,paper,abs_diff,quad_err");
  EXPECT_EQ(odd.substr(0, odd.find(',')), "1");
  std::vector<std::string> cells;
  std::stringstream row(odd);
  for (std::string c; std::getline(row, c, ',');) cells.push_back(c);
  ASSERT_EQ(cells.size(), 8u);
  EXPECT_EQ(std::stod(cells[4]), 0.0);
  EXPECT_EQ(std::stod(cells[5]), 0.0);
  EXPECT_EQ(std::stod(cells[6]), 0.0);
  cells.clear();
  std::stringstream row2(even);
  for (std::string c; std::getline(row2, c, ',');) cells.push_back(c);
  EXPECT_NEAR(std::stod(cells[4]), 0.3354, 1e-3);
  EXPECT_TRUE(failures.empty());
}

TEST(ReportMoments, CostGuardReportedPerRow) {
  MomentsSection s;
  s.alpha = {MultiIndex{0, 0, 0, 0}, MultiIndex{2}};
  s.delta = {0.5};
  s.n = {16};
  std::vector<std::string> failures;
  const std::string csv = report_moments(s, &failures);
  EXPECT_EQ(failures.size(), 1u);
  EXPECT_NE(csv.find("nan"), std::string::npos);
}

TEST(Run, ConstantMapSkipsFit) {
  TempDir tmp("constant");
  Overrides o;
  o.out = tmp.path();
  const fs::path dir = run_experiment(load_config(kFixtures / "constant.json", o));
  const std::string curve = slurp(dir / "error_curve.csv");
  EXPECT_EQ(curve.substr(0, curve.find('\n')), "n,lambda,error_trace_norm,raw_weight_sum");
  std::istringstream in(curve);
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    const auto a = line.find(',');
    const auto b = line.find(',', a + 1);
    const auto c = line.find(',', b + 1);
    EXPECT_EQ(std::stod(line.substr(b + 1, c - b - 1)), 0.0) << line;
  }
  const Json fit = Json::parse(slurp(dir / "order_fit.json"));
  EXPECT_EQ(fit.at("status"), "skipped");
  for (const char* f : {"manifest.json", "timings.json", "config.json", "expansion.json", "expansion.csv"}) {
    EXPECT_TRUE(fs::exists(dir / f)) << f;
  }
}

TEST(Run, ManifestChecksumsMatchFiles) {
  TempDir tmp("manifest");
  Overrides o;
  o.out = tmp.path();
  const ExperimentConfig cfg = load_config(kFixtures / "constant.json", o);
  const fs::path dir = run_experiment(cfg);
  const Json m = Json::parse(slurp(dir / "manifest.json"));
  EXPECT_EQ(m.at("config_hash"), cfg.hash());
  EXPECT_EQ(m.at("version"), std::string(kVersion));
  for (const auto& [name, sum] : m.at("files").items()) {
    EXPECT_EQ(sum, hex64(fnv1a64(slurp(dir / name)))) << name;
  }
  EXPECT_FALSE(m.at("files").contains("timings.json"));
}

TEST(Run, DeterministicAcrossRunsAndThreads) {
  TempDir tmp("determinism");
  std::vector<fs::path> dirs;
  for (int i = 0; i < 3; ++i) {
    Overrides o;
    o.out = tmp.path() / std::to_string(i);
    RunOptions ro;
    ro.threads = i == 2 ? 4 : 1;
    dirs.push_back(run_report(load_config(kFixtures / "polynomial_rho2.json", o), ro));
  }
  for (const auto& e : fs::directory_iterator(dirs[0])) {
    const std::string name = e.path().filename().string();
    if (name == "timings.json") continue;
    EXPECT_EQ(slurp(e.path()), slurp(dirs[1] / name)) << name;
    EXPECT_EQ(slurp(e.path()), slurp(dirs[2] / name)) << name;
  }
}

TEST(Cli, HelpForEverySubcommand) {
  TempDir tmp("help");
  for (const char* sub : {"moments", "approximate", "convergence", "romberg", "interpolate", "clt-cov", "report"}) {
    EXPECT_EQ(run_cli(std::string(sub) + " --help", tmp.path() / "log"), 0) << sub;
    EXPECT_NE(slurp(tmp.path() / "log").find("--config"), std::string::npos) << sub;
  }
}

TEST(Cli, UnknownSubcommandExitsTwo) {
  TempDir tmp("unknown");
  EXPECT_EQ(run_cli("frobnicate", tmp.path() / "log"), 2);
  EXPECT_NE(slurp(tmp.path() / "log").find("Usage"), std::string::npos);
}

TEST(Cli, InvalidConfigExitsTwo) {
  TempDir tmp("invalid");
  Json j = minimal();
  j["bogus"] = true;
  std::ofstream(tmp.path() / "bad.json") << j.dump();
  EXPECT_EQ(run_cli("convergence --config " + (tmp.path() / "bad.json").string(), tmp.path() / "log"), 2);
  EXPECT_NE(slurp(tmp.path() / "log").find("bogus"), std::string::npos);
  EXPECT_EQ(run_cli("convergence --config " + (tmp.path() / "missing.json").string(), tmp.path() / "log"), 2);
}

TEST(Cli, CreatesOutputDirectory) {
  TempDir tmp("create");
  const fs::path out = tmp.path() / "nested" / "dir";
  EXPECT_EQ(run_cli("convergence --config " + (kFixtures / "constant.json").string() + " --out " + out.string(),
                    tmp.path() / "log"),
            0);
  EXPECT_TRUE(fs::is_directory(out));
}

TEST(Cli, ReadOnlyOutputExitsTwo) {
  if (::geteuid() == 0) GTEST_SKIP() << "permission bits are not enforced for root";
  TempDir tmp("readonly");
  const fs::path out = tmp.path() / "ro";
  fs::create_directories(out);
  fs::permissions(out, fs::perms::owner_read | fs::perms::owner_exec);
  EXPECT_EQ(run_cli("convergence --config " + (kFixtures / "constant.json").string() + " --out " + out.string(),
                    tmp.path() / "log"),
            2);
}

TEST(Cli, UnwritableOutputExitsTwo) {
  TempDir tmp("unwritable");
  const fs::path file = tmp.path() / "plain_file";
  std::ofstream(file) << "x";
  EXPECT_EQ(run_cli("convergence --config " + (kFixtures / "constant.json").string() + " --out " +
                        (file / "sub").string(),
                    tmp.path() / "log"),
            2);
}

TEST(Cli, NumericalFailureExitsThreeWithStage) {
  TempDir tmp("numeric");
  Json j = minimal();
  j["map"] = Json::parse(R"({"kind": "spectral", "function": "log"})");
  j["lambda_rule"] = Json{{"fixed", 0.2}};
  std::ofstream(tmp.path() / "log_map.json") << j.dump();
  EXPECT_EQ(run_cli("approximate --config " + (tmp.path() / "log_map.json").string() + " --out " +
                        (tmp.path() / "o").string(),
                    tmp.path() / "log"),
            3);
  EXPECT_NE(slurp(tmp.path() / "log").find("stage"), std::string::npos);
}

TEST(Cli, SeedOverrideChangesHash) {
  Overrides o;
  o.seed = 99;
  EXPECT_NE(load_config(kFixtures / "polynomial_rho2.json").hash(),
            load_config(kFixtures / "polynomial_rho2.json", o).hash());
}

}  // namespace
}  // namespace qvd::harness
