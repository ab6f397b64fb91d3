// Copyright 2026 The shotcost Authors
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


#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli/commands.hpp"
#include "cli/config.hpp"
#include "json.hpp"

namespace shotcost::cli {
namespace {

namespace fs = std::filesystem;

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / ("shotcost_cli_" + std::string(info->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string write_config(const std::string& name, const std::string& text) {
    const fs::path p = dir_ / name;
    std::ofstream(p) << text;
    return p.string();
  }

  int run(std::vector<std::string> args) {
    out_.str("");
    err_.str("");
    return run_cli(args, out_, err_);
  }

  std::string read(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
  }

  nlohmann::json read_json(const fs::path& p) { return nlohmann::json::parse(read(p)); }

  fs::path dir_;
  std::ostringstream out_, err_;
};

const char* kMinimal =
    "system:\n  n: 2\nansatz:\n  pattern: B2\nsolver:\n  eta: 0.1\n  lambda: 0.2\n  max_iters: 6\n"
    "eps:\n  mode: absolute\n  value: 0.01\nseed: 5\ninit:\n  mode: random\n";

TEST_F(CliTest, EvolveWritesTraceAndManifest) {
  const auto cfg = write_config("c.yaml", kMinimal);
  const auto out = (dir_ / "run").string();
  ASSERT_EQ(run({"evolve", "-c", cfg, "-o", out}), kOk) << err_.str();
  const std::string csv = read(fs::path(out) / "trace.csv");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 7);
  const auto m = read_json(fs::path(out) / "manifest.json");
  EXPECT_EQ(m["command"], "evolve");
  EXPECT_EQ(m["seed"], 5);
  EXPECT_EQ(m["diverged"], false);
  EXPECT_EQ(m["iterations"], 6);
  for (const auto& f : m["outputs"]) EXPECT_TRUE(fs::exists(f.get<std::string>())) << f;
  EXPECT_EQ(m["outputs"].size(), 3u);
}

TEST_F(CliTest, EvolveIsReproducibleAcrossParallelism) {
  const auto cfg = write_config("c.yaml", kMinimal);
  ASSERT_EQ(run({"evolve", "-c", cfg, "-o", (dir_ / "a").string(), "-j", "1"}), kOk);
  ASSERT_EQ(run({"evolve", "-c", cfg, "-o", (dir_ / "b").string(), "--parallelism", "8"}), kOk);
  ASSERT_EQ(run({"evolve", "-c", cfg, "-o", (dir_ / "c").string()}), kOk);
  const auto a = read(dir_ / "a" / "trace.csv");
  EXPECT_EQ(a, read(dir_ / "b" / "trace.csv"));
  EXPECT_EQ(a, read(dir_ / "c" / "trace.csv"));
}

TEST_F(CliTest, ConfigEchoReproducesRun) {
  const auto cfg = write_config("c.yaml", kMinimal);
  ASSERT_EQ(run({"evolve", "-c", cfg, "-o", (dir_ / "a").string(), "--seed", "9", "--set", "solver.lambda=0.3"}), kOk);
  const std::string echo = (dir_ / "a" / "config.yaml").string();
  ASSERT_EQ(run({"evolve", "-c", echo, "-o", (dir_ / "b").string()}), kOk);
  EXPECT_EQ(read(dir_ / "a" / "trace.csv"), read(dir_ / "b" / "trace.csv"));
  const auto m = read_json(dir_ / "b" / "manifest.json");
  EXPECT_EQ(m["seed"], 9);
}

TEST_F(CliTest, MalformedConfigReportsLineAndKey) {
  const auto unknown = write_config("u.yaml", "system:\n  n: 2\n  qubits: 3\n");
  EXPECT_EQ(run({"evolve", "-c", unknown, "-o", dir_.string()}), kUsage);
  EXPECT_NE(err_.str().find("line 3"), std::string::npos) << err_.str();
  EXPECT_NE(err_.str().find("system.qubits"), std::string::npos);

  const auto type = write_config("t.yaml", "system:\n  n: two\n");
  EXPECT_EQ(run({"evolve", "-c", type, "-o", dir_.string()}), kUsage);
  EXPECT_NE(err_.str().find("system.n"), std::string::npos) << err_.str();

  const auto syntax = write_config("s.yaml", "system: [1, 2\n");
  EXPECT_EQ(run({"evolve", "-c", syntax, "-o", dir_.string()}), kUsage);
  EXPECT_NE(err_.str().find("line"), std::string::npos);

  const auto kind = write_config("k.yaml", "hamiltonian:\n  kind: ladder\n");
  EXPECT_EQ(run({"evolve", "-c", kind, "-o", dir_.string()}), kUsage);
  EXPECT_NE(err_.str().find("hamiltonian.kind"), std::string::npos) << err_.str();

  EXPECT_EQ(run({"evolve", "-c", (dir_ / "missing.yaml").string()}), kUsage);
  EXPECT_EQ(run({"evolve", "--set", "nope=1", "-o", dir_.string()}), kUsage);
  EXPECT_EQ(run({"frobnicate"}), kUsage);
  EXPECT_EQ(run({}), kUsage);
}

TEST_F(CliTest, AllocateOptimalBeatsUniform) {
  const auto cfg = write_config("c.yaml", kMinimal);
  ASSERT_EQ(run({"allocate", "-c", cfg, "-o", (dir_ / "u").string(), "--mode", "uniform"}), kOk) << err_.str();
  ASSERT_EQ(run({"allocate", "-c", cfg, "-o", (dir_ / "o").string(), "--mode", "optimal"}), kOk);
  const auto u = read_json(dir_ / "u" / "plan.json");
  const auto o = read_json(dir_ / "o" / "plan.json");
  EXPECT_LE(o["total"].get<long long>(), u["total"].get<long long>());
  const std::string heat = read(dir_ / "o" / "plan_heatmap.csv");
  EXPECT_EQ(heat.substr(0, heat.find('\n')), "object,k,l,shots,normalized");
}

TEST_F(CliTest, AllocateSymmetricLeavesUpperTriangleEmpty) {
  const auto cfg = write_config("c.yaml", kMinimal);
  ASSERT_EQ(run({"allocate", "-c", cfg, "-o", dir_.string(), "--mode", "optimal_symmetric"}), kOk);
  const auto p = read_json(dir_ / "plan.json");
  const auto& shots = p["fisher_shots"];
  for (std::size_t k = 0; k < shots.size(); ++k)
    for (std::size_t l = k + 1; l < shots.size(); ++l) EXPECT_EQ(shots[k][l], 0);
}

TEST_F(CliTest, AllocateRejectsNonPositiveEps) {
  const auto cfg = write_config("c.yaml", kMinimal);
  EXPECT_EQ(run({"allocate", "-c", cfg, "-o", dir_.string(), "--eps", "0"}), kUsage);
  EXPECT_EQ(run({"allocate", "-c", cfg, "-o", dir_.string(), "--eps", "-0.5"}), kUsage);
  EXPECT_EQ(run({"allocate", "-c", cfg, "-o", dir_.string(), "--mode", "greedy"}), kUsage);
}

TEST_F(CliTest, ValidatePassesAtHighShots) {
  const auto cfg = write_config("c.yaml", kMinimal);
  ASSERT_EQ(run({"validate", "-c", cfg, "-o", dir_.string(), "--trials", "2000", "--eps", "0.002"}), kOk)
      << out_.str() << err_.str();
  const auto v = read_json(dir_ / "validate.json");
  for (const char* key : {"predicted_eps2", "empirical_eps2", "stderr", "trials", "seed"}) {
    EXPECT_TRUE(v.contains(key)) << key;
  }
  EXPECT_EQ(v["trials"], 2000);
  EXPECT_TRUE(v["pass"].get<bool>());
}

TEST_F(CliTest, ValidateRejectsFewTrials) {
  const auto cfg = write_config("c.yaml", kMinimal);
  EXPECT_EQ(run({"validate", "-c", cfg, "-o", dir_.string(), "--trials", "99"}), kUsage);
}

TEST_F(CliTest, ValidateWarnsOutsideSmallErrorRegime) {
  const auto cfg = write_config("c.yaml", kMinimal);
  const int code = run({"validate", "-c", cfg, "-o", dir_.string(), "--trials", "200", "--eps", "5"});
  EXPECT_EQ(code, kOk);
  const auto v = read_json(dir_ / "validate.json");
  EXPECT_FALSE(v["small_error_regime"].get<bool>());
  EXPECT_TRUE(v.contains("warning"));
}

TEST_F(CliTest, BoundsHoldOnThreeQubitPoint) {
  const auto cfg = write_config("c.yaml",
                                "system:\n  n: 3\nansatz:\n  pattern: B1B2\ninit:\n  mode: random\nseed: 12\n");
  ASSERT_EQ(run({"bounds", "-c", cfg, "-o", dir_.string()}), kOk) << out_.str() << err_.str();
  const auto b = read_json(dir_ / "bounds.json");
  EXPECT_TRUE(b["shots"]["n_f_ok"].get<bool>());
  EXPECT_TRUE(b["shots"]["n_g_ok"].get<bool>());
  EXPECT_TRUE(b["overhead"]["kappa_ok"].get<bool>());
  EXPECT_TRUE(b["overhead"].contains("spc_inv"));
  EXPECT_TRUE(b["overhead"].contains("y"));
  EXPECT_TRUE(b["all_ok"].get<bool>());
}

TEST_F(CliTest, ScanSingleQubitCount) {
  const auto cfg = write_config(
      "c.yaml", "ansatz:\n  pattern: B1B2\nscan:\n  n_list: [4]\n  instances: 2\n  target: 1000\n");
  ASSERT_EQ(run({"scan", "-c", cfg, "-o", dir_.string()}), kOk) << err_.str();
  const std::string agg = read(dir_ / "scan_aggregate.csv");
  EXPECT_EQ(std::count(agg.begin(), agg.end(), '\n'), 2);
  const std::string rows = read(dir_ / "scan.csv");
  EXPECT_EQ(rows.substr(0, rows.find('\n')), "n,instance,ratio");
}

TEST_F(CliTest, InspectUsesExplicitTheta) {
  const auto cfg = write_config("c.yaml", kMinimal);
  ASSERT_EQ(run({"inspect", "-c", cfg, "-o", dir_.string(), "--theta", "0.1,0.2,0.3,0.4,0.5,0.6"}), kOk)
      << err_.str();
  const auto m = read_json(dir_ / "metric.json");
  EXPECT_EQ(m["nu"], 6);
  EXPECT_EQ(m["theta"][2], 0.3);
  EXPECT_EQ(m["fisher"].size(), 6u);
  EXPECT_EQ(run({"inspect", "-c", cfg, "-o", dir_.string(), "--theta", "0.1,0.2"}), kUsage);
  EXPECT_EQ(run({"inspect", "-c", cfg, "-o", dir_.string(), "--theta", "0.1,x"}), kUsage);
}

TEST_F(CliTest, OutputDirectoryFromEnvironment) {
  const auto cfg = write_config("c.yaml", kMinimal);
  const std::string env_dir = (dir_ / "env").string();
  ::setenv("SHOTCOST_OUT_DIR", env_dir.c_str(), 1);
  const int code = run({"inspect", "-c", cfg});
  ::unsetenv("SHOTCOST_OUT_DIR");
  ASSERT_EQ(code, kOk);
  EXPECT_TRUE(fs::exists(fs::path(env_dir) / "metric.json"));
}

TEST(Config, DefaultsAndOverrides) {
  const Config c = parse_config("", {"system.n=5", "hamiltonian.omega=[0.1, 0.2, 0.3, 0.4, 0.5]", "eps.mode=relative"});
  EXPECT_EQ(c.evolution.n, 5);
  EXPECT_EQ(c.evolution.omega.size(), 5u);
  EXPECT_EQ(c.evolution.eps_mode, EpsMode::relative);
  EXPECT_EQ(c.evolution.pattern, "B1B2B2");
  EXPECT_THROW(parse_config("hamiltonian:\n  omega: [1, 2]\n"), ConfigError);
  EXPECT_THROW(parse_config("- 1\n- 2\n"), ConfigError);
  EXPECT_THROW(parse_config("", {"system.n"}), ConfigError);
}

TEST(Config, EchoRoundTrips) {
  const Config a = parse_config(kMinimal, {"seed=11"});
  const Config b = parse_config(echo_config(a));
  EXPECT_EQ(echo_config(a), echo_config(b));
  EXPECT_EQ(b.evolution.seed, 11u);
  EXPECT_EQ(b.evolution.max_iters, 6);
}

}  // namespace
}  // namespace shotcost::cli
