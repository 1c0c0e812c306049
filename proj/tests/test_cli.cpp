// SPDX-License-Identifier: Apache-2.0
//
// pathbin: multipath path-bin tracking and blockage forecasting for UAV links
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include <cstdlib>
#include <filesystem>
#include <unistd.h>

#include <gtest/gtest.h>

#include "pathbin/pathbin.hpp"

using namespace pathbin;
namespace fs = std::filesystem;

namespace {

const fs::path kConfig = fs::path(PATHBIN_SOURCE_DIR) / "configs" / "default.toml";

int run(const std::string &args) {
    const std::string cmd = std::string(PATHBIN_CLI) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

class Cli : public ::testing::Test {
  protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("pathbin_cli_" + std::to_string(::getpid()) + "_" +
                ::testing::UnitTest::GetInstance()->current_test_info()->name());
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }
    std::string out(const std::string &sub) const { return (dir_ / sub).string(); }
    fs::path dir_;
};

} // namespace

TEST_F(Cli, SimulateWritesDataset) {
    ASSERT_EQ(run("simulate --config " + kConfig.string() + " --out-dir " + out("")), 0);
    const auto t = io::load_trajectory(out("trajectory.csv"));
    EXPECT_EQ(t.snapshots.size(), 100u);
    EXPECT_TRUE(fs::exists(dir_ / "simulate.manifest.json"));
}

TEST_F(Cli, SimulateIsReproducible) {
    ASSERT_EQ(run("simulate --config " + kConfig.string() + " --out-dir " + out("a")), 0);
    ASSERT_EQ(run("simulate --config " + kConfig.string() + " --threads 3 --out-dir " + out("b")), 0);
    EXPECT_EQ(io::read_file(out("a/trajectory.csv")), io::read_file(out("b/trajectory.csv")));
}

TEST_F(Cli, PipelineWritesEveryOutput) {
    ASSERT_EQ(run("pipeline --config " + kConfig.string() + " --out-dir " + out("")), 0);
    for (const char *f : {"trajectory.csv", "bins.csv", "events.csv", "markov.csv", "forecast.csv", "deaths.csv",
                          "evaluation.json", "position_errors.csv", "pipeline.manifest.json"})
        EXPECT_TRUE(fs::exists(dir_ / f)) << f;
    const auto m = RunManifest::from_json(nlohmann::ordered_json::parse(io::read_file(out("pipeline.manifest.json"))));
    EXPECT_EQ(m.outputs.size(), 8u);
    EXPECT_TRUE(verify_manifest(m, dir_).empty());
    const auto report = io::report_from_json(nlohmann::ordered_json::parse(io::read_file(out("evaluation.json"))));
    EXPECT_LT(report.overall_mse_db, report.baseline_mse_db);
}

TEST_F(Cli, StagesChainThroughFiles) {
    ASSERT_EQ(run("simulate --config " + kConfig.string() + " --out-dir " + out("")), 0);
    ASSERT_EQ(run("bin --config " + kConfig.string() + " --input " + out("trajectory.csv") + " --out-dir " + out("")),
              0);
    ASSERT_EQ(run("forecast --config " + kConfig.string() + " --input " + out("bins.csv") + " --out-dir " + out("")),
              0);
    ASSERT_EQ(run("deaths --config " + kConfig.string() + " --input " + out("bins.csv") + " --out-dir " + out("")), 0);
    ASSERT_EQ(run("evaluate --config " + kConfig.string() + " --input " + out("trajectory.csv") + " --out-dir " +
                  out("")),
              0);
    EXPECT_FALSE(io::parse_forecast_csv(io::read_file(out("forecast.csv"))).empty());
    EXPECT_FALSE(io::parse_deaths_csv(io::read_file(out("deaths.csv"))).empty());
}

TEST_F(Cli, PipelineAcceptsExistingDataset) {
    ASSERT_EQ(run("simulate --config " + kConfig.string() + " --out-dir " + out("sim")), 0);
    ASSERT_EQ(run("pipeline --config " + kConfig.string() + " --input " + out("sim/trajectory.csv") + " --out-dir " +
                  out("a")),
              0);
    ASSERT_EQ(run("pipeline --config " + kConfig.string() + " --out-dir " + out("b")), 0);
    EXPECT_EQ(io::read_file(out("a/evaluation.json")), io::read_file(out("b/evaluation.json")));
    EXPECT_EQ(io::read_file(out("a/bins.csv")), io::read_file(out("b/bins.csv")));
}

TEST_F(Cli, ValidationErrorsExitWithTwo) {
    EXPECT_EQ(run(""), 2);
    EXPECT_EQ(run("frobnicate"), 2);
    EXPECT_EQ(run("simulate --threads 0 --out-dir " + out("")), 2);
    EXPECT_EQ(run("bin --out-dir " + out("")), 2); // --input is required
    EXPECT_EQ(run("bench --sweep '' --out-dir " + out("")), 2);
    EXPECT_EQ(run("bench --sweep 10by3 --out-dir " + out("")), 2);
    io::write_file(out("bad.toml"), "gamma = 75.8\n");
    EXPECT_EQ(run("simulate --config " + out("bad.toml") + " --out-dir " + out("")), 2);
    io::write_file(out("bad.csv"), "not,a,dataset\n");
    EXPECT_EQ(run("bin --input " + out("bad.csv") + " --out-dir " + out("")), 2);
}

TEST_F(Cli, RuntimeFailureExitsWithThree) {
    // an output directory that is a regular file cannot be written
    io::write_file(out("blocker"), "x");
    EXPECT_EQ(run("simulate --config " + kConfig.string() + " --out-dir " + out("blocker")), 3);
}

TEST_F(Cli, BenchWritesOneRowPerPoint) {
    ASSERT_EQ(run("bench --sweep 20x3 --seed 7 --out-dir " + out("")), 0);
    const auto rows = io::split(io::read_file(out("bench.csv")), '\n');
    ASSERT_GE(rows.size(), 2u);
    EXPECT_EQ(rows[0], "n_positions,n_mpcs,binning_ms,forecasting_ms");
    EXPECT_EQ(rows[1].rfind("20,3,", 0), 0u);
}
