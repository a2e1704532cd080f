// Copyright 2026 The Ecotraj Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "gtest/gtest.h"

namespace {

namespace fs = std::filesystem;

const std::string kBin = ECOTRAJ_CLI_BIN;
const std::string kAssets = ECOTRAJ_TEST_ASSETS;

struct CliResult {
  int exit_code;
};

CliResult run_cli(const std::string& args) {
  const std::string cmd = kBin + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return {WEXITSTATUS(status)};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / name;
  fs::remove_all(dir);
  return dir;
}

TEST(Cli, OptimizeWritesOutputsAndSucceeds) {
  const fs::path out = fresh_dir("ecotraj_cli_opt");
  const auto r = run_cli("optimize --vehicle type1 --map type1 -X 210 --v-avg 7 --assets " +
                         kAssets + " --out " + out.string());
  EXPECT_EQ(r.exit_code, 0);
  EXPECT_TRUE(fs::exists(out / "profile.csv"));
  EXPECT_TRUE(fs::exists(out / "breakdown.csv"));
  EXPECT_TRUE(fs::exists(out / "summary.txt"));
  const std::string summary = slurp(out / "summary.txt");
  EXPECT_NE(summary.find("type1,type1,7,210,"), std::string::npos);
  fs::remove_all(out);
}

TEST(Cli, MissingMapFileFailsWithoutPartialOutputs) {
  const fs::path out = fresh_dir("ecotraj_cli_badmap");
  const auto r = run_cli("optimize --map /no/such/map.json -X 210 --v-avg 7 --assets " +
                         kAssets + " --out " + out.string());
  EXPECT_EQ(r.exit_code, 2);
  EXPECT_FALSE(fs::exists(out));
}

TEST(Cli, InvalidSpecRejectedBeforeSolving) {
  const fs::path out = fresh_dir("ecotraj_cli_badspec");
  const auto r = run_cli("optimize --v-avg 25 --v-max 20 -X 350 --assets " + kAssets +
                         " --out " + out.string());
  EXPECT_EQ(r.exit_code, 2);
  EXPECT_FALSE(fs::exists(out));
}

TEST(Cli, InfeasibleSpecUsesDistinctExitCode) {
  const fs::path out = fresh_dir("ecotraj_cli_infeasible");
  const auto r = run_cli("optimize -X 210 --v-avg 10 --v-max 10.5 --assets " + kAssets +
                         " --out " + out.string());
  EXPECT_EQ(r.exit_code, 3);
  fs::remove_all(out);
}

TEST(Cli, BaselineIntegratesToDistance) {
  const fs::path out = fresh_dir("ecotraj_cli_baseline");
  const auto r =
      run_cli("baseline -X 350 --v-avg 7 --assets " + kAssets + " --out " + out.string());
  EXPECT_EQ(r.exit_code, 0);
  const std::string csv = slurp(out / "baseline.csv");
  ASSERT_NE(csv.find("t_s,v_mps\n"), std::string::npos);
  double distance = 0.0;
  std::istringstream lines(csv);
  std::string line;
  std::getline(lines, line);  // header
  int rows = 0;
  while (std::getline(lines, line)) {
    distance += std::stod(line.substr(line.find(',') + 1));
    ++rows;
  }
  EXPECT_EQ(rows, 50);
  EXPECT_NEAR(distance, 350.0, 1e-6);
  fs::remove_all(out);
}

TEST(Cli, BaselineFarFromAnySegmentFails) {
  const fs::path out = fresh_dir("ecotraj_cli_baseline_far");
  const auto r =
      run_cli("baseline -X 8000 --v-avg 7 --assets " + kAssets + " --out " + out.string());
  EXPECT_EQ(r.exit_code, 2);
  fs::remove_all(out);
}

TEST(Cli, MapGridExport) {
  const fs::path out = fresh_dir("ecotraj_cli_map");
  const auto r = run_cli("map --map type3 --n-omega 10 --n-torque 10 --assets " + kAssets +
                         " --out " + out.string());
  EXPECT_EQ(r.exit_code, 0);
  const std::string csv = slurp(out / "map_grid.csv");
  std::istringstream lines(csv);
  std::string line;
  std::getline(lines, line);
  EXPECT_EQ(line, "omega_rad_s,torque_Nm,eta");
  int rows = 0;
  double max_eta = 0.0;
  while (std::getline(lines, line)) {
    if (line.empty()) continue;
    const auto last = line.rfind(',');
    max_eta = std::max(max_eta, std::stod(line.substr(last + 1)));
    ++rows;
  }
  EXPECT_EQ(rows, 100);
  EXPECT_LE(max_eta, 0.36);
  fs::remove_all(out);
}

TEST(Cli, SweepReportsAreByteIdenticalAcrossRuns) {
  const fs::path out1 = fresh_dir("ecotraj_cli_sweep1");
  const fs::path out2 = fresh_dir("ecotraj_cli_sweep2");
  const fs::path cfg = fs::temp_directory_path() / "ecotraj_sweep_cfg.json";
  {
    std::ofstream f(cfg);
    f << R"({"sweep": {"vehicles": ["type1"], "maps": ["type1", "type4"],)"
      << R"( "distances": [210.0], "v_avgs": [7.0]}})";
  }
  const std::string common =
      "sweep --config " + cfg.string() + " --seed 42 --assets " + kAssets + " --out ";
  EXPECT_EQ(run_cli(common + out1.string()).exit_code, 0);
  EXPECT_EQ(run_cli(common + out2.string()).exit_code, 0);
  const std::string a = slurp(out1 / "sweep.csv");
  const std::string b = slurp(out2 / "sweep.csv");
  EXPECT_FALSE(a.empty());
  EXPECT_EQ(a, b);
  fs::remove_all(out1);
  fs::remove_all(out2);
  fs::remove(cfg);
}

TEST(Cli, PenaltySweepHasPenaltyColumn) {
  const fs::path out = fresh_dir("ecotraj_cli_pensweep");
  const fs::path cfg = fs::temp_directory_path() / "ecotraj_pen_cfg.json";
  {
    std::ofstream f(cfg);
    f << R"({"vehicle": "type1", "map": "type2", "distance": 210.0, "v_avg": 7.0,)"
      << R"( "sweep": {"penalties": [0.0, 0.15]}})";
  }
  const auto r = run_cli("penalty-sweep --config " + cfg.string() + " --assets " + kAssets +
                         " --out " + out.string());
  EXPECT_EQ(r.exit_code, 0);
  const std::string csv = slurp(out / "penalty_sweep.csv");
  EXPECT_NE(csv.find("penalty_pct"), std::string::npos);
  EXPECT_NE(csv.find(",0,"), std::string::npos);
  EXPECT_NE(csv.find(",15,"), std::string::npos);
  fs::remove_all(out);
  fs::remove(cfg);
}

}  // namespace
