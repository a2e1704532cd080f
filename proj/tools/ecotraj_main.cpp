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
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ecotraj/report.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitNonConvergence = 4;

#ifndef ECOTRAJ_DEFAULT_ASSET_DIR
#define ECOTRAJ_DEFAULT_ASSET_DIR "assets"
#endif

void apply_config_file(const std::string& path, ecotraj::RunConfig& cfg) {
  const nlohmann::json j = ecotraj::detail::parse_json_file(path);
  if (j.contains("vehicle")) cfg.vehicle = j.at("vehicle").get<std::string>();
  if (j.contains("map")) cfg.map = j.at("map").get<std::string>();
  if (j.contains("distance")) cfg.distance = j.at("distance").get<double>();
  if (j.contains("v_avg")) cfg.v_avg = j.at("v_avg").get<double>();
  if (j.contains("v_max")) cfg.v_max = j.at("v_max").get<double>();
  if (j.contains("dt")) cfg.dt = j.at("dt").get<double>();
  if (j.contains("out")) cfg.out_dir = j.at("out").get<std::string>();
  if (j.contains("assets")) cfg.assets_dir = j.at("assets").get<std::string>();
  if (j.contains("cycle")) cfg.cycle_file = j.at("cycle").get<std::string>();
  if (j.contains("speed_unit")) {
    cfg.cycle_unit = ecotraj::speed_unit_from_string(j.at("speed_unit").get<std::string>());
  }
  if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("workers")) cfg.workers = j.at("workers").get<int>();
  if (j.contains("penalty")) {
    const auto& p = j.at("penalty");
    if (p.contains("penalty_fraction")) {
      cfg.penalty.penalty_fraction = p.at("penalty_fraction").get<double>();
    }
    if (p.contains("window")) cfg.penalty.window = p.at("window").get<double>();
    if (p.contains("increase_threshold")) {
      cfg.penalty.increase_threshold = p.at("increase_threshold").get<double>();
    }
  }
  if (j.contains("sweep")) {
    const auto& s = j.at("sweep");
    if (s.contains("vehicles")) cfg.sweep_vehicles = s.at("vehicles").get<std::vector<std::string>>();
    if (s.contains("maps")) cfg.sweep_maps = s.at("maps").get<std::vector<std::string>>();
    if (s.contains("distances")) cfg.sweep_distances = s.at("distances").get<std::vector<double>>();
    if (s.contains("v_avgs")) cfg.sweep_v_avgs = s.at("v_avgs").get<std::vector<double>>();
    if (s.contains("penalties")) cfg.sweep_penalties = s.at("penalties").get<std::vector<double>>();
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Energy-optimal stop-to-stop speed trajectories for electric vehicles"};
  app.require_subcommand(1);

  ecotraj::RunConfig cfg;
  cfg.assets_dir = ECOTRAJ_DEFAULT_ASSET_DIR;
  std::string config_path;
  std::string speed_unit;
  double penalty_pct = -1.0;

  // The config file provides defaults and explicit flags override them, so
  // it is applied before the CLI definitions bind their current values.
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--config" && i + 1 < argc) {
      config_path = argv[i + 1];
    } else if (arg.rfind("--config=", 0) == 0) {
      config_path = arg.substr(9);
    }
  }
  if (!config_path.empty()) {
    try {
      apply_config_file(config_path, cfg);
    } catch (const std::exception& e) {
      std::cerr << "config error: " << e.what() << "\n";
      return kExitConfig;
    }
  }

  app.add_option("--config", config_path, "JSON run configuration file");
  app.add_option("--out", cfg.out_dir, "output directory");
  app.add_option("--seed", cfg.seed, "multi-start seed");
  app.add_option("--workers", cfg.workers, "sweep worker threads (0: all cores)");
  app.add_option("--assets", cfg.assets_dir, "asset directory (maps/, cycles/)");

  auto add_common = [&](CLI::App* cmd) {
    cmd->fallthrough();  // global flags may follow the subcommand
    cmd->add_option("--vehicle", cfg.vehicle, "vehicle id (type1|type2) or vehicle file");
    cmd->add_option("--map", cfg.map, "map id (type1..type5) or map file");
    cmd->add_option("--distance,-X", cfg.distance, "segment distance [m]");
    cmd->add_option("--v-avg", cfg.v_avg, "average speed [m/s]");
    cmd->add_option("--v-max", cfg.v_max, "speed bound [m/s]");
    cmd->add_option("--dt", cfg.dt, "sampling interval [s]");
    cmd->add_option("--cycle", cfg.cycle_file, "drive-cycle CSV (time_s,speed)");
    cmd->add_option("--speed-unit", speed_unit, "cycle speed unit: mph|m_s");
    cmd->add_option("--penalty-pct", penalty_pct, "transient penalty percentage");
  };

  auto* optimize = app.add_subcommand("optimize", "solve one stop-to-stop instance");
  add_common(optimize);
  auto* sweep = app.add_subcommand("sweep", "grid over vehicles, maps, distances, speeds");
  add_common(sweep);
  auto* penalty_sweep =
      app.add_subcommand("penalty-sweep", "one cell across transient penalty levels");
  add_common(penalty_sweep);
  auto* baseline = app.add_subcommand("baseline", "synthesize the typical-traffic profile");
  add_common(baseline);
  auto* map_cmd = app.add_subcommand("map", "export an efficiency map grid as CSV");
  add_common(map_cmd);
  int n_omega = 50, n_torque = 50;
  map_cmd->add_option("--n-omega", n_omega, "grid points along motor speed");
  map_cmd->add_option("--n-torque", n_torque, "grid points along torque");

  CLI11_PARSE(app, argc, argv);

  try {
    if (!speed_unit.empty()) cfg.cycle_unit = ecotraj::speed_unit_from_string(speed_unit);
    if (penalty_pct >= 0.0) cfg.penalty.penalty_fraction = penalty_pct / 100.0;

    const std::filesystem::path out(cfg.out_dir);

    if (optimize->parsed()) {
      const ecotraj::SummaryRow row = ecotraj::run_optimize(cfg);
      std::cout << ecotraj::detail::summary_header(row.penalty_pct.has_value())
                << ecotraj::detail::summary_line(row);
      return row.status == "ok" ? kExitOk : kExitNonConvergence;
    }

    if (sweep->parsed() || penalty_sweep->parsed()) {
      ecotraj::SweepRequest req;
      if (sweep->parsed()) {
        req.vehicles = cfg.sweep_vehicles;
        req.maps = cfg.sweep_maps;
        req.distances = cfg.sweep_distances;
        req.v_avgs = cfg.sweep_v_avgs;
      } else {
        req.vehicles = {cfg.vehicle};
        req.maps = {cfg.map};
        req.distances = {cfg.distance};
        req.v_avgs = {cfg.v_avg};
        req.penalties = cfg.sweep_penalties;
        req.penalty_column = true;
      }
      const auto rows = ecotraj::run_sweep(cfg, req);
      const std::string csv = ecotraj::sweep_csv(rows, req.penalty_column);
      const auto name = sweep->parsed() ? "sweep.csv" : "penalty_sweep.csv";
      ecotraj::detail::atomic_write(out / name, csv);
      std::cout << csv;
      for (const auto& r : rows) {
        if (r.status != "ok") return kExitNonConvergence;
      }
      return kExitOk;
    }

    if (baseline->parsed()) {
      const ecotraj::SegmentSpec spec{cfg.distance, cfg.v_avg, cfg.v_max, cfg.dt};
      spec.validate();
      const ecotraj::SpeedProfile profile = ecotraj::baseline_for(cfg, spec);
      ecotraj::detail::atomic_write(out / "baseline.csv", ecotraj::detail::profile_csv(profile));
      std::printf("baseline: %d samples, distance %.6f m, mean %.6f m/s\n",
                  static_cast<int>(profile.speeds.size()), ecotraj::profile_distance(profile),
                  ecotraj::profile_distance(profile) /
                      (profile.speeds.size() * profile.dt));
      return kExitOk;
    }

    if (map_cmd->parsed()) {
      const ecotraj::EfficiencyMap map = ecotraj::load_map(cfg.map, cfg.assets_dir);
      const auto grid = ecotraj::export_grid(map, n_omega, n_torque);
      ecotraj::detail::atomic_write(out / "map_grid.csv", ecotraj::grid_to_csv(grid));
      std::printf("map %s: %d x %d grid written\n", cfg.map.c_str(), n_omega, n_torque);
      return kExitOk;
    }
  } catch (const ecotraj::InfeasibleError& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const ecotraj::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const ecotraj::DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitConfig;
}
