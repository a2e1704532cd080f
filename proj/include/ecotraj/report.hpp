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

#ifndef ECOTRAJ_REPORT_HPP_
#define ECOTRAJ_REPORT_HPP_

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "ecotraj/drive_cycle.hpp"
#include "ecotraj/efficiency_map.hpp"
#include "ecotraj/errors.hpp"
#include "ecotraj/nlp.hpp"
#include "ecotraj/solver.hpp"
#include "ecotraj/vehicle.hpp"
#include "json.hpp"

namespace ecotraj {

/// One run request; references resolve against the map/vehicle catalogs or
/// the filesystem before any solve starts.
struct RunConfig {
  std::string vehicle = "type1";  // catalog id or vehicle file path
  std::string map = "type1";      // catalog id or map file path
  double distance = 350.0;        // m
  double v_avg = 7.0;             // m/s
  double v_max = 20.0;            // m/s
  double dt = 1.0;                // s
  TransientPenalty penalty{};     // penalty_fraction 0 disables
  std::string out_dir = "out";
  std::string assets_dir;         // root holding maps/ and cycles/
  std::string cycle_file;         // defaults to <assets>/cycles/ftp75.csv
  SpeedUnit cycle_unit = SpeedUnit::kMph;
  std::uint64_t seed = 12345;
  int workers = 0;                // 0: hardware concurrency

  // Sweep grids (used by the sweep/penalty-sweep commands).
  std::vector<std::string> sweep_vehicles = {"type1", "type2"};
  std::vector<std::string> sweep_maps = {"type1", "type2", "type3", "type4", "type5"};
  std::vector<double> sweep_distances = {210.0, 350.0, 700.0, 2100.0};
  std::vector<double> sweep_v_avgs = {7.0, 10.0};
  std::vector<double> sweep_penalties = {0.0, 0.10, 0.15, 0.30};

  std::string resolved_cycle() const {
    return cycle_file.empty() ? assets_dir + "/cycles/ftp75.csv" : cycle_file;
  }
};

struct SummaryRow {
  std::string vehicle;
  std::string map;
  double v_avg = 0.0;
  double distance = 0.0;
  std::optional<double> penalty_pct;
  double typical_kWs = 0.0;
  double optimal_kWs = 0.0;
  double savings_pct = 0.0;
  std::string status = "ok";
};

namespace detail {

inline void atomic_write(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::create_directories(path.parent_path().empty() ? "." : path.parent_path());
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write " + tmp.string());
    out << content;
  }
  std::filesystem::rename(tmp, path);
}

inline std::string profile_csv(const SpeedProfile& p) {
  std::string out = "t_s,v_mps\n";
  char line[80];
  for (std::size_t i = 0; i < p.speeds.size(); ++i) {
    std::snprintf(line, sizeof(line), "%.10g,%.17g\n", (i + 1) * p.dt, p.speeds[i]);
    out += line;
  }
  return out;
}

inline std::string breakdown_csv(const SpeedProfile& p, const EnergyBreakdown& b) {
  std::string out = "t_s,v_mps,e_wheel_J,e_bat_J,eta,cum_e_bat_J\n";
  char line[200];
  for (std::size_t i = 0; i < p.speeds.size(); ++i) {
    std::snprintf(line, sizeof(line), "%.10g,%.17g,%.6f,%.6f,%.6f,%.6f\n", (i + 1) * p.dt,
                  p.speeds[i], b.wheel_J[i], b.battery_J[i], b.eta[i],
                  b.cumulative_battery_J[i]);
    out += line;
  }
  return out;
}

inline SpeedProfile profile_from_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open profile: " + path);
  std::string line;
  if (!std::getline(in, line)) throw ConfigError(path + ": empty profile");
  SpeedProfile p;
  double prev_t = 0.0;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    const double t = std::stod(line.substr(0, comma));
    double v = std::stod(line.substr(comma + 1));
    if (!first) p.dt = t - prev_t;
    prev_t = t;
    first = false;
    p.speeds.push_back(v);
  }
  return p;
}

inline std::string summary_header(bool with_penalty) {
  return with_penalty
             ? "vehicle,map,v_avg_mps,X_m,penalty_pct,typical_kWs,optimal_kWs,savings_pct,status\n"
             : "vehicle,map,v_avg_mps,X_m,typical_kWs,optimal_kWs,savings_pct,status\n";
}

inline std::string summary_line(const SummaryRow& r) {
  char line[256];
  if (r.penalty_pct) {
    std::snprintf(line, sizeof(line), "%s,%s,%g,%g,%g,%.2f,%.2f,%.2f,%s\n", r.vehicle.c_str(),
                  r.map.c_str(), r.v_avg, r.distance, *r.penalty_pct, r.typical_kWs,
                  r.optimal_kWs, r.savings_pct, r.status.c_str());
  } else {
    std::snprintf(line, sizeof(line), "%s,%s,%g,%g,%.2f,%.2f,%.2f,%s\n", r.vehicle.c_str(),
                  r.map.c_str(), r.v_avg, r.distance, r.typical_kWs, r.optimal_kWs,
                  r.savings_pct, r.status.c_str());
  }
  return line;
}

}  // namespace detail

/// Resolved per-run inputs, ready to solve.
struct ResolvedRun {
  VehicleParams vehicle;
  EnvironmentParams env;
  EfficiencyMap map;
  SegmentSpec spec;
  std::optional<TransientPenalty> penalty;
};

inline VehicleParams resolve_vehicle(const std::string& ref, EnvironmentParams* env) {
  if (vehicle_catalog().count(ref)) return vehicle_by_id(ref);
  if (ref.size() > 5 && ref.substr(ref.size() - 5) == ".json") {
    auto [v, e] = load_vehicle_file(ref);
    if (env) *env = e;
    return v;
  }
  throw ConfigError("unknown vehicle reference: " + ref);
}

inline ResolvedRun resolve_run(const RunConfig& cfg) {
  EnvironmentParams env;
  VehicleParams vehicle = resolve_vehicle(cfg.vehicle, &env);
  EfficiencyMap map = load_map(cfg.map, cfg.assets_dir);
  SegmentSpec spec{cfg.distance, cfg.v_avg, cfg.v_max, cfg.dt};
  spec.validate();
  std::optional<TransientPenalty> penalty;
  if (cfg.penalty.penalty_fraction > 0.0) {
    cfg.penalty.validate();
    penalty = cfg.penalty;
  }
  return ResolvedRun{vehicle, env, std::move(map), spec, penalty};
}

/// Typical-traffic baseline for the run's (X, v_avg), sampled on the same
/// horizon as the optimizer so both sides share one quadrature.
inline SpeedProfile baseline_for(const RunConfig& cfg, const SegmentSpec& spec) {
  const DriveCycle cycle = load_drive_cycle_csv(cfg.resolved_cycle(), cfg.cycle_unit);
  const auto segments = split_segments(cycle);
  return typical_profile(segments, spec.distance, spec.adjusted_v_avg(), spec.horizon(),
                         spec.dt);
}

/// Solves one cell and evaluates the paired typical profile under the
/// identical energy model (penalty included on both sides when configured).
inline std::pair<SummaryRow, OptimizationResult> run_cell(
    const RunConfig& cfg, const ResolvedRun& run, const SpeedProfile& typical,
    int start_workers = 1) {
  NlpProblem problem{run.spec, run.vehicle, run.env, run.map, std::nullopt, run.penalty};
  SolverOptions opts;
  opts.seed = cfg.seed;
  opts.start_workers = start_workers;
  opts.extra_starts.push_back(typical.speeds);  // never lose to the baseline

  OptimizationResult result = solve(problem, opts);

  const EnergyBreakdown typ = evaluate_profile(typical, problem);
  const double typ_total =
      run.penalty ? penalized_energy(typ.battery_J, typ.torque_Nm, run.spec.dt, *run.penalty)
                  : typ.total_battery_J;

  SummaryRow row;
  row.vehicle = cfg.vehicle;
  row.map = run.map.name().empty() ? cfg.map : run.map.name();
  row.v_avg = cfg.v_avg;
  row.distance = cfg.distance;
  if (run.penalty) row.penalty_pct = 100.0 * run.penalty->penalty_fraction;
  row.typical_kWs = typ_total / 1000.0;
  row.optimal_kWs = result.reported_energy / 1000.0;
  row.savings_pct = 100.0 * (typ_total - result.reported_energy) / typ_total;
  row.status = result.converged ? "ok" : "non-convergence";
  return {row, std::move(result)};
}

/// optimize subcommand: solve one cell, write profile/breakdown/summary.
/// Returns the row; non-convergence is reported in-row with outputs kept.
inline SummaryRow run_optimize(const RunConfig& cfg) {
  const ResolvedRun run = resolve_run(cfg);
  const SpeedProfile typical = baseline_for(cfg, run.spec);
  const int start_workers =
      cfg.workers > 0 ? cfg.workers
                      : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  auto [row, result] = run_cell(cfg, run, typical, start_workers);

  const std::filesystem::path out(cfg.out_dir);
  detail::atomic_write(out / "profile.csv", detail::profile_csv(result.profile));
  detail::atomic_write(out / "breakdown.csv",
                       detail::breakdown_csv(result.profile, result.breakdown));
  detail::atomic_write(out / "typical_profile.csv", detail::profile_csv(typical));
  detail::atomic_write(out / "summary.txt",
                       detail::summary_header(row.penalty_pct.has_value()) +
                           detail::summary_line(row));
  return row;
}

struct SweepRequest {
  std::vector<std::string> vehicles;
  std::vector<std::string> maps;
  std::vector<double> distances;
  std::vector<double> v_avgs;
  std::vector<double> penalties = {0.0};  // fractions; 0 disables
  bool penalty_column = false;            // report penalty_pct even for 0
};

/// Executes a grid of independent cells with a worker pool. Rows come back
/// sorted by (vehicle, map, v_avg, X, penalty); per-cell failures land in
/// the row's status and the sweep continues.
inline std::vector<SummaryRow> run_sweep(const RunConfig& base, const SweepRequest& req) {
  struct Cell {
    RunConfig cfg;
    ResolvedRun run;
    const SpeedProfile* typical;
  };

  RunConfig sorted_base = base;
  SweepRequest grid = req;
  std::sort(grid.vehicles.begin(), grid.vehicles.end());
  std::sort(grid.maps.begin(), grid.maps.end());
  std::sort(grid.distances.begin(), grid.distances.end());
  std::sort(grid.v_avgs.begin(), grid.v_avgs.end());
  std::sort(grid.penalties.begin(), grid.penalties.end());

  // Baselines depend only on (X, v_avg, dt); build each once up front.
  const DriveCycle cycle = load_drive_cycle_csv(base.resolved_cycle(), base.cycle_unit);
  const auto segments = split_segments(cycle);
  std::map<std::pair<double, double>, SpeedProfile> baselines;
  for (double X : grid.distances) {
    for (double va : grid.v_avgs) {
      SegmentSpec spec{X, va, base.v_max, base.dt};
      spec.validate();
      baselines.emplace(std::make_pair(X, va),
                        typical_profile(segments, X, spec.adjusted_v_avg(), spec.horizon(),
                                        spec.dt));
    }
  }

  std::vector<Cell> cells;
  for (const auto& veh : grid.vehicles) {
    for (const auto& m : grid.maps) {
      for (double va : grid.v_avgs) {
        for (double X : grid.distances) {
          for (double p : grid.penalties) {
            RunConfig cfg = sorted_base;
            cfg.vehicle = veh;
            cfg.map = m;
            cfg.v_avg = va;
            cfg.distance = X;
            cfg.penalty.penalty_fraction = p;
            cells.push_back(
                Cell{cfg, resolve_run(cfg), &baselines.at(std::make_pair(X, va))});
          }
        }
      }
    }
  }

  std::vector<SummaryRow> rows(cells.size());
  std::atomic<std::size_t> next{0};
  const unsigned n_workers = base.workers > 0
                                 ? static_cast<unsigned>(base.workers)
                                 : std::max(1u, std::thread::hardware_concurrency());
  auto work = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= cells.size()) return;
      const Cell& cell = cells[i];
      try {
        rows[i] = run_cell(cell.cfg, cell.run, *cell.typical).first;
      } catch (const std::exception& e) {
        SummaryRow row;
        row.vehicle = cell.cfg.vehicle;
        row.map = cell.cfg.map;
        row.v_avg = cell.cfg.v_avg;
        row.distance = cell.cfg.distance;
        row.status = std::string("error: ") + e.what();
        rows[i] = row;
      }
      if (grid.penalty_column) {
        rows[i].penalty_pct = 100.0 * cell.cfg.penalty.penalty_fraction;
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < n_workers; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  return rows;
}

inline std::string sweep_csv(const std::vector<SummaryRow>& rows, bool with_penalty) {
  std::string out = detail::summary_header(with_penalty);
  for (const auto& r : rows) out += detail::summary_line(r);
  return out;
}

}  // namespace ecotraj

#endif  // ECOTRAJ_REPORT_HPP_
