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

#ifndef ECOTRAJ_EFFICIENCY_MAP_HPP_
#define ECOTRAJ_EFFICIENCY_MAP_HPP_

#include <cstdio>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ecotraj/errors.hpp"
#include "ecotraj/spline.hpp"
#include "ecotraj/vehicle.hpp"
#include "json.hpp"

namespace ecotraj {

/// Source-to-wheel efficiency surface eta(omega, T) built as the product of
/// a speed spline and a torque spline, clamped to [eta_floor, 1].
///
/// One surface serves both power directions: the forward branch reads it at
/// T >= 0, the regenerative branch at T < 0. A distinct regen surface can be
/// attached for asymmetric powertrains.
class EfficiencyMap {
 public:
  EfficiencyMap(SplineCurve speed_spline, SplineCurve torque_spline,
                double eta_floor = 0.02, std::string name = "")
      : speed_(std::move(speed_spline)),
        torque_(std::move(torque_spline)),
        eta_floor_(eta_floor),
        name_(std::move(name)) {
    if (!(eta_floor_ > 0.0 && eta_floor_ < 1.0)) {
      throw ConfigError("eta_floor must be in (0, 1)");
    }
    if (speed_.domain_min() < 0.0) {
      throw ConfigError("speed spline domain must start at omega >= 0");
    }
  }

  template <class S>
  S eval(S omega, S torque) const {
    const S eta = speed_.eval(omega) * torque_.eval(torque);
    return sclamp(eta, S(eta_floor_), S(1.0));
  }

  double operator()(double omega, double torque) const { return eval(omega, torque); }

  double eta_floor() const { return eta_floor_; }
  double omega_max() const { return speed_.domain_max(); }
  double torque_max() const { return torque_.domain_max(); }
  const SplineCurve& speed_spline() const { return speed_; }
  const SplineCurve& torque_spline() const { return torque_; }
  const std::string& name() const { return name_; }

 private:
  SplineCurve speed_;
  SplineCurve torque_;
  double eta_floor_;
  std::string name_;
};

/// Battery energy for one wheel-energy segment: discharge divides by the
/// forward efficiency, recovered energy shrinks by the regenerative one.
inline double battery_energy_segment(double e_wheel, double eta_frw, double eta_reg) {
  if (!(eta_frw > 0.0 && eta_frw <= 1.0) || !(eta_reg > 0.0 && eta_reg <= 1.0)) {
    throw ConfigError("efficiencies must lie in (0, 1]");
  }
  return e_wheel >= 0.0 ? e_wheel / eta_frw : eta_reg * e_wheel;
}

namespace detail {

// C1 blend of the two battery-power branches over |e| < kappa. kappa <= 0
// recovers the exact piecewise rule. Both branches share the eta evaluated
// at the actual signed operating point.
template <class S>
S blended_battery_energy(const S& e_wheel, const S& eta, double kappa) {
  if (kappa <= 0.0) {
    return e_wheel >= S(0.0) ? e_wheel / eta : eta * e_wheel;
  }
  if (value_of(e_wheel) >= kappa) return e_wheel / eta;
  if (value_of(e_wheel) <= -kappa) return eta * e_wheel;
  const S t = (e_wheel + S(kappa)) / S(2.0 * kappa);
  const S w = t * t * (S(3.0) - S(2.0) * t);
  return w * (e_wheel / eta) + (S(1.0) - w) * (eta * e_wheel);
}

}  // namespace detail

struct GridPoint {
  double omega;
  double torque;
  double eta;
};

/// Uniform row-major sample of the surface (omega outer, torque inner).
inline std::vector<GridPoint> export_grid(const EfficiencyMap& map, int n_omega, int n_torque) {
  if (n_omega < 2 || n_torque < 2) throw ConfigError("export_grid: need at least a 2x2 grid");
  std::vector<GridPoint> grid;
  grid.reserve(static_cast<std::size_t>(n_omega) * n_torque);
  const double w0 = map.speed_spline().domain_min();
  const double w1 = map.speed_spline().domain_max();
  const double t0 = map.torque_spline().domain_min();
  const double t1 = map.torque_spline().domain_max();
  for (int i = 0; i < n_omega; ++i) {
    const double w = w0 + (w1 - w0) * i / (n_omega - 1);
    for (int j = 0; j < n_torque; ++j) {
      const double t = t0 + (t1 - t0) * j / (n_torque - 1);
      grid.push_back({w, t, map(w, t)});
    }
  }
  return grid;
}

inline std::string grid_to_csv(const std::vector<GridPoint>& grid) {
  std::string out = "omega_rad_s,torque_Nm,eta\n";
  char line[128];
  for (const auto& p : grid) {
    std::snprintf(line, sizeof(line), "%.6f,%.6f,%.6f\n", p.omega, p.torque, p.eta);
    out += line;
  }
  return out;
}

namespace detail {

inline SplineCurve spline_from_json(const nlohmann::json& j, const std::string& ctx) {
  if (!j.contains("knots") || !j.contains("values")) {
    throw ConfigError(ctx + ": spline needs 'knots' and 'values' arrays");
  }
  return SplineCurve(j.at("knots").get<std::vector<double>>(),
                     j.at("values").get<std::vector<double>>());
}

}  // namespace detail

/// Loads a map definition file:
///   {"name": ..., "eta_floor": ..., "omega_max": ..., "torque_max": ...,
///    "speed_spline": {"knots": [...], "values": [...]},
///    "torque_spline": {"knots": [...], "values": [...]}}
inline EfficiencyMap load_map_file(const std::string& path) {
  const nlohmann::json j = detail::parse_json_file(path);
  SplineCurve speed = detail::spline_from_json(j.at("speed_spline"), path + ": speed_spline");
  SplineCurve torque = detail::spline_from_json(j.at("torque_spline"), path + ": torque_spline");
  const double floor = j.value("eta_floor", 0.02);
  const std::string name = j.value("name", std::string{});
  if (j.contains("omega_max") &&
      j.at("omega_max").get<double>() != speed.domain_max()) {
    throw ConfigError(path + ": omega_max disagrees with the speed spline knot range");
  }
  if (j.contains("torque_max") &&
      j.at("torque_max").get<double>() != torque.domain_max()) {
    throw ConfigError(path + ": torque_max disagrees with the torque spline knot range");
  }
  return EfficiencyMap(std::move(speed), std::move(torque), floor, name);
}

/// Resolves the five stock map families (type1..type5) against an asset
/// directory, or any explicit file path.
inline EfficiencyMap load_map(const std::string& id_or_path, const std::string& asset_dir) {
  if (id_or_path.size() == 5 && id_or_path.rfind("type", 0) == 0 &&
      id_or_path[4] >= '1' && id_or_path[4] <= '5') {
    return load_map_file(asset_dir + "/maps/" + id_or_path + ".json");
  }
  return load_map_file(id_or_path);
}

/// A constant-efficiency surface, mostly useful in tests and as a neutral
/// default.
inline EfficiencyMap constant_map(double eta, double omega_max = 1000.0,
                                  double torque_max = 300.0, double eta_floor = 0.02) {
  return EfficiencyMap(SplineCurve({0.0, omega_max}, {1.0, 1.0}),
                       SplineCurve({-torque_max, torque_max}, {eta, eta}), eta_floor,
                       "constant");
}

}  // namespace ecotraj

#endif  // ECOTRAJ_EFFICIENCY_MAP_HPP_
