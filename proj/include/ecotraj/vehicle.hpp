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

#ifndef ECOTRAJ_VEHICLE_HPP_
#define ECOTRAJ_VEHICLE_HPP_

#include <cmath>
#include <fstream>
#include <map>
#include <string>
#include <utility>

#include "ecotraj/errors.hpp"
#include "json.hpp"

namespace ecotraj {

/// Longitudinal-dynamics parameters of one vehicle. SI units throughout.
struct VehicleParams {
  double mass = 0.0;                         // kg
  double rotational_equivalent_mass = 0.0;   // kg, added inertia of rotating parts
  double drag_area = 0.0;                    // m^2, product Cd * A
  double max_acceleration = 0.0;             // m/s^2
  double max_deceleration = 0.0;             // m/s^2, positive magnitude
  double wheel_radius = 0.3;                 // m
  double gear_ratio = 8.0;                   // single-speed reduction

  double effective_mass() const { return mass + rotational_equivalent_mass; }

  void validate() const {
    if (!(mass > 0.0)) throw ConfigError("vehicle.mass must be > 0");
    if (!(rotational_equivalent_mass >= 0.0)) {
      throw ConfigError("vehicle.rotational_equivalent_mass must be >= 0");
    }
    if (!(drag_area > 0.0)) throw ConfigError("vehicle.drag_area must be > 0");
    if (!(max_acceleration > 0.0)) throw ConfigError("vehicle.max_acceleration must be > 0");
    if (!(max_deceleration > 0.0)) throw ConfigError("vehicle.max_deceleration must be > 0");
    if (!(wheel_radius > 0.0)) throw ConfigError("vehicle.wheel_radius must be > 0");
    if (!(gear_ratio > 0.0)) throw ConfigError("vehicle.gear_ratio must be > 0");
  }
};

/// Ambient constants of the resistance model.
struct EnvironmentParams {
  double air_density = 1.2;          // kg/m^3
  double rolling_coefficient = 0.01; // dimensionless
  double gravity = 9.81;             // m/s^2

  void validate() const {
    if (!(air_density > 0.0)) throw ConfigError("environment.air_density must be > 0");
    if (!(rolling_coefficient > 0.0)) {
      throw ConfigError("environment.rolling_coefficient must be > 0");
    }
    if (!(gravity > 0.0)) throw ConfigError("environment.gravity must be > 0");
  }
};

/// Built-in parameter sets: type1 is a compact EV, type2 a heavier sedan
/// with a stronger drivetrain.
inline const std::map<std::string, VehicleParams>& vehicle_catalog() {
  static const std::map<std::string, VehicleParams> catalog = {
      {"type1", {1525.0, 0.0, 0.6583, 4.6, 2.0, 0.3, 8.0}},
      {"type2", {2018.0, 0.0, 0.6720, 8.0, 2.5, 0.3, 8.0}},
  };
  return catalog;
}

inline VehicleParams vehicle_by_id(const std::string& id) {
  const auto& cat = vehicle_catalog();
  const auto it = cat.find(id);
  if (it == cat.end()) throw ConfigError("unknown vehicle id: " + id);
  return it->second;
}

namespace detail {

inline void read_field(const nlohmann::json& j, const char* key, double& out) {
  if (j.contains(key)) {
    if (!j.at(key).is_number()) {
      throw ConfigError(std::string("field '") + key + "' must be a number");
    }
    out = j.at(key).get<double>();
  }
}

inline VehicleParams vehicle_from_json(const nlohmann::json& j) {
  VehicleParams p;
  read_field(j, "mass", p.mass);
  read_field(j, "rotational_equivalent_mass", p.rotational_equivalent_mass);
  read_field(j, "drag_area", p.drag_area);
  read_field(j, "max_acceleration", p.max_acceleration);
  read_field(j, "max_deceleration", p.max_deceleration);
  read_field(j, "wheel_radius", p.wheel_radius);
  read_field(j, "gear_ratio", p.gear_ratio);
  p.validate();
  return p;
}

inline EnvironmentParams environment_from_json(const nlohmann::json& j) {
  EnvironmentParams e;
  read_field(j, "air_density", e.air_density);
  read_field(j, "rolling_coefficient", e.rolling_coefficient);
  read_field(j, "gravity", e.gravity);
  e.validate();
  return e;
}

inline nlohmann::json parse_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("malformed JSON in " + path + ": " + e.what());
  }
  return j;
}

}  // namespace detail

/// Loads `{"vehicle": {...}, "environment": {...}}`; the environment
/// section is optional and defaults apply to every omitted key.
inline std::pair<VehicleParams, EnvironmentParams> load_vehicle_file(const std::string& path) {
  const nlohmann::json j = detail::parse_json_file(path);
  if (!j.contains("vehicle")) throw ConfigError(path + ": missing 'vehicle' section");
  VehicleParams v = detail::vehicle_from_json(j.at("vehicle"));
  EnvironmentParams e;
  if (j.contains("environment")) e = detail::environment_from_json(j.at("environment"));
  return {v, e};
}

}  // namespace ecotraj

#endif  // ECOTRAJ_VEHICLE_HPP_
