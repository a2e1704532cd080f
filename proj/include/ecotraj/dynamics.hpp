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

#ifndef ECOTRAJ_DYNAMICS_HPP_
#define ECOTRAJ_DYNAMICS_HPP_

#include <numeric>
#include <stdexcept>
#include <vector>

#include "ecotraj/errors.hpp"
#include "ecotraj/vehicle.hpp"

namespace ecotraj {

/// Uniformly sampled stop-to-stop speed trajectory. The sample before the
/// first entry and after the last are at rest by convention.
struct SpeedProfile {
  double dt = 1.0;              // s
  std::vector<double> speeds;   // m/s, v_1..v_N

  void validate() const {
    if (!(dt > 0.0)) throw ConfigError("profile.dt must be > 0");
    for (double v : speeds) {
      if (!(v >= 0.0)) throw std::domain_error("profile speeds must be >= 0");
    }
  }
};

/// Motor shaft state corresponding to one wheel operating point.
struct MotorOperatingPoint {
  double omega = 0.0;   // rad/s
  double torque = 0.0;  // N*m, signed (negative while braking)
};

/// Traction power at the wheels for speed v and acceleration accel:
/// inertial term plus aerodynamic drag plus rolling resistance.
inline double wheel_power(double v, double accel, const VehicleParams& vehicle,
                          const EnvironmentParams& env) {
  if (!(v >= 0.0)) throw std::domain_error("wheel_power: v must be >= 0");
  return vehicle.effective_mass() * v * accel +
         0.5 * vehicle.drag_area * env.air_density * v * v * v +
         vehicle.mass * env.gravity * env.rolling_coefficient * v;
}

namespace detail {

// Per-segment wheel energy with the acceleration term expressed as a
// kinetic-energy difference; drag and rolling use the left sample.
// Templated so dual-number evaluation yields exact derivatives.
template <class S>
S wheel_energy_segment_t(const S& v_n, const S& v_next, double dt,
                         const VehicleParams& vehicle, const EnvironmentParams& env) {
  const S kinetic = S(0.5 * vehicle.effective_mass()) * (v_next * v_next - v_n * v_n);
  const S drag = S(0.5 * vehicle.drag_area * env.air_density * dt) * v_n * v_n * v_n;
  const S rolling = S(vehicle.mass * env.gravity * env.rolling_coefficient * dt) * v_n;
  return kinetic + drag + rolling;
}

}  // namespace detail

/// Energy delivered to the wheels while the speed moves from v_n to v_next
/// over one sampling interval.
inline double wheel_energy_segment(double v_n, double v_next, double dt,
                                   const VehicleParams& vehicle,
                                   const EnvironmentParams& env) {
  if (!(v_n >= 0.0) || !(v_next >= 0.0)) {
    throw std::domain_error("wheel_energy_segment: speeds must be >= 0");
  }
  if (!(dt > 0.0)) throw std::domain_error("wheel_energy_segment: dt must be > 0");
  return detail::wheel_energy_segment_t(v_n, v_next, dt, vehicle, env);
}

/// Rectangle-rule distance covered by a profile.
inline double profile_distance(const SpeedProfile& profile) {
  const double sum = std::accumulate(profile.speeds.begin(), profile.speeds.end(), 0.0);
  return profile.dt * sum;
}

/// Maps a wheel state (speed, tractive force) through the single-speed
/// reduction onto the motor shaft.
inline MotorOperatingPoint motor_operating_point(double v, double wheel_force,
                                                 const VehicleParams& vehicle) {
  if (!(v >= 0.0)) throw std::domain_error("motor_operating_point: v must be >= 0");
  return {v * vehicle.gear_ratio / vehicle.wheel_radius,
          wheel_force * vehicle.wheel_radius / vehicle.gear_ratio};
}

/// Mean tractive force over a segment, recovered from its energy. Speeds
/// below v_floor clamp to keep the division bounded; energy accounting
/// itself never divides by v.
inline double wheel_force_from_energy(double e_wheel, double v, double dt,
                                      double v_floor = 0.1) {
  const double u = v > v_floor ? v : v_floor;
  return e_wheel / (u * dt);
}

}  // namespace ecotraj

#endif  // ECOTRAJ_DYNAMICS_HPP_
