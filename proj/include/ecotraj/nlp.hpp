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

#ifndef ECOTRAJ_NLP_HPP_
#define ECOTRAJ_NLP_HPP_

#include <cmath>
#include <cstddef>
#include <optional>
#include <vector>

#include "ecotraj/drive_cycle.hpp"
#include "ecotraj/dual.hpp"
#include "ecotraj/dynamics.hpp"
#include "ecotraj/efficiency_map.hpp"
#include "ecotraj/errors.hpp"
#include "ecotraj/transient_penalty.hpp"
#include "ecotraj/vehicle.hpp"

namespace ecotraj {

/// One stop-to-stop problem instance.
struct SegmentSpec {
  double distance = 0.0;  // m
  double v_avg = 0.0;     // m/s
  double v_max = 0.0;     // m/s
  double dt = 1.0;        // s

  /// Number of samples: the travel time rounded to whole intervals.
  int horizon() const {
    return static_cast<int>(std::llround(distance / v_avg / dt));
  }

  /// Mean speed re-derived from the rounded horizon, so the distance is
  /// met exactly by the mean-speed equality.
  double adjusted_v_avg() const { return distance / (horizon() * dt); }

  void validate() const {
    if (!(distance > 0.0)) throw ConfigError("spec.distance must be > 0");
    if (!(dt > 0.0)) throw ConfigError("spec.dt must be > 0");
    if (!(v_avg > 0.0 && v_avg < v_max)) {
      throw ConfigError("spec requires 0 < v_avg < v_max");
    }
    if (horizon() < 3) throw ConfigError("spec horizon must be >= 3 samples");
  }
};

/// Everything needed to evaluate the battery-energy objective.
struct NlpProblem {
  SegmentSpec spec;
  VehicleParams vehicle;
  EnvironmentParams env;
  EfficiencyMap map;
  std::optional<EfficiencyMap> regen_map;       // distinct regen surface, optional
  std::optional<TransientPenalty> penalty;

  double branch_blend_kappa = 1.0;      // J; C1 blend half-width at E_wheel = 0
  double torque_v_floor = 0.1;          // m/s; clamp for force-from-energy
  double trigger_smooth_width = 0.5;    // N*m; sigmoid width for the solver's
                                        // differentiable increase detector
};

/// Per-sample energy accounting for one profile.
struct EnergyBreakdown {
  std::vector<double> wheel_J;
  std::vector<double> battery_J;
  std::vector<double> eta;
  std::vector<double> omega_rad_s;
  std::vector<double> torque_Nm;
  std::vector<double> cumulative_battery_J;
  double total_battery_J = 0.0;
};

namespace detail {

template <class S>
struct PowertrainSample {
  S e_wheel;
  S omega;
  S torque;
  S eta;      // efficiency of the active (or blend-dominant) branch
  S battery;
};

// Composes the segment energy, the motor operating point, the map lookup
// and the branch rule. kappa > 0 blends the branch switch C1-smoothly.
template <class S>
PowertrainSample<S> powertrain_sample(const S& v_n, const S& v_next,
                                      const NlpProblem& p, double kappa) {
  PowertrainSample<S> s;
  s.e_wheel = wheel_energy_segment_t(v_n, v_next, p.spec.dt, p.vehicle, p.env);
  s.omega = v_n * S(p.vehicle.gear_ratio / p.vehicle.wheel_radius);
  const S u = smax(v_n, S(p.torque_v_floor));
  const S force = s.e_wheel / (u * S(p.spec.dt));
  s.torque = force * S(p.vehicle.wheel_radius / p.vehicle.gear_ratio);

  const S eta_frw = p.map.eval(s.omega, s.torque);
  const S eta_reg = p.regen_map ? p.regen_map->eval(s.omega, s.torque) : eta_frw;
  s.eta = value_of(s.e_wheel) >= 0.0 ? eta_frw : eta_reg;

  if (kappa <= 0.0) {
    s.battery = value_of(s.e_wheel) >= 0.0 ? s.e_wheel / eta_frw : eta_reg * s.e_wheel;
  } else if (value_of(s.e_wheel) >= kappa) {
    s.battery = s.e_wheel / eta_frw;
  } else if (value_of(s.e_wheel) <= -kappa) {
    s.battery = eta_reg * s.e_wheel;
  } else {
    const S t = (s.e_wheel + S(kappa)) / S(2.0 * kappa);
    const S w = t * t * (S(3.0) - S(2.0) * t);
    s.battery = w * (s.e_wheel / eta_frw) + (S(1.0) - w) * (eta_reg * s.e_wheel);
  }
  return s;
}

// Discharge part of the blended battery energy; the quantity the transient
// penalty multiplies.
template <class S>
S blended_discharge(const PowertrainSample<S>& s, const NlpProblem& p, double kappa) {
  const S zero(0.0);
  if (kappa <= 0.0) {
    return value_of(s.e_wheel) >= 0.0 ? s.battery : zero;
  }
  if (value_of(s.e_wheel) >= kappa) return s.battery;
  if (value_of(s.e_wheel) <= -kappa) return zero;
  const S t = (s.e_wheel + S(kappa)) / S(2.0 * kappa);
  const S w = t * t * (S(3.0) - S(2.0) * t);
  const S eta_frw = p.regen_map ? p.map.eval(s.omega, s.torque) : s.eta;
  return w * (s.e_wheel / eta_frw);
}

inline double stable_sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace detail

/// Exact per-sample energy accounting (Eq-by-branch rule, no blending).
/// The segment after the last sample ends at rest.
inline EnergyBreakdown evaluate_profile(const SpeedProfile& profile, const NlpProblem& problem) {
  if (static_cast<int>(profile.speeds.size()) != problem.spec.horizon()) {
    throw ConfigError("evaluate_profile: profile length does not match the spec horizon");
  }
  profile.validate();
  const std::size_t n = profile.speeds.size();
  EnergyBreakdown b;
  b.wheel_J.resize(n);
  b.battery_J.resize(n);
  b.eta.resize(n);
  b.omega_rad_s.resize(n);
  b.torque_Nm.resize(n);
  b.cumulative_battery_J.resize(n);
  double cum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double v = profile.speeds[i];
    const double v_next = i + 1 < n ? profile.speeds[i + 1] : 0.0;
    const auto s = detail::powertrain_sample<double>(v, v_next, problem, 0.0);
    b.wheel_J[i] = s.e_wheel;
    b.battery_J[i] = s.battery;
    b.eta[i] = s.eta;
    b.omega_rad_s[i] = s.omega;
    b.torque_Nm[i] = s.torque;
    cum += s.battery;
    b.cumulative_battery_J[i] = cum;
  }
  b.total_battery_J = cum;
  return b;
}

/// Total battery energy of a speed vector under the exact model, including
/// the exact windowed transient penalty when one is configured.
inline double objective(const std::vector<double>& v, const NlpProblem& problem) {
  if (static_cast<int>(v.size()) != problem.spec.horizon()) {
    throw ConfigError("objective: speed vector length does not match the spec horizon");
  }
  SpeedProfile profile{problem.spec.dt, v};
  const EnergyBreakdown b = evaluate_profile(profile, problem);
  if (!problem.penalty || problem.penalty->penalty_fraction == 0.0) {
    return b.total_battery_J;
  }
  return penalized_energy(b.battery_J, b.torque_Nm, problem.spec.dt, *problem.penalty);
}

/// Residuals of the discrete problem's constraints. Positive inequality
/// entries are violations; the mean equality should be zero.
struct ConstraintResiduals {
  double mean_equality = 0.0;        // mean(v) - v_avg
  std::vector<double> box_lower;     // -v_n           <= 0
  std::vector<double> box_upper;     // v_n - v_max    <= 0
  std::vector<double> accel_lower;   // -d - dv_n/dt   <= 0   (dv_N = -v_N)
  std::vector<double> accel_upper;   // dv_n/dt - a_max <= 0

  double max_violation() const {
    double m = std::abs(mean_equality);
    for (const auto* vec : {&box_lower, &box_upper, &accel_lower, &accel_upper}) {
      for (double r : *vec) m = std::max(m, r);
    }
    return m;
  }
};

inline ConstraintResiduals constraints(const std::vector<double>& v, const SegmentSpec& spec,
                                       const VehicleParams& vehicle) {
  const std::size_t n = v.size();
  ConstraintResiduals r;
  r.box_lower.resize(n);
  r.box_upper.resize(n);
  r.accel_lower.resize(n);
  r.accel_upper.resize(n);
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sum += v[i];
    r.box_lower[i] = -v[i];
    r.box_upper[i] = v[i] - spec.v_max;
    const double dv = (i + 1 < n ? v[i + 1] : 0.0) - v[i];
    r.accel_lower[i] = -vehicle.max_deceleration - dv / spec.dt;
    r.accel_upper[i] = dv / spec.dt - vehicle.max_acceleration;
  }
  r.mean_equality = sum / static_cast<double>(n) - spec.adjusted_v_avg();
  return r;
}

/// C1-smooth objective used by the solver: branch switch blended over
/// |E_wheel| < kappa and, when a penalty is configured, the torque-increase
/// indicator softened by a sigmoid. Writes the exact gradient when `grad`
/// is non-null. Away from the blend region the value coincides with
/// objective() for penalty-free problems.
inline double smooth_objective(const std::vector<double>& v, const NlpProblem& problem,
                               std::vector<double>* grad) {
  using D2 = Dual<2>;
  const std::size_t n = v.size();
  const double kappa = problem.branch_blend_kappa;
  if (grad) {
    grad->assign(n, 0.0);
  }

  double total = 0.0;
  std::vector<double> torque_val;
  std::vector<std::array<double, 2>> torque_grad;   // d T_i / d(v_i, v_{i+1})
  std::vector<double> discharge_val;
  std::vector<std::array<double, 2>> discharge_grad;
  const bool with_penalty = problem.penalty && problem.penalty->penalty_fraction > 0.0;
  if (with_penalty) {
    torque_val.resize(n);
    torque_grad.resize(n);
    discharge_val.resize(n);
    discharge_grad.resize(n);
  }

  for (std::size_t i = 0; i < n; ++i) {
    const D2 vi = D2::seeded(v[i], 0);
    const D2 vn = i + 1 < n ? D2::seeded(v[i + 1], 1) : D2(0.0);
    const auto s = detail::powertrain_sample<D2>(vi, vn, problem, kappa);
    total += s.battery.v;
    if (grad) {
      (*grad)[i] += s.battery.d[0];
      if (i + 1 < n) (*grad)[i + 1] += s.battery.d[1];
    }
    if (with_penalty) {
      torque_val[i] = s.torque.v;
      torque_grad[i] = s.torque.d;
      const D2 pos = detail::blended_discharge(s, problem, kappa);
      discharge_val[i] = pos.v;
      discharge_grad[i] = pos.d;
    }
  }
  if (!with_penalty) return total;

  // Soft coverage S_i = 1 - prod_{j in window(i)} (1 - sigma_j): the smooth
  // "penalized at most once" rule. sigma_j is the softened indicator of a
  // torque increase at sample j (torque before the first sample is zero).
  const TransientPenalty& pen = *problem.penalty;
  const double p = pen.penalty_fraction;
  const double width = problem.trigger_smooth_width;
  const std::size_t window_len = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::ceil(pen.window / problem.spec.dt - 1e-12)));

  std::vector<double> sigma(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double rise = torque_val[j] - (j > 0 ? torque_val[j - 1] : 0.0);
    sigma[j] = detail::stable_sigmoid((rise - pen.increase_threshold) / width);
  }

  auto add_grad_torque = [&](std::size_t j, double w) {
    // Adds w * dT_j/dv to the gradient.
    if (!grad) return;
    (*grad)[j] += w * torque_grad[j][0];
    if (j + 1 < n) (*grad)[j + 1] += w * torque_grad[j][1];
  };

  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j0 = i + 1 >= window_len ? i + 1 - window_len : 0;
    double prod = 1.0;
    for (std::size_t j = j0; j <= i; ++j) prod *= 1.0 - sigma[j];
    const double cover = 1.0 - prod;
    total += p * cover * discharge_val[i];
    if (!grad) continue;

    (*grad)[i] += p * cover * discharge_grad[i][0];
    if (i + 1 < n) (*grad)[i + 1] += p * cover * discharge_grad[i][1];

    for (std::size_t j = j0; j <= i; ++j) {
      // dS_i/dsigma_j = prod over the window without factor j.
      double rest = 1.0;
      for (std::size_t k = j0; k <= i; ++k) {
        if (k != j) rest *= 1.0 - sigma[k];
      }
      const double dsig = sigma[j] * (1.0 - sigma[j]) / width;
      const double w = p * discharge_val[i] * rest * dsig;
      add_grad_torque(j, w);
      if (j > 0) add_grad_torque(j - 1, -w);
    }
  }
  return total;
}

}  // namespace ecotraj

#endif  // ECOTRAJ_NLP_HPP_
