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

#ifndef ECOTRAJ_SOLVER_HPP_
#define ECOTRAJ_SOLVER_HPP_

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <deque>
#include <limits>
#include <random>
#include <thread>
#include <vector>

#include "ecotraj/errors.hpp"
#include "ecotraj/nlp.hpp"

namespace ecotraj {

struct SolverOptions {
  int max_major_iterations = 500;
  double objective_rel_tol = 1e-8;
  double feasibility_tol = 1e-6;      // acceptance threshold on the result
  double feasibility_target = 1e-9;   // what the multiplier loop drives for
  int inner_max_iterations = 5000;
  int lbfgs_memory = 10;
  int multistart_perturbations = 3;
  std::uint64_t seed = 12345;
  /// Threads across the independent starts (1: sequential). The result is
  /// identical either way; starts are selected by index, not finish order.
  int start_workers = 1;
  /// Additional full-length initial profiles (clamped into the box).
  std::vector<std::vector<double>> extra_starts;
};

struct OptimizationResult {
  SpeedProfile profile;
  EnergyBreakdown breakdown;
  double total_battery_energy = 0.0;  // J, exact model without penalty
  double reported_energy = 0.0;       // J, penalized total when configured
  bool converged = false;
  int iterations = 0;                 // major iterations of the winning start
  double constraint_violation = 0.0;
  int multistart_index = 0;
};

/// Start-at-rest trapezoid: ramp up, cruise, ramp down into the one-step
/// stop bound. The cruise speed is bisected so the profile mean hits
/// v_target. Throws InfeasibleError when even the v_max ceiling cannot
/// reach the target mean.
inline std::vector<double> trapezoid_profile(int n, double v_target, double accel,
                                             double decel, double v_max, double dt) {
  if (n < 3) throw InfeasibleError("trapezoid: horizon too short");
  auto build = [&](double vc) {
    std::vector<double> v(static_cast<std::size_t>(n), 0.0);
    for (int i = 1; i < n; ++i) {
      const double up = v[i - 1] + accel * dt;
      const double down = decel * dt * static_cast<double>(n - i);
      v[i] = std::max(0.0, std::min({vc, up, down}));
    }
    return v;
  };
  auto mean_of = [&](const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(n);
  };
  if (mean_of(build(v_max)) < v_target) {
    throw InfeasibleError("target mean speed unreachable under the acceleration limits");
  }
  double lo = 0.0, hi = v_max;
  for (int it = 0; it < 100; ++it) {
    const double mid = 0.5 * (lo + hi);
    (mean_of(build(mid)) < v_target ? lo : hi) = mid;
  }
  return build(hi);
}

namespace detail {

struct AlmState {
  double lambda = 0.0;             // mean-equality multiplier
  std::vector<double> nu_upper;    // accel upper-bound multipliers
  std::vector<double> nu_lower;    // accel lower-bound multipliers
  double mu = 10.0;
};

// phi(x) and grad for the augmented Lagrangian of the smooth objective with
// the mean equality and the acceleration band; the box is handled by
// projection in the inner iteration.
class AlmFunction {
 public:
  AlmFunction(const NlpProblem& problem, double f_scale)
      : p_(problem),
        n_(static_cast<std::size_t>(problem.spec.horizon())),
        inv_scale_(1.0 / f_scale),
        v_target_(problem.spec.adjusted_v_avg()) {}

  double operator()(const std::vector<double>& x, const AlmState& s,
                    std::vector<double>& grad) {
    double phi = smooth_objective(x, p_, &grad) * inv_scale_;
    for (double& g : grad) g *= inv_scale_;

    double sum = 0.0;
    for (double xi : x) sum += xi;
    const double c = sum / static_cast<double>(n_) - v_target_;
    const double t_eq = s.lambda + s.mu * c;
    phi += c * (s.lambda + 0.5 * s.mu * c);
    for (double& g : grad) g += t_eq / static_cast<double>(n_);

    const double dt = p_.spec.dt;
    const double a_max = p_.vehicle.max_acceleration;
    const double d_max = p_.vehicle.max_deceleration;
    for (std::size_t i = 0; i + 1 < n_; ++i) {
      const double dv = (x[i + 1] - x[i]) / dt;
      const double gu = dv - a_max;
      const double gl = -d_max - dv;
      const double tu = s.nu_upper[i] + s.mu * gu;
      if (tu > 0.0) {
        phi += (tu * tu - s.nu_upper[i] * s.nu_upper[i]) / (2.0 * s.mu);
        grad[i + 1] += tu / dt;
        grad[i] -= tu / dt;
      } else {
        phi -= s.nu_upper[i] * s.nu_upper[i] / (2.0 * s.mu);
      }
      const double tl = s.nu_lower[i] + s.mu * gl;
      if (tl > 0.0) {
        phi += (tl * tl - s.nu_lower[i] * s.nu_lower[i]) / (2.0 * s.mu);
        grad[i + 1] -= tl / dt;
        grad[i] += tl / dt;
      } else {
        phi -= s.nu_lower[i] * s.nu_lower[i] / (2.0 * s.mu);
      }
    }
    return phi;
  }

  // Violation of the constraints the multipliers own (box is exact).
  double violation(const std::vector<double>& x) const {
    double sum = 0.0;
    for (double xi : x) sum += xi;
    double viol = std::abs(sum / static_cast<double>(n_) - v_target_);
    const double dt = p_.spec.dt;
    for (std::size_t i = 0; i + 1 < n_; ++i) {
      const double dv = (x[i + 1] - x[i]) / dt;
      viol = std::max(viol, dv - p_.vehicle.max_acceleration);
      viol = std::max(viol, -p_.vehicle.max_deceleration - dv);
    }
    return viol;
  }

  void update_multipliers(const std::vector<double>& x, AlmState& s) const {
    double sum = 0.0;
    for (double xi : x) sum += xi;
    s.lambda += s.mu * (sum / static_cast<double>(n_) - v_target_);
    const double dt = p_.spec.dt;
    for (std::size_t i = 0; i + 1 < n_; ++i) {
      const double dv = (x[i + 1] - x[i]) / dt;
      s.nu_upper[i] = std::max(0.0, s.nu_upper[i] + s.mu * (dv - p_.vehicle.max_acceleration));
      s.nu_lower[i] = std::max(0.0, s.nu_lower[i] + s.mu * (-p_.vehicle.max_deceleration - dv));
    }
  }

 private:
  const NlpProblem& p_;
  std::size_t n_;
  double inv_scale_;
  double v_target_;
};

// Projected L-BFGS with Armijo backtracking along the projection arc.
// Returns the reached projected-gradient norm.
class ProjectedLbfgs {
 public:
  ProjectedLbfgs(std::vector<double> lo, std::vector<double> hi, int memory)
      : lo_(std::move(lo)), hi_(std::move(hi)), memory_(memory) {}

  template <class F>
  double minimize(F&& phi, std::vector<double>& x, double tol, int max_iter) {
    const std::size_t n = x.size();
    project(x);
    std::vector<double> g(n), gn(n), xt(n), d(n);
    double f = phi(x, g);
    s_.clear();
    y_.clear();
    rho_.clear();
    double pg_norm = std::numeric_limits<double>::infinity();
    for (int it = 0; it < max_iter; ++it) {
      pg_norm = projected_gradient_norm(x, g);
      if (pg_norm <= tol) break;

      direction(g, d);
      double slope = dot(d, g);
      if (!(slope < 0.0)) {
        for (std::size_t i = 0; i < n; ++i) d[i] = -g[i];
        slope = -dot(g, g);
        s_.clear();
        y_.clear();
        rho_.clear();
      }

      double alpha = 1.0;
      bool accepted = false;
      double ft = f;
      for (int ls = 0; ls < 40; ++ls) {
        for (std::size_t i = 0; i < n; ++i) xt[i] = x[i] + alpha * d[i];
        project(xt);
        ft = phi(xt, gn);
        double pred = 0.0;
        for (std::size_t i = 0; i < n; ++i) pred += g[i] * (xt[i] - x[i]);
        if (ft <= f + 1e-4 * pred && pred < 0.0) {
          accepted = true;
          break;
        }
        alpha *= 0.5;
      }
      if (!accepted) break;  // stationary within line-search resolution

      push_pair(x, xt, g, gn);
      x.swap(xt);
      g.swap(gn);
      f = ft;
    }
    return pg_norm;
  }

 private:
  void project(std::vector<double>& x) const {
    for (std::size_t i = 0; i < x.size(); ++i) {
      x[i] = std::min(hi_[i], std::max(lo_[i], x[i]));
    }
  }

  double projected_gradient_norm(const std::vector<double>& x,
                                 const std::vector<double>& g) const {
    double m = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double step = std::min(hi_[i], std::max(lo_[i], x[i] - g[i]));
      m = std::max(m, std::abs(x[i] - step));
    }
    return m;
  }

  static double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
  }

  void push_pair(const std::vector<double>& x, const std::vector<double>& xt,
                 const std::vector<double>& g, const std::vector<double>& gt) {
    std::vector<double> s(x.size()), y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
      s[i] = xt[i] - x[i];
      y[i] = gt[i] - g[i];
    }
    const double sy = dot(s, y);
    if (sy > 1e-12) {
      s_.push_back(std::move(s));
      y_.push_back(std::move(y));
      rho_.push_back(1.0 / sy);
      if (static_cast<int>(s_.size()) > memory_) {
        s_.pop_front();
        y_.pop_front();
        rho_.pop_front();
      }
    }
  }

  void direction(const std::vector<double>& g, std::vector<double>& d) const {
    d.assign(g.size(), 0.0);
    for (std::size_t i = 0; i < g.size(); ++i) d[i] = -g[i];
    if (s_.empty()) return;
    const std::size_t m = s_.size();
    std::vector<double> alpha(m);
    for (std::size_t k = m; k-- > 0;) {
      alpha[k] = rho_[k] * dot(s_[k], d);
      for (std::size_t i = 0; i < d.size(); ++i) d[i] -= alpha[k] * y_[k][i];
    }
    const double gamma = 1.0 / (rho_.back() * dot(y_.back(), y_.back()));
    for (double& di : d) di *= gamma;
    for (std::size_t k = 0; k < m; ++k) {
      const double beta = rho_[k] * dot(y_[k], d);
      for (std::size_t i = 0; i < d.size(); ++i) d[i] += (alpha[k] - beta) * s_[k][i];
    }
  }

  std::vector<double> lo_, hi_;
  int memory_;
  std::deque<std::vector<double>> s_, y_;
  std::deque<double> rho_;
};

struct StartOutcome {
  std::vector<double> x;
  double exact_objective = 0.0;
  double violation = 0.0;
  bool converged = false;
  int majors = 0;
};

inline StartOutcome solve_from(const NlpProblem& problem, const SolverOptions& opt,
                               std::vector<double> x0, double f_scale) {
  const int n = problem.spec.horizon();
  std::vector<double> lo(static_cast<std::size_t>(n), 0.0);
  std::vector<double> hi(static_cast<std::size_t>(n), problem.spec.v_max);
  lo[0] = hi[0] = 0.0;  // stop-to-stop start pinned at rest
  hi[static_cast<std::size_t>(n) - 1] =
      std::min(problem.spec.v_max, problem.vehicle.max_deceleration * problem.spec.dt);

  AlmFunction alm(problem, f_scale);
  AlmState state;
  state.nu_upper.assign(static_cast<std::size_t>(n) - 1, 0.0);
  state.nu_lower.assign(static_cast<std::size_t>(n) - 1, 0.0);

  ProjectedLbfgs inner(lo, hi, opt.lbfgs_memory);
  StartOutcome out;
  out.x = std::move(x0);

  double inner_tol = 1e-4;
  const double inner_tol_final = 1e-9;
  double prev_viol = std::numeric_limits<double>::infinity();
  double prev_exact = std::numeric_limits<double>::infinity();
  for (int major = 1; major <= opt.max_major_iterations; ++major) {
    out.majors = major;
    auto phi = [&](const std::vector<double>& x, std::vector<double>& grad) {
      return alm(x, state, grad);
    };
    const double pg = inner.minimize(phi, out.x, inner_tol, opt.inner_max_iterations);
    const double viol = alm.violation(out.x);
    const double exact = objective(out.x, problem);

    const bool feasible = viol <= opt.feasibility_target;
    const bool settled =
        std::abs(exact - prev_exact) <= opt.objective_rel_tol * std::max(1.0, std::abs(exact));
    if (feasible && settled && inner_tol <= inner_tol_final * 10.0) {
      out.converged = true;
      break;
    }
    prev_exact = exact;

    alm.update_multipliers(out.x, state);
    if (viol > 0.25 * prev_viol && viol > opt.feasibility_target) {
      state.mu = std::min(state.mu * 8.0, 1e12);
    }
    prev_viol = viol;
    inner_tol = std::max(inner_tol * 0.25, inner_tol_final);
    (void)pg;
  }
  out.violation = alm.violation(out.x);
  out.exact_objective = objective(out.x, problem);
  return out;
}

}  // namespace detail

/// Solves the discrete stop-to-stop energy problem: trapezoid start plus a
/// fixed set of seeded perturbations, augmented-Lagrangian outer loop,
/// projected L-BFGS inner loop. Deterministic for fixed options.
inline OptimizationResult solve(const NlpProblem& problem, const SolverOptions& opt = {}) {
  problem.spec.validate();
  problem.vehicle.validate();
  problem.env.validate();
  if (problem.penalty) problem.penalty->validate();

  const int n = problem.spec.horizon();
  const double v_target = problem.spec.adjusted_v_avg();
  const double dt = problem.spec.dt;

  // Feasibility is certified by the full-rate trapezoid; the half-rate
  // variant is the gentler default start when it can meet the mean.
  std::vector<double> base;
  try {
    base = trapezoid_profile(n, v_target, problem.vehicle.max_acceleration / 2.0,
                             problem.vehicle.max_deceleration / 2.0, problem.spec.v_max, dt);
  } catch (const InfeasibleError&) {
    base = trapezoid_profile(n, v_target, problem.vehicle.max_acceleration,
                             problem.vehicle.max_deceleration, problem.spec.v_max, dt);
  }

  std::vector<std::vector<double>> starts;
  starts.push_back(base);

  // Structured pulse-and-coast starts: torque-ridged maps favor repeated
  // hard accelerations with coasting in between, a basin the smooth
  // trapezoid cannot reach. Deterministic by construction.
  for (const int samples_per_pulse : {25, 40, 60}) {
    if (n < samples_per_pulse) continue;
    const int pulses = std::max(1, n / samples_per_pulse);
    std::vector<double> s = base;
    for (int i = 0; i < n; ++i) {
      const double u = static_cast<double>(i * pulses) / n;
      const double saw = 2.0 * std::abs(u - std::floor(u) - 0.5);  // 1 -> 0 -> 1
      const double bump = 0.45 * base[static_cast<std::size_t>(i)] * (saw - 0.5);
      s[static_cast<std::size_t>(i)] = std::clamp(
          base[static_cast<std::size_t>(i)] + bump, 0.0, problem.spec.v_max);
    }
    starts.push_back(std::move(s));
  }

  std::mt19937_64 rng(opt.seed);
  std::uniform_real_distribution<double> amp(0.05, 0.25);
  std::uniform_real_distribution<double> phase(0.0, 6.283185307179586);
  std::uniform_int_distribution<int> freq(1, 4);
  for (int k = 0; k < opt.multistart_perturbations; ++k) {
    std::vector<double> s = base;
    const double a1 = amp(rng), a2 = amp(rng);
    const double p1 = phase(rng), p2 = phase(rng);
    const int f1 = freq(rng), f2 = freq(rng);
    for (int i = 0; i < n; ++i) {
      const double u = static_cast<double>(i) / n;
      const double factor = 1.0 + a1 * std::sin(2.0 * M_PI * f1 * u + p1) +
                            a2 * std::sin(2.0 * M_PI * f2 * u + p2);
      s[static_cast<std::size_t>(i)] =
          std::clamp(s[static_cast<std::size_t>(i)] * factor, 0.0, problem.spec.v_max);
    }
    starts.push_back(std::move(s));
  }
  for (const auto& extra : opt.extra_starts) {
    if (static_cast<int>(extra.size()) == n) starts.push_back(extra);
  }

  const double f_scale = std::max(1.0, std::abs(objective(base, problem)));
  std::vector<detail::StartOutcome> outcomes(starts.size());
  const int workers = std::min<int>(std::max(1, opt.start_workers),
                                    static_cast<int>(starts.size()));
  if (workers <= 1) {
    for (std::size_t i = 0; i < starts.size(); ++i) {
      outcomes[i] = detail::solve_from(problem, opt, std::move(starts[i]), f_scale);
    }
  } else {
    std::atomic<std::size_t> next{0};
    auto work = [&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= starts.size()) return;
        outcomes[i] = detail::solve_from(problem, opt, std::move(starts[i]), f_scale);
      }
    };
    std::vector<std::thread> pool;
    for (int w = 1; w < workers; ++w) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();
  }

  int best = -1;
  for (int i = 0; i < static_cast<int>(outcomes.size()); ++i) {
    const auto& o = outcomes[static_cast<std::size_t>(i)];
    if (best < 0) {
      best = i;
      continue;
    }
    const auto& b = outcomes[static_cast<std::size_t>(best)];
    const bool o_feas = o.violation <= opt.feasibility_tol;
    const bool b_feas = b.violation <= opt.feasibility_tol;
    if (o_feas != b_feas) {
      if (o_feas) best = i;
    } else if (o_feas ? (o.exact_objective < b.exact_objective) : (o.violation < b.violation)) {
      best = i;
    }
  }

  auto& win = outcomes[static_cast<std::size_t>(best)];
  OptimizationResult result;
  result.profile = SpeedProfile{dt, std::move(win.x)};
  result.breakdown = evaluate_profile(result.profile, problem);
  result.total_battery_energy = result.breakdown.total_battery_J;
  result.reported_energy =
      problem.penalty
          ? penalized_energy(result.breakdown.battery_J, result.breakdown.torque_Nm, dt,
                             *problem.penalty)
          : result.total_battery_energy;
  result.converged = win.converged && win.violation <= opt.feasibility_tol;
  result.iterations = win.majors;
  result.constraint_violation = win.violation;
  result.multistart_index = best;
  return result;
}

}  // namespace ecotraj

#endif  // ECOTRAJ_SOLVER_HPP_
