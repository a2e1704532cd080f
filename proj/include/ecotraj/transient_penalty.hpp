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

#ifndef ECOTRAJ_TRANSIENT_PENALTY_HPP_
#define ECOTRAJ_TRANSIENT_PENALTY_HPP_

#include <cmath>
#include <cstddef>
#include <vector>

#include "ecotraj/errors.hpp"

namespace ecotraj {

/// Surcharge on battery draw for a fixed window after every wheel-torque
/// increase, modeling transient powertrain losses.
struct TransientPenalty {
  double penalty_fraction = 0.0;   // p, e.g. 0.10 / 0.15 / 0.30
  double window = 1.0;             // s
  double increase_threshold = 1.0; // N*m, ignores numerical jitter

  void validate() const {
    if (!(penalty_fraction >= 0.0)) throw ConfigError("penalty_fraction must be >= 0");
    if (!(window > 0.0)) throw ConfigError("penalty window must be > 0");
    if (!(increase_threshold >= 0.0)) throw ConfigError("increase_threshold must be >= 0");
  }
};

/// Marks the samples covered by some penalty window. Torque before the
/// first sample is zero (vehicle at rest). Windows do not stack: a sample
/// is penalized once no matter how many increases cover it.
inline std::vector<bool> penalized_samples(const std::vector<double>& torques, double dt,
                                           const TransientPenalty& penalty) {
  penalty.validate();
  const std::size_t n = torques.size();
  std::vector<bool> hit(n, false);
  const std::size_t window_len =
      static_cast<std::size_t>(std::ceil(penalty.window / dt - 1e-12));
  double prev = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (torques[i] - prev > penalty.increase_threshold) {
      const std::size_t end = std::min(n, i + std::max<std::size_t>(window_len, 1));
      for (std::size_t k = i; k < end; ++k) hit[k] = true;
    }
    prev = torques[i];
  }
  return hit;
}

/// Total battery energy with the windowed surcharge applied to positive
/// battery samples: a penalized discharge sample contributes (1+p) times
/// its energy; regenerative samples are never penalized.
inline double penalized_energy(const std::vector<double>& battery_segments,
                               const std::vector<double>& torques, double dt,
                               const TransientPenalty& penalty) {
  if (battery_segments.size() != torques.size()) {
    throw ConfigError("penalized_energy: torque/battery sample mismatch");
  }
  const std::vector<bool> hit = penalized_samples(torques, dt, penalty);
  double total = 0.0;
  for (std::size_t i = 0; i < battery_segments.size(); ++i) {
    const double e = battery_segments[i];
    total += (hit[i] && e >= 0.0) ? (1.0 + penalty.penalty_fraction) * e : e;
  }
  return total;
}

}  // namespace ecotraj

#endif  // ECOTRAJ_TRANSIENT_PENALTY_HPP_
