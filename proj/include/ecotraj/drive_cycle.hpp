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

#ifndef ECOTRAJ_DRIVE_CYCLE_HPP_
#define ECOTRAJ_DRIVE_CYCLE_HPP_

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "ecotraj/dynamics.hpp"
#include "ecotraj/errors.hpp"

namespace ecotraj {

inline constexpr double kMphToMps = 0.44704;

enum class SpeedUnit { kMph, kMps };

inline SpeedUnit speed_unit_from_string(const std::string& s) {
  if (s == "mph") return SpeedUnit::kMph;
  if (s == "m_s" || s == "mps" || s == "m/s") return SpeedUnit::kMps;
  throw ConfigError("unknown speed unit: " + s + " (expected mph or m_s)");
}

/// A reference drive cycle sampled at a uniform interval, stored in m/s.
struct DriveCycle {
  double dt = 1.0;
  std::vector<double> speeds;
};

/// One stop-to-stop run extracted from a cycle.
struct StopSegment {
  std::vector<double> speeds;  // m/s, all above the stop threshold
  double distance = 0.0;       // m, rectangle rule
};

/// Reads `time_s,speed` CSV; the unit flag converts mph sources on ingest.
/// The sample interval is inferred from the first two rows.
inline DriveCycle load_drive_cycle_csv(const std::string& path, SpeedUnit unit) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open drive cycle: " + path);
  std::string line;
  if (!std::getline(in, line)) throw ConfigError(path + ": empty file");
  DriveCycle cycle;
  std::vector<double> times;
  const double scale = unit == SpeedUnit::kMph ? kMphToMps : 1.0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw ConfigError(path + ": malformed row: " + line);
    times.push_back(std::stod(line.substr(0, comma)));
    const double v = std::stod(line.substr(comma + 1)) * scale;
    if (!(v >= 0.0)) throw ConfigError(path + ": negative speed");
    cycle.speeds.push_back(v);
  }
  if (times.size() >= 2) cycle.dt = times[1] - times[0];
  if (!(cycle.dt > 0.0)) throw ConfigError(path + ": non-increasing time column");
  return cycle;
}

/// Splits a cycle into maximal runs of samples above zero_eps. Runs shorter
/// than 3 samples are treated as sensor creep and discarded.
inline std::vector<StopSegment> split_segments(const DriveCycle& cycle, double zero_eps = 0.1) {
  std::vector<StopSegment> segments;
  std::vector<double> run;
  auto flush = [&] {
    if (run.size() >= 3) {
      StopSegment seg;
      seg.distance = cycle.dt * std::accumulate(run.begin(), run.end(), 0.0);
      seg.speeds = std::move(run);
      segments.push_back(std::move(seg));
    }
    run.clear();
  };
  for (double v : cycle.speeds) {
    if (v > zero_eps) {
      run.push_back(v);
    } else {
      flush();
    }
  }
  flush();
  return segments;
}

/// Synthesizes the typical-traffic profile for a (distance, average speed)
/// pair: pick segments near the distance, normalize each in time and speed,
/// average, and rescale so the result covers exactly X at mean v_avg.
///
/// The distance band starts at +/-20% and widens to 30% then 50% before
/// giving up; long targets can exceed every segment in an urban cycle.
inline SpeedProfile typical_profile(const std::vector<StopSegment>& segments, double X,
                                    double v_avg, int n_samples, double dt = 1.0) {
  if (!(X > 0.0) || !(v_avg > 0.0) || !(dt > 0.0)) {
    throw ConfigError("typical_profile: X, v_avg, dt must be > 0");
  }
  if (n_samples < 2) throw ConfigError("typical_profile: need at least 2 samples");

  const double bands[] = {0.2, 0.3, 0.5};
  std::vector<const StopSegment*> selected;
  for (double band : bands) {
    selected.clear();
    for (const auto& seg : segments) {
      if (std::abs(seg.distance - X) <= band * X) selected.push_back(&seg);
    }
    if (!selected.empty()) break;
  }
  if (selected.empty()) {
    char msg[160];
    std::snprintf(msg, sizeof(msg),
                  "no drive-cycle segments within +/-50%% of X=%.0f m "
                  "(widest band tried: 50%%)", X);
    throw DataError(msg);
  }

  // Resample each pick onto normalized time [0, 1] and scale it to unit
  // mean speed, then average pointwise. The resampled span includes the
  // rest samples bracketing the run, so the typical maneuver launches from
  // and returns to a stop and its launch energy is accounted like any
  // other profile's.
  std::vector<double> acc(n_samples, 0.0);
  for (const StopSegment* seg : selected) {
    std::vector<double> run;
    run.reserve(seg->speeds.size() + 2);
    run.push_back(0.0);
    run.insert(run.end(), seg->speeds.begin(), seg->speeds.end());
    run.push_back(0.0);
    const std::size_t m = run.size();
    const double mean =
        std::accumulate(run.begin(), run.end(), 0.0) / static_cast<double>(m);
    for (int i = 0; i < n_samples; ++i) {
      const double u = static_cast<double>(i) / (n_samples - 1) * static_cast<double>(m - 1);
      const std::size_t k = std::min(static_cast<std::size_t>(u), m - 2);
      const double frac = u - static_cast<double>(k);
      const double v = run[k] * (1.0 - frac) + run[k + 1] * frac;
      acc[i] += v / mean;
    }
  }
  double shape_mean = 0.0;
  for (double& a : acc) {
    a /= static_cast<double>(selected.size());
    shape_mean += a;
  }
  shape_mean /= n_samples;

  // Rescale so the rectangle-rule distance is exactly X.
  const double target_mean = X / (n_samples * dt);
  SpeedProfile profile;
  profile.dt = dt;
  profile.speeds.resize(n_samples);
  for (int i = 0; i < n_samples; ++i) {
    profile.speeds[i] = acc[i] * target_mean / shape_mean;
  }
  return profile;
}

}  // namespace ecotraj

#endif  // ECOTRAJ_DRIVE_CYCLE_HPP_
