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

#include "ecotraj/drive_cycle.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "gtest/gtest.h"

namespace ecotraj {
namespace {

const std::string kCyclePath = std::string(ECOTRAJ_TEST_ASSETS) + "/cycles/ftp75.csv";

DriveCycle make_cycle(std::vector<double> speeds, double dt = 1.0) {
  return DriveCycle{dt, std::move(speeds)};
}

TEST(SplitSegments, AllZeroYieldsNothing) {
  EXPECT_TRUE(split_segments(make_cycle(std::vector<double>(50, 0.0))).empty());
  EXPECT_TRUE(split_segments(make_cycle({})).empty());
}

TEST(SplitSegments, ShortRunsDiscarded) {
  const auto segs = split_segments(make_cycle({0, 2, 4, 2, 0, 0, 3, 0}));
  ASSERT_EQ(segs.size(), 1u);
  EXPECT_EQ(segs[0].speeds, (std::vector<double>{2, 4, 2}));
  EXPECT_DOUBLE_EQ(segs[0].distance, 8.0);
}

TEST(SplitSegments, ThresholdIsExclusive) {
  const auto segs = split_segments(make_cycle({0.0, 0.1, 0.2, 0.3, 0.2, 0.05}), 0.1);
  ASSERT_EQ(segs.size(), 1u);
  EXPECT_EQ(segs[0].speeds.size(), 3u);  // 0.2, 0.3, 0.2
}

TEST(SplitSegments, ReassemblyRecoversSegments) {
  std::mt19937 rng(99);
  std::uniform_real_distribution<double> speed(0.5, 20.0);
  std::uniform_int_distribution<int> len(3, 12), gap(1, 4);
  std::vector<std::vector<double>> original;
  std::vector<double> stream;
  for (int s = 0; s < 12; ++s) {
    for (int g = gap(rng); g-- > 0;) stream.push_back(0.0);
    std::vector<double> seg(len(rng));
    for (double& v : seg) v = speed(rng);
    original.push_back(seg);
    stream.insert(stream.end(), seg.begin(), seg.end());
  }
  stream.push_back(0.0);
  const auto segs = split_segments(make_cycle(stream));
  ASSERT_EQ(segs.size(), original.size());
  std::multimap<std::size_t, std::vector<double>> by_len;
  for (const auto& o : original) by_len.emplace(o.size(), o);
  for (const auto& s : segs) {
    auto range = by_len.equal_range(s.speeds.size());
    bool found = false;
    for (auto it = range.first; it != range.second; ++it) {
      if (it->second == s.speeds) {
        by_len.erase(it);
        found = true;
        break;
      }
    }
    EXPECT_TRUE(found);
  }
}

TEST(LoadDriveCycle, ShippedCycleParsesAndSegments) {
  const DriveCycle cycle = load_drive_cycle_csv(kCyclePath, SpeedUnit::kMph);
  EXPECT_DOUBLE_EQ(cycle.dt, 1.0);
  EXPECT_EQ(cycle.speeds.size(), 1875u);
  EXPECT_DOUBLE_EQ(cycle.speeds.front(), 0.0);
  const double vmax = *std::max_element(cycle.speeds.begin(), cycle.speeds.end());
  EXPECT_GT(vmax, 20.0);  // mph source converted to m/s
  EXPECT_LT(vmax, 30.0);

  const auto segs = split_segments(cycle);
  EXPECT_GE(segs.size(), 15u);
  for (const auto& s : segs) {
    EXPECT_GE(s.speeds.size(), 3u);
    EXPECT_GT(s.distance, 0.0);
    for (double v : s.speeds) EXPECT_GT(v, 0.1);
  }
}

TEST(LoadDriveCycle, MissingFileThrows) {
  EXPECT_THROW(load_drive_cycle_csv("/nonexistent.csv", SpeedUnit::kMph), ConfigError);
}

TEST(SpeedUnitParsing, Strings) {
  EXPECT_EQ(speed_unit_from_string("mph"), SpeedUnit::kMph);
  EXPECT_EQ(speed_unit_from_string("m_s"), SpeedUnit::kMps);
  EXPECT_THROW(speed_unit_from_string("knots"), ConfigError);
}

StopSegment triangle_segment(int n, double peak) {
  StopSegment seg;
  for (int i = 0; i < n; ++i) {
    const double u = static_cast<double>(i) / (n - 1);
    seg.speeds.push_back(peak * (1.0 - std::abs(2.0 * u - 1.0)) + 0.2);
  }
  seg.distance = std::accumulate(seg.speeds.begin(), seg.speeds.end(), 0.0);
  return seg;
}

TEST(TypicalProfile, SingleSegmentIsRescaledShape) {
  const StopSegment tri = triangle_segment(41, 12.0);
  const double X = tri.distance;
  const int n = 43;
  const SpeedProfile p = typical_profile({tri}, X, X / n, n, 1.0);
  EXPECT_NEAR(profile_distance(p), X, 1e-9 * X);
  // Launches from rest, returns to rest, keeps the unimodal shape.
  EXPECT_DOUBLE_EQ(p.speeds.front(), 0.0);
  EXPECT_DOUBLE_EQ(p.speeds.back(), 0.0);
  const auto peak = std::max_element(p.speeds.begin(), p.speeds.end());
  const std::size_t peak_idx = static_cast<std::size_t>(peak - p.speeds.begin());
  EXPECT_NEAR(static_cast<double>(peak_idx), n / 2.0, 2.0);
  for (std::size_t i = 1; i <= peak_idx; ++i) EXPECT_GE(p.speeds[i], p.speeds[i - 1] - 1e-12);
  for (std::size_t i = peak_idx + 1; i < p.speeds.size(); ++i) {
    EXPECT_LE(p.speeds[i], p.speeds[i - 1] + 1e-12);
  }
}

TEST(TypicalProfile, DuplicateSegmentsAreIdempotent) {
  const StopSegment tri = triangle_segment(41, 12.0);
  const double X = tri.distance;
  const SpeedProfile once = typical_profile({tri}, X, 7.0, 50, 1.0);
  const SpeedProfile twice = typical_profile({tri, tri}, X, 7.0, 50, 1.0);
  ASSERT_EQ(once.speeds.size(), twice.speeds.size());
  for (std::size_t i = 0; i < once.speeds.size(); ++i) {
    EXPECT_NEAR(once.speeds[i], twice.speeds[i], 1e-12);
  }
}

TEST(TypicalProfile, ShippedCycleMeetsDistanceAndDuration) {
  const DriveCycle cycle = load_drive_cycle_csv(kCyclePath, SpeedUnit::kMph);
  const auto segs = split_segments(cycle);
  const SpeedProfile p = typical_profile(segs, 350.0, 7.0, 50, 1.0);
  EXPECT_EQ(p.speeds.size(), 50u);  // t_f = X / v_avg = 50 s
  EXPECT_NEAR(profile_distance(p), 350.0, 1e-6);
  const double mean = profile_distance(p) / (50 * p.dt);
  EXPECT_NEAR(mean, 7.0, 1e-9 * 7.0);
}

TEST(TypicalProfile, UniformSpeedScalingIsAbsorbed) {
  // Scaling the source speeds leaves the output unchanged while the
  // selection set stays fixed (single segment, X within the band).
  const StopSegment tri = triangle_segment(41, 12.0);
  const double X = tri.distance;
  const SpeedProfile ref = typical_profile({tri}, X, 7.0, 50, 1.0);
  for (double c : {0.9, 1.1}) {
    StopSegment scaled = tri;
    for (double& v : scaled.speeds) v *= c;
    scaled.distance = tri.distance * c;
    const SpeedProfile p = typical_profile({scaled}, X, 7.0, 50, 1.0);
    for (std::size_t i = 0; i < ref.speeds.size(); ++i) {
      EXPECT_NEAR(p.speeds[i], ref.speeds[i], 1e-9);
    }
  }
}

TEST(TypicalProfile, WideningLadder) {
  const StopSegment tri = triangle_segment(41, 12.0);  // distance ~ 250 m
  // 40% away: rejected at 20% and 30%, accepted at 50%.
  const double X = tri.distance / 1.4;
  const SpeedProfile p = typical_profile({tri}, X, 5.0, 40, 1.0);
  EXPECT_NEAR(profile_distance(p), X, 1e-6);
  // 2x away: the ladder is exhausted.
  try {
    typical_profile({tri}, tri.distance * 2.1, 5.0, 40, 1.0);
    FAIL() << "expected DataError";
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("50%"), std::string::npos);
  }
}

TEST(TypicalProfile, RejectsBadArguments) {
  const StopSegment tri = triangle_segment(41, 12.0);
  EXPECT_THROW(typical_profile({tri}, tri.distance, 7.0, 1, 1.0), ConfigError);
  EXPECT_THROW(typical_profile({tri}, -5.0, 7.0, 50, 1.0), ConfigError);
}

}  // namespace
}  // namespace ecotraj
