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

#include "ecotraj/transient_penalty.hpp"

#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "ecotraj/nlp.hpp"
#include "ecotraj/solver.hpp"
#include "gtest/gtest.h"

namespace ecotraj {
namespace {

const std::string kAssets = ECOTRAJ_TEST_ASSETS;

TEST(PenalizedEnergy, ZeroFractionIsIdentity) {
  const std::vector<double> battery = {100.0, 200.0, -50.0, 80.0};
  const std::vector<double> torque = {10.0, 50.0, -20.0, 60.0};
  const TransientPenalty p{0.0, 1.0, 1.0};
  EXPECT_DOUBLE_EQ(penalized_energy(battery, torque, 1.0, p),
                   std::accumulate(battery.begin(), battery.end(), 0.0));
}

TEST(PenalizedEnergy, ConstantTorqueAfterLaunchOnlyPenalizesLaunch) {
  // Torque rises once from rest and then stays flat: only the first window
  // is surcharged, at any penalty level.
  const std::vector<double> battery = {100.0, 100.0, 100.0, 100.0};
  const std::vector<double> torque = {40.0, 40.0, 40.0, 40.0};
  for (double frac : {0.10, 0.15, 0.30}) {
    const TransientPenalty p{frac, 1.0, 1.0};
    EXPECT_DOUBLE_EQ(penalized_energy(battery, torque, 1.0, p), 400.0 + frac * 100.0);
  }
}

TEST(PenalizedEnergy, TrulyConstantTorqueUnchanged) {
  // With no increase anywhere (flat torque below threshold from the start)
  // the total is untouched.
  const std::vector<double> battery = {100.0, 100.0, 100.0};
  const std::vector<double> torque = {0.5, 0.5, 0.5};
  const TransientPenalty p{0.30, 1.0, 1.0};
  EXPECT_DOUBLE_EQ(penalized_energy(battery, torque, 1.0, p), 300.0);
}

TEST(PenalizedEnergy, SingleIncreaseSurchargesOneWindow) {
  std::vector<double> battery(10, 0.0);
  std::vector<double> torque(10, 0.5);
  battery[5] = 100.0;
  torque[5] = 30.0;  // jump above threshold at n = 5
  torque[6] = 30.0;
  torque[7] = 30.0;
  const TransientPenalty p{0.15, 1.0, 1.0};
  // window = 1 s at dt = 1 s: only sample 5 is covered -> 115 J there.
  EXPECT_DOUBLE_EQ(penalized_energy(battery, torque, 1.0, p), 115.0);
}

TEST(PenalizedEnergy, OverlappingWindowsDoNotStack) {
  // Increases at consecutive samples with a 2 s window overlap on sample 2;
  // it must be charged once.
  const std::vector<double> battery = {100.0, 100.0, 100.0, 100.0};
  const std::vector<double> torque = {10.0, 20.0, 30.0, 30.0};
  const TransientPenalty p{0.5, 2.0, 1.0};
  // All four samples lie in some window: 400 * 1.5 = 600.
  EXPECT_DOUBLE_EQ(penalized_energy(battery, torque, 1.0, p), 600.0);
}

TEST(PenalizedEnergy, RegenerativeSamplesNeverPenalized) {
  const std::vector<double> battery = {-100.0, -100.0};
  const std::vector<double> torque = {50.0, 100.0};
  const TransientPenalty p{0.30, 1.0, 1.0};
  EXPECT_DOUBLE_EQ(penalized_energy(battery, torque, 1.0, p), -200.0);
}

TEST(PenalizedEnergy, WindowSpansMultipleSamplesAtFinerSampling) {
  std::vector<double> battery(8, 50.0);
  std::vector<double> torque(8, 0.0);
  torque[2] = 40.0;
  torque[3] = 40.0;
  torque[4] = 40.0;
  const TransientPenalty p{0.2, 1.0, 1.0};
  // dt = 0.5 s: the 1 s window covers samples 2 and 3.
  EXPECT_DOUBLE_EQ(penalized_energy(battery, torque, 0.5, p), 8 * 50.0 + 0.2 * 100.0);
}

TEST(PenalizedEnergy, MonotoneInPenaltyFraction) {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> e(-500.0, 800.0);
  std::uniform_real_distribution<double> t(0.0, 120.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> battery(30), torque(30);
    for (auto& x : battery) x = e(rng);
    for (auto& x : torque) x = t(rng);
    double prev = -1e300;
    for (double frac : {0.0, 0.1, 0.15, 0.3}) {
      const double total = penalized_energy(battery, torque, 1.0, {frac, 1.0, 1.0});
      EXPECT_GE(total, prev - 1e-9);
      prev = total;
    }
  }
}

TEST(PenalizedEnergy, MismatchedInputsThrow) {
  EXPECT_THROW(penalized_energy({1.0, 2.0}, {1.0}, 1.0, {0.1, 1.0, 1.0}), ConfigError);
  EXPECT_THROW(penalized_energy({1.0}, {1.0}, 1.0, {-0.1, 1.0, 1.0}), ConfigError);
}

TEST(ObjectiveWithPenalty, ExactRuleAppliedOnTop) {
  NlpProblem problem{SegmentSpec{120.0, 6.0, 20.0, 1.0}, vehicle_by_id("type1"),
                     EnvironmentParams{}, load_map("type2", kAssets)};
  problem.penalty = TransientPenalty{0.15, 1.0, 1.0};
  const std::vector<double> v = trapezoid_profile(20, 6.0, 2.3, 1.0, 20.0, 1.0);
  const auto b = evaluate_profile(SpeedProfile{1.0, v}, problem);
  const double expected =
      penalized_energy(b.battery_J, b.torque_Nm, 1.0, *problem.penalty);
  EXPECT_DOUBLE_EQ(objective(v, problem), expected);
  EXPECT_GE(expected, b.total_battery_J);
}

TEST(SmoothObjectiveWithPenalty, GradientMatchesFiniteDifferences) {
  NlpProblem problem{SegmentSpec{120.0, 6.0, 20.0, 1.0}, vehicle_by_id("type1"),
                     EnvironmentParams{}, load_map("type2", kAssets)};
  problem.penalty = TransientPenalty{0.15, 1.0, 1.0};
  problem.branch_blend_kappa = 1.0;
  std::vector<double> v = trapezoid_profile(20, 6.0, 2.3, 1.0, 20.0, 1.0);
  std::mt19937 rng(8);
  std::uniform_real_distribution<double> wobble(-0.5, 0.5);
  for (std::size_t i = 1; i < v.size(); ++i) {
    v[i] = std::clamp(v[i] + wobble(rng), 0.5, 20.0);
  }

  std::vector<double> grad;
  const double f0 = smooth_objective(v, problem, &grad);
  EXPECT_GT(f0, 0.0);
  const double h = 1e-5;
  for (std::size_t i = 0; i < v.size(); i += 2) {
    std::vector<double> vp = v, vm = v;
    vp[i] += h;
    vm[i] -= h;
    const double fd =
        (smooth_objective(vp, problem, nullptr) - smooth_objective(vm, problem, nullptr)) /
        (2.0 * h);
    const double scale = std::max({1.0, std::abs(fd), std::abs(grad[i])});
    EXPECT_LT(std::abs(grad[i] - fd) / scale, 2e-4) << "coordinate " << i;
  }
}

}  // namespace
}  // namespace ecotraj
