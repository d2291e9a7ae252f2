// Copyright 2026 The uacoll Authors
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
#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "uacoll/policy/mpc.hpp"

namespace uacoll::policy {
namespace {

constexpr double kPi = std::numbers::pi;

TEST(Primitives, ElevenEvenlySpacedWithZeroInMiddle) {
  const auto p = primitive_set();
  ASSERT_EQ(p.size(), 11u);
  EXPECT_EQ(p[5].heading_offset, 0.0);
  EXPECT_NEAR(p.front().heading_offset, -kPi / 6.0, 1e-15);
  EXPECT_NEAR(p.back().heading_offset, kPi / 6.0, 1e-15);
  for (std::size_t i = 1; i < p.size(); ++i)
    EXPECT_NEAR(p[i].heading_offset - p[i - 1].heading_offset, (kPi / 3.0) / 10.0, 1e-12);
}

TEST(TimeToGoal, EndpointAtGoalIsZero) { EXPECT_EQ(time_to_goal(env::Vec2(3, 4), env::Vec2(3, 4), 1.0), 0.0); }

TEST(TimeToGoal, TwoMetresAtUnitSpeed) { EXPECT_NEAR(time_to_goal(env::Vec2(0, 0), env::Vec2(0, 2), 1.0), 2.0, 1e-15); }

TEST(TimeToGoal, StraightAheadMinimisedByZeroOffset) {
  const auto prims = primitive_set();
  env::AgentState a;
  a.goal = env::Vec2(6, 0);
  for (double dt : {0.1, 0.25, 1.0}) {
    std::vector<double> t;
    for (const auto& p : prims) t.push_back(time_to_goal(p, a, dt));
    EXPECT_EQ(std::min_element(t.begin(), t.end()) - t.begin(), 5);
    for (int i = 0; i < 5; ++i) EXPECT_NEAR(t[i], t[10 - i], 1e-12);  // mirror symmetry
  }
}

TEST(JointCost, Arithmetic) {
  const CostWeights w;
  EXPECT_EQ(joint_cost(0, 0, 0, w, 200), 0.0);
  EXPECT_NEAR(joint_cost(0.5, 0.01, 4.0, w, 200.0), 22.5, 1e-12);
  EXPECT_LT(joint_cost(0.3, 0.02, 1.0, w, -50000.0), joint_cost(0.3, 0.01, 1.0, w, -50000.0));
}

TEST(Schedule, EndpointsAndMidpoint) {
  EXPECT_EQ(lambda_v_schedule(0, 1000), -50000.0);
  EXPECT_EQ(lambda_v_schedule(1000, 1000), 200.0);
  EXPECT_EQ(lambda_v_schedule(5000, 1000), 200.0);
  EXPECT_NEAR(lambda_v_schedule(500, 1000), -24900.0, 1e-9);
  EXPECT_THROW(lambda_v_schedule(0, 0), ConfigError);
  EXPECT_THROW(lambda_v_schedule(-1, 10), ConfigError);
}

TEST(ValidateWeights, GoalVersusCollisionInequality) {
  CostWeights w;
  EXPECT_TRUE(validate_weights(w, 10.0).ok);
  const auto bad = validate_weights(w, 20.0);
  EXPECT_FALSE(bad.ok);
  EXPECT_FALSE(bad.message.empty());
  EXPECT_TRUE(validate_weights(w, 12.0).ok);
  EXPECT_FALSE(validate_weights(w, 12.5).ok);  // equality warns
  w.lambda_g = 0.0;
  EXPECT_TRUE(validate_weights(w, 1e9).ok);
}

std::vector<PredictionDistribution> random_dists(Rng& rng, int k = 11) {
  std::vector<PredictionDistribution> d(static_cast<std::size_t>(k));
  for (auto& x : d) {
    x.mean = uniform01(rng);
    x.variance = uniform01(rng) * 0.05;
  }
  return d;
}

// Exhaustive oracle: recompute every cost from scratch and scan.
int brute_force(const std::vector<PredictionDistribution>& d, const env::AgentState& a, double dt, const CostWeights& w,
                double lv) {
  const auto prims = primitive_set(a.preferred_speed);
  int best = -1;
  double best_cost = 0.0;
  for (int i = 0; i < 11; ++i) {
    const double h = a.heading + prims[i].heading_offset;
    const env::Vec2 end = a.position + a.preferred_speed * dt * env::Vec2(std::cos(h), std::sin(h));
    const double c = lv * d[i].variance + w.lambda_c * d[i].mean + w.lambda_g * (a.goal - end).norm() / a.preferred_speed;
    const bool better = best < 0 || c < best_cost ||
                        (c == best_cost && std::abs(prims[i].heading_offset) < std::abs(prims[best].heading_offset));
    if (better) {
      best = i;
      best_cost = c;
    }
  }
  return best;
}

TEST(ChooseAction, MatchesBruteForce) {
  Rng rng(1);
  const auto prims = primitive_set();
  for (int trial = 0; trial < 300; ++trial) {
    env::AgentState a;
    a.position = env::Vec2(uniform(rng, -3, 3), uniform(rng, -3, 3));
    a.heading = uniform(rng, -kPi, kPi);
    a.goal = env::Vec2(uniform(rng, -6, 6), uniform(rng, -6, 6));
    const double lv = uniform(rng, -50000, 200);
    const auto d = random_dists(rng);
    EXPECT_EQ(choose_action(d, prims, a, 0.25, CostWeights{}, lv).index, brute_force(d, a, 0.25, CostWeights{}, lv));
  }
}

TEST(ChooseAction, IdenticalDistributionsPickGoalMinimiser) {
  Rng rng(2);
  const auto prims = primitive_set();
  for (int trial = 0; trial < 50; ++trial) {
    env::AgentState a;
    a.heading = uniform(rng, -kPi, kPi);
    a.goal = 6.0 * env::unit_from_angle(uniform(rng, -kPi, kPi));
    std::vector<PredictionDistribution> d(11);
    for (auto& x : d) {
      x.mean = 0.4;
      x.variance = 0.01;
    }
    const auto c = choose_action(d, prims, a, 0.1, CostWeights{}, 200.0);
    EXPECT_EQ(c.index, std::min_element(c.t_goal.begin(), c.t_goal.end()) - c.t_goal.begin());
  }
}

TEST(ChooseAction, TiesGoToSmallerOffsetThenLowerIndex) {
  const auto prims = primitive_set();
  std::vector<double> costs(11, 1.0);
  EXPECT_EQ(argmin_cost(costs, prims), 5);
  costs[5] = 2.0;
  EXPECT_EQ(argmin_cost(costs, prims), 4);  // 4 and 6 tie on |offset|
  costs[4] = 2.0;
  EXPECT_EQ(argmin_cost(costs, prims), 6);
}

TEST(ChooseAction, PositiveWeightScalingKeepsArgmin) {
  Rng rng(3);
  const auto prims = primitive_set();
  for (int trial = 0; trial < 200; ++trial) {
    env::AgentState a;
    a.goal = env::Vec2(uniform(rng, 1, 6), uniform(rng, -3, 3));
    const auto d = random_dists(rng);
    const double lv = uniform(rng, -100, 200);
    const double k = std::pow(2.0, uniform_index(rng, 8));  // exact in binary floating point
    CostWeights w, ws;
    ws.lambda_c = w.lambda_c * k;
    ws.lambda_g = w.lambda_g * k;
    EXPECT_EQ(choose_action(d, prims, a, 0.25, w, lv).index, choose_action(d, prims, a, 0.25, ws, lv * k).index);
  }
}

TEST(Features, EncodingLayout) {
  env::Observation o;
  o.obstacle_position = env::Vec2(2.0, -4.0);
  o.obstacle_velocity = env::Vec2(0.5, -1.0);
  o.obstacle_radius = 0.25;
  o.relative_goal = env::Vec2(6.0, 3.0);
  o.velocity_valid = false;
  const auto v = encode_step(o, kPi / 2.0);
  ASSERT_EQ(v.size(), kFeatureWidth);
  const double expected[] = {0.5, -1.0, 0.5, -1.0, 0.5, 1.0, 0.5, 1.0, 0.0, 1.0, 0.0, 1.0};
  for (int i = 0; i < kFeatureWidth; ++i) EXPECT_NEAR(v(i), expected[i], 1e-15) << i;
}

TEST(Features, HistoryKeepsLastLMinusOneRows) {
  FeatureHistory h(8);
  for (int i = 0; i < 12; ++i) {
    nn::Vector r = nn::Vector::Constant(kFeatureWidth, i);
    h.push(r);
  }
  const auto p = h.prefix();
  ASSERT_EQ(p.rows(), 7);
  EXPECT_EQ(p(0, 0), 5.0);
  EXPECT_EQ(p(6, 0), 11.0);
  FeatureHistory one(1);
  one.push(nn::Vector::Zero(kFeatureWidth));
  EXPECT_EQ(one.prefix().rows(), 0);
}

TEST(SelectAction, UsesEnsembleDistributionsAndBruteForceChoice) {
  const auto e = make_ensemble({5, 20, 0.7}, {kFeatureWidth, 16, {}, nn::Activation::kTanh}, 3);
  FeatureHistory h(8);
  env::Observation o;
  o.obstacle_position = env::Vec2(2.0, 0.5);
  o.relative_goal = env::Vec2(6, 0);
  env::AgentState a;
  a.goal = env::Vec2(6, 0);
  for (int i = 0; i < 3; ++i) h.push(encode_step(o, 0.0));
  const auto prims = primitive_set();
  const auto c = select_action(e, h, o, a, prims, 0.25, CostWeights{}, 200.0, 42);
  ASSERT_EQ(c.distributions.size(), 11u);
  for (const auto& d : c.distributions) EXPECT_EQ(d.samples.size(), 100u);
  EXPECT_EQ(c.index, brute_force(c.distributions, a, 0.25, CostWeights{}, 200.0));
  EXPECT_EQ(select_action(e, h, o, a, prims, 0.25, CostWeights{}, 200.0, 42, 4).costs, c.costs);
}

}  // namespace
}  // namespace uacoll::policy
