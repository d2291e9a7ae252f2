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
#pragma once

#include <functional>
#include <vector>

#include "uacoll/core/rng.hpp"
#include "uacoll/ensemble/ensemble.hpp"
#include "uacoll/env/perturb.hpp"
#include "uacoll/env/trace.hpp"
#include "uacoll/env/world.hpp"
#include "uacoll/policy/mpc.hpp"

namespace uacoll::trainer {

/// What the agent saw and did at one step.
struct RecordedStep {
  env::Observation observation;
  double commanded_heading = 0.0;
  int action_index = 0;
};

/// One rollout. label is 1 iff the episode ended in a collision; timeouts and
/// goal arrivals are both 0.
struct EpisodeRecord {
  std::vector<RecordedStep> steps;
  int label = 0;
  bool reached_goal = false;
  env::EpisodeTrace trace;
};

/// Everything the MPC needs besides the ensemble.
struct AgentPolicy {
  std::vector<policy::MotionPrimitive> primitives = policy::primitive_set();
  policy::CostWeights weights;
  int history_length = 8;
};

/// lambda_v for the k-th step of this episode.
using LambdaFn = std::function<double(int)>;

inline LambdaFn constant_lambda(double value) {
  return [value](int) { return value; };
}

/// Rolls select_action -> step until the episode ends. Observations pass
/// through `perturbation` before the agent sees them; the world itself is
/// never perturbed. Per-step dropout seeds come from substream ("step", t)
/// of `seed`; perturbation noise from substream "perturb".
inline EpisodeRecord run_episode(env::World& world, const env::Observation& first_observation, const Ensemble& ensemble,
                                 const AgentPolicy& agent_policy, const LambdaFn& lambda_v,
                                 const env::Perturbation& perturbation, std::uint64_t seed, int threads = 1) {
  EpisodeRecord rec;
  Rng perturb_rng = make_rng(seed, "perturb");
  policy::FeatureHistory history(agent_policy.history_length);
  env::Observation seen = env::perturb_observation(first_observation, perturbation, perturb_rng);
  const double dt = world.config.dt;
  for (int t = 0; !world.done; ++t) {
    const double lv = lambda_v(t);
    const auto choice = policy::select_action(ensemble, history, seen, world.agent, agent_policy.primitives, dt,
                                              agent_policy.weights, lv,
                                              substream_seed(seed, "step", static_cast<std::uint64_t>(t)), threads);
    const auto& prim = agent_policy.primitives[static_cast<std::size_t>(choice.index)];
    const double heading = policy::primitive_heading(prim, world.agent.heading);

    env::TraceRow row;
    row.step = t;
    row.time = world.time;
    row.agent_x = world.agent.position.x();
    row.agent_y = world.agent.position.y();
    row.agent_heading = world.agent.heading;
    row.obstacle_x = world.obstacle.position.x();
    row.obstacle_y = world.obstacle.position.y();
    row.action = choice.index;
    row.lambda_v = lv;
    for (std::size_t k = 0; k < choice.distributions.size(); ++k) {
      row.mean.push_back(choice.distributions[k].mean);
      row.variance.push_back(choice.distributions[k].variance);
      row.cost.push_back(choice.costs[k]);
    }

    rec.steps.push_back({seen, heading, choice.index});
    history.push(policy::encode_step(seen, heading));

    const auto result = env::step(world, policy::primitive_velocity(prim, world.agent.heading));
    row.collided = result.collided;
    row.reached_goal = result.reached_goal;
    rec.trace.rows.push_back(std::move(row));
    if (result.collided) rec.label = 1;
    rec.reached_goal = result.reached_goal;
    seen = env::perturb_observation(result.observation, perturbation, perturb_rng);
  }
  return rec;
}

/// One training example per step: the last min(l, t+1) (observation, action)
/// rows ending at step t, labelled with the episode outcome.
inline std::vector<nn::SequenceExample> windows_from_episode(const EpisodeRecord& rec, int history_length) {
  std::vector<nn::SequenceExample> out;
  out.reserve(rec.steps.size());
  for (std::size_t t = 0; t < rec.steps.size(); ++t) {
    const std::size_t len = std::min<std::size_t>(static_cast<std::size_t>(history_length), t + 1);
    nn::SequenceExample ex;
    ex.steps.resize(static_cast<Eigen::Index>(len), policy::kFeatureWidth);
    for (std::size_t k = 0; k < len; ++k) {
      const auto& s = rec.steps[t + 1 - len + k];
      ex.steps.row(static_cast<Eigen::Index>(k)) = policy::encode_step(s.observation, s.commanded_heading).transpose();
    }
    ex.valid_length = static_cast<int>(len);
    ex.label = static_cast<double>(rec.label);
    out.push_back(std::move(ex));
  }
  return out;
}

}  // namespace uacoll::trainer
