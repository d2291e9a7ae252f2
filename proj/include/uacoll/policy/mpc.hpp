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

#include <cmath>
#include <vector>

#include "uacoll/ensemble/ensemble.hpp"
#include "uacoll/env/types.hpp"
#include "uacoll/policy/cost.hpp"
#include "uacoll/policy/features.hpp"
#include "uacoll/policy/primitives.hpp"

namespace uacoll::policy {

struct ActionChoice {
  int index = 0;
  std::vector<PredictionDistribution> distributions;
  std::vector<double> t_goal;
  std::vector<double> costs;
};

/// Index of the lowest cost; ties go to the smaller |heading offset|, then to
/// the lower index.
inline int argmin_cost(const std::vector<double>& costs, const std::vector<MotionPrimitive>& prims) {
  int best = 0;
  for (int i = 1; i < static_cast<int>(costs.size()); ++i) {
    const auto ui = static_cast<std::size_t>(i);
    const auto ub = static_cast<std::size_t>(best);
    if (costs[ui] < costs[ub] ||
        (costs[ui] == costs[ub] && std::abs(prims[ui].heading_offset) < std::abs(prims[ub].heading_offset)))
      best = i;
  }
  return best;
}

/// Scores every primitive from given distributions and picks the cheapest.
inline ActionChoice choose_action(std::vector<PredictionDistribution> dists, const std::vector<MotionPrimitive>& prims,
                                  const env::AgentState& agent, double dt, const CostWeights& w, double lambda_v) {
  ActionChoice c;
  c.distributions = std::move(dists);
  for (std::size_t i = 0; i < prims.size(); ++i) {
    const double tg = time_to_goal(prims[i], agent, dt);
    c.t_goal.push_back(tg);
    c.costs.push_back(joint_cost(c.distributions[i].mean, c.distributions[i].variance, tg, w, lambda_v));
  }
  c.index = argmin_cost(c.costs, prims);
  return c;
}

/// Candidate final-timestep rows: the current observation paired with each
/// primitive's commanded heading.
inline nn::Matrix candidate_rows(const env::Observation& obs, const env::AgentState& agent,
                                 const std::vector<MotionPrimitive>& prims) {
  nn::Matrix rows(static_cast<Eigen::Index>(prims.size()), kFeatureWidth);
  for (std::size_t i = 0; i < prims.size(); ++i)
    rows.row(static_cast<Eigen::Index>(i)) = encode_step(obs, primitive_heading(prims[i], agent.heading)).transpose();
  return rows;
}

/// One MPC step: evaluates all primitives with the ensemble and returns the
/// minimal joint-cost choice together with every distribution.
inline ActionChoice select_action(const Ensemble& ensemble, const FeatureHistory& history, const env::Observation& obs,
                                  const env::AgentState& agent, const std::vector<MotionPrimitive>& prims, double dt,
                                  const CostWeights& w, double lambda_v, std::uint64_t step_seed, int threads = 1) {
  auto dists = predict_distributions(ensemble, history.prefix(), candidate_rows(obs, agent, prims), step_seed, threads);
  return choose_action(std::move(dists), prims, agent, dt, w, lambda_v);
}

}  // namespace uacoll::policy
