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

#include <string>

#include "uacoll/core/errors.hpp"

namespace uacoll::policy {

struct CostWeights {
  double lambda_c = 25.0;  // collision mean
  double lambda_g = 2.0;   // time to goal
  double lambda_v_start = -50000.0;
  double lambda_v_end = 200.0;  // also the value used for evaluation

  void validate() const {
    if (!(lambda_c > 0.0)) throw ConfigError("weights.lambda_c must be > 0");
    if (!(lambda_g > 0.0)) throw ConfigError("weights.lambda_g must be > 0");
  }
};

/// lambda_v * Var + lambda_c * E + lambda_g * t_goal. There is deliberately
/// no speed argument: the variance term is not scaled by velocity.
inline double joint_cost(double mean, double variance, double t_goal, const CostWeights& w, double lambda_v) {
  return lambda_v * variance + w.lambda_c * mean + w.lambda_g * t_goal;
}

/// Linear ramp from lambda_v_start at step 0 to lambda_v_end at total_steps,
/// held at lambda_v_end afterwards.
inline double lambda_v_schedule(long step, long total_steps, const CostWeights& w = {}) {
  if (total_steps <= 0) throw ConfigError("lambda_v schedule needs total_steps > 0");
  if (step < 0) throw ConfigError("lambda_v schedule step must be >= 0");
  if (step >= total_steps) return w.lambda_v_end;
  const double frac = static_cast<double>(step) / static_cast<double>(total_steps);
  return w.lambda_v_start + (w.lambda_v_end - w.lambda_v_start) * frac;
}

struct WeightCheck {
  bool ok = true;
  std::string message;
};

/// Soft-constraint check: a certain collision (cost lambda_c) should always
/// outweigh the goal term. Warns when lambda_g * max_t_goal >= lambda_c.
inline WeightCheck validate_weights(const CostWeights& w, double max_expected_t_goal) {
  const double goal_cost = w.lambda_g * max_expected_t_goal;
  if (goal_cost >= w.lambda_c) {
    return {false, "goal cost " + std::to_string(goal_cost) + " can dominate the collision cost " +
                       std::to_string(w.lambda_c) + "; collision avoidance becomes a weak preference"};
  }
  return {};
}

}  // namespace uacoll::policy
