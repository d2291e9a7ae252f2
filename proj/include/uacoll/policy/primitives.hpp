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
#include <numbers>
#include <vector>

#include "uacoll/core/errors.hpp"
#include "uacoll/env/types.hpp"

namespace uacoll::policy {

inline constexpr int kPrimitiveCount = 11;
inline constexpr double kMaxHeadingOffset = std::numbers::pi / 6.0;

/// Heading change relative to the agent's current heading, held for
/// `horizon_steps` steps at `speed`.
struct MotionPrimitive {
  double heading_offset = 0.0;  // rad
  int horizon_steps = 1;
  double speed = 1.0;           // m/s
};

/// 11 headings evenly spaced over [-pi/6, pi/6], endpoints included,
/// ordered by angle.
inline std::vector<MotionPrimitive> primitive_set(double speed = 1.0, int horizon_steps = 1) {
  std::vector<MotionPrimitive> set;
  set.reserve(kPrimitiveCount);
  for (int i = 0; i < kPrimitiveCount; ++i) {
    const double offset = i == (kPrimitiveCount - 1) / 2
                              ? 0.0
                              : -kMaxHeadingOffset + 2.0 * kMaxHeadingOffset * i / (kPrimitiveCount - 1);
    set.push_back({offset, horizon_steps, speed});
  }
  return set;
}

inline double primitive_heading(const MotionPrimitive& p, double current_heading) {
  return env::wrap_angle(current_heading + p.heading_offset);
}

inline env::Vec2 primitive_velocity(const MotionPrimitive& p, double current_heading) {
  return p.speed * env::unit_from_angle(primitive_heading(p, current_heading));
}

inline env::Vec2 primitive_endpoint(const MotionPrimitive& p, const env::Vec2& position, double current_heading,
                                    double dt) {
  return position + primitive_velocity(p, current_heading) * (dt * p.horizon_steps);
}

/// Straight-line distance from the primitive's endpoint to the goal divided
/// by the preferred speed.
inline double time_to_goal(const env::Vec2& endpoint, const env::Vec2& goal, double preferred_speed) {
  if (!(preferred_speed > 0.0)) throw ConfigError("time_to_goal needs a positive preferred speed");
  return (goal - endpoint).norm() / preferred_speed;
}

inline double time_to_goal(const MotionPrimitive& p, const env::AgentState& agent, double dt) {
  return time_to_goal(primitive_endpoint(p, agent.position, agent.heading, dt), agent.goal, agent.preferred_speed);
}

}  // namespace uacoll::policy
