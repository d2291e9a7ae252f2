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

#include <Eigen/Core>

#include <cmath>
#include <string>

#include "uacoll/core/errors.hpp"

namespace uacoll::env {

using Vec2 = Eigen::Vector2d;

inline Vec2 unit_from_angle(double angle) { return {std::cos(angle), std::sin(angle)}; }

inline double wrap_angle(double a) {
  return std::atan2(std::sin(a), std::cos(a));
}

struct AgentState {
  Vec2 position = Vec2::Zero();
  Vec2 velocity = Vec2::Zero();
  double heading = 0.0;  // rad, world frame
  double radius = 0.3;
  Vec2 goal = Vec2(6.0, 0.0);
  double preferred_speed = 1.0;
};

enum class ObstaclePolicy { kRvo, kNonCooperative, kStatic };

inline const char* to_string(ObstaclePolicy p) {
  switch (p) {
    case ObstaclePolicy::kRvo: return "rvo";
    case ObstaclePolicy::kNonCooperative: return "noncooperative";
    case ObstaclePolicy::kStatic: return "static";
  }
  return "?";
}

inline ObstaclePolicy obstacle_policy_from_string(const std::string& s) {
  if (s == "rvo") return ObstaclePolicy::kRvo;
  if (s == "noncooperative") return ObstaclePolicy::kNonCooperative;
  if (s == "static") return ObstaclePolicy::kStatic;
  throw ConfigError("unknown obstacle policy '" + s + "' (expected rvo, noncooperative or static)");
}

struct ObstacleState {
  Vec2 position = Vec2::Zero();
  Vec2 velocity = Vec2::Zero();
  double radius = 0.3;
  Vec2 goal = Vec2::Zero();
  double preferred_speed = 1.0;
  Vec2 travel_direction = Vec2(1.0, 0.0);  // fixed at spawn, used by the non-cooperative policy
  ObstaclePolicy policy = ObstaclePolicy::kRvo;
};

/// What the agent sees at one step. Obstacle position is relative to the
/// agent; velocity is the obstacle's world-frame velocity. Invalid fields are
/// zero and flagged.
struct Observation {
  Vec2 obstacle_position = Vec2::Zero();
  Vec2 obstacle_velocity = Vec2::Zero();
  double obstacle_radius = 0.0;
  Vec2 relative_goal = Vec2::Zero();
  bool position_valid = true;
  bool velocity_valid = true;
  bool frame_valid = true;

  bool operator==(const Observation&) const = default;
};

enum class PerturbationKind { kNone, kGaussianNoise, kDrop, kMaskVelocity, kMaskPosition };

struct Perturbation {
  PerturbationKind kind = PerturbationKind::kNone;
  double sigma = 0.5;      // m and m/s
  double drop_prob = 0.2;

  void validate() const {
    if (!(sigma >= 0.0)) throw ConfigError("perturbation sigma must be >= 0");
    if (!(drop_prob >= 0.0 && drop_prob <= 1.0)) throw ConfigError("perturbation drop probability must lie in [0, 1]");
  }
};

/// Scenario names used in configs and reports.
inline const char* scenario_name(PerturbationKind k) {
  switch (k) {
    case PerturbationKind::kNone: return "none";
    case PerturbationKind::kGaussianNoise: return "noise";
    case PerturbationKind::kDrop: return "drop";
    case PerturbationKind::kMaskVelocity: return "mask_vel";
    case PerturbationKind::kMaskPosition: return "mask_pos";
  }
  return "?";
}

inline PerturbationKind perturbation_from_string(const std::string& s) {
  if (s == "none") return PerturbationKind::kNone;
  if (s == "noise") return PerturbationKind::kGaussianNoise;
  if (s == "drop") return PerturbationKind::kDrop;
  if (s == "mask_vel") return PerturbationKind::kMaskVelocity;
  if (s == "mask_pos") return PerturbationKind::kMaskPosition;
  throw ConfigError("unknown scenario '" + s + "' (expected none, noise, drop, mask_vel or mask_pos)");
}

}  // namespace uacoll::env
