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

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "uacoll/core/errors.hpp"
#include "uacoll/core/rng.hpp"
#include "uacoll/env/types.hpp"

namespace uacoll::env {

struct RvoParams {
  double horizon = 3.0;         // s
  double margin = 0.1;          // m added to the radius sum
  int candidates = 21;          // headings on an even grid
  double max_deviation = std::numbers::pi / 3.0;  // rad either side of the goal heading
};

enum class LayoutKind {
  kCrossing,  // obstacle on a random crossing or head-on course
  kFixed,     // obstacle placed at a configured point
};

struct ScenarioConfig {
  double dt = 0.25;
  int timeout_steps = 80;  // 20 s of simulated time
  double goal_threshold = 0.3;
  int substeps = 4;

  double agent_radius = 0.3;
  double agent_speed = 1.0;
  double goal_distance = 6.0;

  ObstaclePolicy obstacle_policy = ObstaclePolicy::kRvo;
  double obstacle_radius = 0.3;
  double obstacle_speed = 1.0;

  LayoutKind layout = LayoutKind::kCrossing;
  double spawn_angle = std::numbers::pi / 3.0;  // crossing: uniform in +-spawn_angle
  double spawn_distance_min = 3.0;
  double spawn_distance_max = 5.0;
  Vec2 fixed_obstacle_position = Vec2(2.0, 0.0);  // fixed layout
  Vec2 fixed_obstacle_goal = Vec2(2.0, 0.0);
  double fixed_jitter = 0.0;  // fixed layout: uniform +- jitter on each obstacle coordinate

  RvoParams rvo;

  void validate() const {
    if (!(dt > 0.0)) throw ConfigError("env.dt must be > 0");
    if (timeout_steps < 1) throw ConfigError("env.timeout_steps must be >= 1");
    if (substeps < 1) throw ConfigError("env.substeps must be >= 1");
    if (!(agent_radius > 0.0) || !(obstacle_radius > 0.0)) throw ConfigError("env radii must be > 0");
    if (!(agent_speed > 0.0)) throw ConfigError("env.agent_speed must be > 0");
    if (!(obstacle_speed >= 0.0)) throw ConfigError("env.obstacle_speed must be >= 0");
    if (!(goal_distance > 0.0)) throw ConfigError("env.goal_distance must be > 0");
    if (!(goal_threshold > 0.0)) throw ConfigError("env.goal_threshold must be > 0");
    if (spawn_distance_min > spawn_distance_max || spawn_distance_min <= 0.0)
      throw ConfigError("env spawn distance range is invalid");
    if (spawn_angle < 0.0 || spawn_angle >= std::numbers::pi / 2.0)
      throw ConfigError("env.spawn_angle_deg must lie in [0, 90)");
    if (fixed_jitter < 0.0) throw ConfigError("env.fixed_jitter must be >= 0");
    if (rvo.candidates < 1 || rvo.horizon <= 0.0) throw ConfigError("env.rvo settings are invalid");
  }
};

struct World {
  ScenarioConfig config;
  AgentState agent;
  ObstacleState obstacle;
  int step_count = 0;
  double time = 0.0;
  bool done = false;
};

struct StepResult {
  Observation observation;
  bool done = false;
  bool collided = false;
  bool reached_goal = false;
};

/// Ground-truth observation of the obstacle as seen from the agent.
inline Observation observe(const World& w) {
  Observation o;
  o.obstacle_position = w.obstacle.position - w.agent.position;
  o.obstacle_velocity = w.obstacle.velocity;
  o.obstacle_radius = w.obstacle.radius;
  o.relative_goal = w.agent.goal - w.agent.position;
  return o;
}

inline bool in_collision(const Vec2& a, double ra, const Vec2& b, double rb) {
  return (a - b).norm() < ra + rb;
}

/// Smallest distance between two points moving at constant velocity over
/// [0, horizon].
inline double min_separation(const Vec2& pa, const Vec2& va, const Vec2& pb, const Vec2& vb, double horizon) {
  const Vec2 p = pa - pb;
  const Vec2 v = va - vb;
  const double vv = v.squaredNorm();
  double t = 0.0;
  if (vv > 0.0) t = std::clamp(-p.dot(v) / vv, 0.0, horizon);
  return (p + v * t).norm();
}

inline Vec2 static_policy(const ObstacleState&) { return Vec2::Zero(); }

/// Constant velocity along the direction fixed at spawn; ignores the agent.
inline Vec2 noncooperative_policy(const ObstacleState& o) { return o.preferred_speed * o.travel_direction; }

/// Velocity that heads to the obstacle's goal at preferred speed, slowing only
/// for the final approach.
inline Vec2 preferred_velocity(const ObstacleState& o, double dt) {
  const Vec2 to_goal = o.goal - o.position;
  const double dist = to_goal.norm();
  if (dist < 1e-9) return Vec2::Zero();
  const double speed = std::min(o.preferred_speed, dist / dt);
  return to_goal / dist * speed;
}

/// Candidate offsets from the goal heading, ordered by increasing magnitude;
/// at equal magnitude the negative (clockwise) offset comes first.
inline std::vector<double> rvo_search_order(const RvoParams& rp) {
  std::vector<double> grid;
  if (rp.candidates == 1) return {0.0};
  const int half = rp.candidates / 2;
  const double step = rp.max_deviation / std::max(half, 1);
  grid.push_back(0.0);
  for (int k = 1; k <= half; ++k) {
    grid.push_back(-k * step);
    grid.push_back(k * step);
  }
  grid.resize(static_cast<std::size_t>(rp.candidates));
  return grid;
}

/// Simplified reciprocal velocity obstacle for a single obstacle/agent pair.
/// A candidate velocity v is accepted when the reciprocal test velocity
/// 2v - v_current keeps the predicted separation from the agent (moving at
/// its current velocity) at or above r_sum + margin over the horizon. The
/// first accepted candidate in search order is returned; if none clears, the
/// candidate with the largest predicted separation is used.
inline Vec2 rvo_policy(const ObstacleState& o, const AgentState& agent, const RvoParams& rp, double dt) {
  const Vec2 pref = preferred_velocity(o, dt);
  const double speed = pref.norm();
  if (speed == 0.0) return pref;
  const double goal_heading = std::atan2(pref.y(), pref.x());
  const double needed = o.radius + agent.radius + rp.margin;
  double best_sep = -1.0;
  Vec2 best = pref;
  for (double offset : rvo_search_order(rp)) {
    const Vec2 v = speed * unit_from_angle(goal_heading + offset);
    const Vec2 test = 2.0 * v - o.velocity;
    const double sep = min_separation(o.position, test, agent.position, agent.velocity, rp.horizon);
    if (sep >= needed) return v;
    if (sep > best_sep) {
      best_sep = sep;
      best = v;
    }
  }
  return best;
}

inline Vec2 obstacle_velocity(const World& w) {
  switch (w.obstacle.policy) {
    case ObstaclePolicy::kRvo: return rvo_policy(w.obstacle, w.agent, w.config.rvo, w.config.dt);
    case ObstaclePolicy::kNonCooperative: return noncooperative_policy(w.obstacle);
    case ObstaclePolicy::kStatic: return static_policy(w.obstacle);
  }
  return Vec2::Zero();
}

struct ResetResult {
  World world;
  Observation observation;
};

/// Builds a world from explicit agent/obstacle states, rejecting overlap.
inline World make_world(const ScenarioConfig& cfg, const AgentState& agent, ObstacleState obstacle) {
  cfg.validate();
  if (in_collision(agent.position, agent.radius, obstacle.position, obstacle.radius))
    throw ConfigError("agent and obstacle spawn positions overlap");
  World w{cfg, agent, obstacle};
  const Vec2 dir = obstacle.goal - obstacle.position;
  w.obstacle.travel_direction = dir.norm() > 0.0 ? Vec2(dir.normalized()) : Vec2(1.0, 0.0);
  if (obstacle.policy == ObstaclePolicy::kStatic) {
    w.obstacle.velocity.setZero();
  } else if (obstacle.policy == ObstaclePolicy::kNonCooperative) {
    w.obstacle.velocity = noncooperative_policy(w.obstacle);
  } else {
    w.obstacle.velocity = preferred_velocity(w.obstacle, cfg.dt);
  }
  return w;
}

/// Agent at the origin facing +x with its goal goal_distance ahead. In the
/// crossing layout the obstacle starts at polar (d, theta) and heads through
/// the point on the agent's path that both would reach at the same time if
/// neither reacted, so doing nothing tends to collide.
inline ResetResult reset(const ScenarioConfig& cfg, Rng& rng) {
  cfg.validate();
  AgentState agent;
  agent.radius = cfg.agent_radius;
  agent.preferred_speed = cfg.agent_speed;
  agent.goal = Vec2(cfg.goal_distance, 0.0);
  agent.heading = 0.0;
  agent.velocity = Vec2(cfg.agent_speed, 0.0);

  ObstacleState obs;
  obs.radius = cfg.obstacle_radius;
  obs.preferred_speed = cfg.obstacle_speed;
  obs.policy = cfg.obstacle_policy;
  if (cfg.layout == LayoutKind::kCrossing) {
    const double theta = uniform(rng, -cfg.spawn_angle, cfg.spawn_angle);
    const double d = uniform(rng, cfg.spawn_distance_min, cfg.spawn_distance_max);
    obs.position = d * unit_from_angle(theta);
    // Meeting point on the x axis: equal travel time at equal speeds.
    const double ratio = cfg.obstacle_speed > 0.0 ? cfg.agent_speed / cfg.obstacle_speed : 1.0;
    const double cos_t = std::cos(theta);
    double meet_x = d / (2.0 * cos_t);
    if (std::abs(ratio - 1.0) > 1e-12) {
      // |S - P| = x / ratio  ->  (1 - 1/ratio^2) x^2 - 2 d cos x + d^2 = 0
      const double a = 1.0 - 1.0 / (ratio * ratio);
      const double disc = 4.0 * d * d * cos_t * cos_t - 4.0 * a * d * d;
      meet_x = disc >= 0.0 ? (2.0 * d * cos_t - std::sqrt(disc)) / (2.0 * a) : d * cos_t;
      if (meet_x <= 0.0) meet_x = d * cos_t;
    }
    const Vec2 meet(meet_x, 0.0);
    obs.goal = obs.position + 2.0 * (meet - obs.position);
  } else {
    const Vec2 jitter(uniform(rng, -cfg.fixed_jitter, cfg.fixed_jitter),
                      uniform(rng, -cfg.fixed_jitter, cfg.fixed_jitter));
    obs.position = cfg.fixed_obstacle_position + jitter;
    obs.goal = cfg.fixed_obstacle_goal + jitter;
  }
  World w = make_world(cfg, agent, obs);
  return {w, observe(w)};
}

/// Advances the world by one dt with the agent commanding `agent_velocity`.
/// Collision is checked at the start of the step and at every substep.
inline StepResult step(World& w, const Vec2& agent_velocity) {
  StepResult r;
  if (w.done) throw ConfigError("step called on a finished episode");
  const Vec2 obstacle_vel = obstacle_velocity(w);
  w.obstacle.velocity = obstacle_vel;
  w.agent.velocity = agent_velocity;
  if (agent_velocity.squaredNorm() > 0.0) w.agent.heading = std::atan2(agent_velocity.y(), agent_velocity.x());

  const Vec2 a0 = w.agent.position;
  const Vec2 o0 = w.obstacle.position;
  const double dt = w.config.dt;
  for (int s = 0; s <= w.config.substeps && !r.collided; ++s) {
    const double f = dt * static_cast<double>(s) / static_cast<double>(w.config.substeps);
    r.collided = in_collision(a0 + agent_velocity * f, w.agent.radius, o0 + obstacle_vel * f, w.obstacle.radius);
  }
  w.agent.position = a0 + agent_velocity * dt;
  w.obstacle.position = o0 + obstacle_vel * dt;
  ++w.step_count;
  w.time += dt;
  r.reached_goal = !r.collided && (w.agent.goal - w.agent.position).norm() < w.config.goal_threshold;
  r.done = r.collided || r.reached_goal || w.step_count >= w.config.timeout_steps;
  w.done = r.done;
  r.observation = observe(w);
  return r;
}

}  // namespace uacoll::env
