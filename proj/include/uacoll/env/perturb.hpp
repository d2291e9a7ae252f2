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

#include "uacoll/core/rng.hpp"
#include "uacoll/env/types.hpp"

namespace uacoll::env {

/// Applies a novelty perturbation to an emitted observation. The relative
/// goal is never touched.
inline Observation perturb_observation(Observation obs, const Perturbation& p, Rng& rng) {
  switch (p.kind) {
    case PerturbationKind::kNone:
      break;
    case PerturbationKind::kGaussianNoise:
      for (int i = 0; i < 2; ++i) obs.obstacle_position(i) += p.sigma * standard_normal(rng);
      for (int i = 0; i < 2; ++i) obs.obstacle_velocity(i) += p.sigma * standard_normal(rng);
      break;
    case PerturbationKind::kDrop:
      if (bernoulli(rng, p.drop_prob)) {
        obs.obstacle_position.setZero();
        obs.obstacle_velocity.setZero();
        obs.obstacle_radius = 0.0;
        obs.position_valid = false;
        obs.velocity_valid = false;
        obs.frame_valid = false;
      }
      break;
    case PerturbationKind::kMaskVelocity:
      obs.obstacle_velocity.setZero();
      obs.velocity_valid = false;
      break;
    case PerturbationKind::kMaskPosition:
      obs.obstacle_position.setZero();
      obs.position_valid = false;
      break;
  }
  return obs;
}

}  // namespace uacoll::env
