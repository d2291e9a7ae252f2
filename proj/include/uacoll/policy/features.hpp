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

#include <deque>

#include "uacoll/env/types.hpp"
#include "uacoll/nn/params.hpp"

namespace uacoll::policy {

/// Per-timestep predictor input, layout version 1:
///   [0,1] obstacle position rel. agent / 4 m    [2,3] obstacle velocity / 1 m/s
///   [4]   obstacle radius / 0.5 m                [5,6] relative goal / 6 m
///   [7]   position_valid  [8] velocity_valid     [9] frame_valid
///   [10,11] cos/sin of the commanded heading
inline constexpr int kFeatureLayoutVersion = 1;
inline constexpr int kObservationFeatures = 10;
inline constexpr int kFeatureWidth = 12;

inline void encode_observation(const env::Observation& o, Eigen::Ref<nn::Vector> out) {
  out(0) = o.obstacle_position.x() / 4.0;
  out(1) = o.obstacle_position.y() / 4.0;
  out(2) = o.obstacle_velocity.x();
  out(3) = o.obstacle_velocity.y();
  out(4) = o.obstacle_radius / 0.5;
  out(5) = o.relative_goal.x() / 6.0;
  out(6) = o.relative_goal.y() / 6.0;
  out(7) = o.position_valid ? 1.0 : 0.0;
  out(8) = o.velocity_valid ? 1.0 : 0.0;
  out(9) = o.frame_valid ? 1.0 : 0.0;
}

inline nn::Vector encode_step(const env::Observation& o, double commanded_heading) {
  nn::Vector v(kFeatureWidth);
  encode_observation(o, v.head(kObservationFeatures));
  v(10) = std::cos(commanded_heading);
  v(11) = std::sin(commanded_heading);
  return v;
}

/// Rolling window of the most recent completed (observation, action) rows.
class FeatureHistory {
 public:
  explicit FeatureHistory(int history_length) : capacity_(history_length > 1 ? history_length - 1 : 0) {}

  void push(nn::Vector row) {
    if (capacity_ == 0) return;
    rows_.push_back(std::move(row));
    if (static_cast<int>(rows_.size()) > capacity_) rows_.pop_front();
  }

  /// Past rows, oldest first, as a (rows x width) matrix.
  nn::Matrix prefix() const {
    nn::Matrix m(static_cast<Eigen::Index>(rows_.size()), kFeatureWidth);
    for (std::size_t i = 0; i < rows_.size(); ++i) m.row(static_cast<Eigen::Index>(i)) = rows_[i].transpose();
    return m;
  }

  std::size_t size() const { return rows_.size(); }

 private:
  int capacity_;
  std::deque<nn::Vector> rows_;
};

}  // namespace uacoll::policy
