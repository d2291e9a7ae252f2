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

#include "uacoll/core/rng.hpp"
#include "uacoll/ensemble/ensemble.hpp"
#include "uacoll/trainer/training.hpp"

namespace uacoll::trainer {

/// 1D regional-novelty experiment. The agent sits at the origin facing +y and
/// picks a heading phi in [-pi/2, pi/2] (positive = towards +x). A disc
/// obstacle sits at `obstacle_distance` with bearing beta measured the same
/// way. Training only ever sees obstacles with beta > 0 (the x > 0 side).
struct Toy1dConfig {
  int samples = 1000;
  double obstacle_distance = 2.0;
  double radius_sum = 0.6;
  int grid = 41;
  EnsembleConfig ensemble;
  nn::LayerSpec network{2, 0, {32, 32}, nn::Activation::kRelu};
  FitOptions fit{150, 32, {1e-3}};
  std::uint64_t seed = 1;
  int threads = 1;

  void validate() const {
    if (samples < 1) throw ConfigError("toy1d.samples must be >= 1");
    if (grid < 2) throw ConfigError("toy1d.grid must be >= 2");
    if (!(obstacle_distance > radius_sum) || !(radius_sum > 0.0))
      throw ConfigError("toy1d needs obstacle_distance > radius_sum > 0");
    if (network.input != 2 || network.has_lstm()) throw ConfigError("toy1d network must be a 2-input MLP");
    network.validate();
    ensemble.validate();
  }
};

/// 1 iff the ray from the origin along phi passes within radius_sum of the
/// obstacle centre (only points ahead of the agent count).
inline int toy_collision_label(double agent_heading, double obstacle_heading, double distance, double radius_sum) {
  const double rel = agent_heading - obstacle_heading;
  if (std::cos(rel) <= 0.0) return 0;
  return distance * std::abs(std::sin(rel)) < radius_sum ? 1 : 0;
}

struct Toy1dPoint {
  bool trained_side = false;
  double agent_heading = 0.0;
  double obstacle_heading = 0.0;
  double mean = 0.0;
  double variance = 0.0;
  int label = 0;
};

struct Toy1dResult {
  std::vector<Toy1dPoint> grid;
  double trained_accuracy = 0.0;   // thresholded mean vs analytic label, beta > 0
  double trained_variance = 0.0;   // mean per-point variance, beta > 0
  double unseen_variance = 0.0;    // mean per-point variance, beta < 0
  Ensemble ensemble;
};

inline std::vector<nn::SequenceExample> toy1d_dataset(const Toy1dConfig& cfg, Rng& rng) {
  std::vector<nn::SequenceExample> data;
  data.reserve(static_cast<std::size_t>(cfg.samples));
  const double half_pi = std::numbers::pi / 2.0;
  for (int i = 0; i < cfg.samples; ++i) {
    const double phi = uniform(rng, -half_pi, half_pi);
    double beta = uniform(rng, 0.0, half_pi);
    while (beta <= 0.0) beta = uniform(rng, 0.0, half_pi);
    nn::SequenceExample ex;
    ex.steps.resize(1, 2);
    ex.steps << phi, beta;
    ex.label = toy_collision_label(phi, beta, cfg.obstacle_distance, cfg.radius_sum);
    data.push_back(std::move(ex));
  }
  return data;
}

/// Obstacle bearings of the evaluation grid: cell centres on each side.
inline std::vector<double> toy1d_bearings(int grid, bool trained_side) {
  std::vector<double> out;
  const double half_pi = std::numbers::pi / 2.0;
  for (int j = 0; j < grid; ++j) {
    const double b = (j + 0.5) * half_pi / grid;
    out.push_back(trained_side ? b : -b);
  }
  return out;
}

inline Toy1dResult run_toy1d(const Toy1dConfig& cfg) {
  cfg.validate();
  Rng data_rng = make_rng(cfg.seed, "toy1d-data");
  const auto data = toy1d_dataset(cfg, data_rng);
  Toy1dResult res;
  res.ensemble = make_ensemble(cfg.ensemble, cfg.network, substream_seed(cfg.seed, "toy1d-init"));
  train_session(res.ensemble, data, cfg.fit, substream_seed(cfg.seed, "toy1d-train"), cfg.threads);

  const double half_pi = std::numbers::pi / 2.0;
  nn::Matrix candidates(cfg.grid, 2);
  std::vector<double> headings;
  for (int i = 0; i < cfg.grid; ++i) headings.push_back(-half_pi + std::numbers::pi * i / (cfg.grid - 1));

  int correct = 0, trained_points = 0, unseen_points = 0;
  std::uint64_t column = 0;
  for (const bool side : {true, false}) {
    for (double beta : toy1d_bearings(cfg.grid, side)) {
      for (int i = 0; i < cfg.grid; ++i) candidates.row(i) << headings[static_cast<std::size_t>(i)], beta;
      const auto dists = predict_distributions(res.ensemble, nn::Matrix(0, 2), candidates,
                                               substream_seed(cfg.seed, "toy1d-eval", column++), cfg.threads);
      for (int i = 0; i < cfg.grid; ++i) {
        Toy1dPoint pt;
        pt.trained_side = side;
        pt.agent_heading = headings[static_cast<std::size_t>(i)];
        pt.obstacle_heading = beta;
        pt.mean = dists[static_cast<std::size_t>(i)].mean;
        pt.variance = dists[static_cast<std::size_t>(i)].variance;
        pt.label = toy_collision_label(pt.agent_heading, beta, cfg.obstacle_distance, cfg.radius_sum);
        if (side) {
          res.trained_variance += pt.variance;
          correct += ((pt.mean > 0.5 ? 1 : 0) == pt.label) ? 1 : 0;
          ++trained_points;
        } else {
          res.unseen_variance += pt.variance;
          ++unseen_points;
        }
        res.grid.push_back(pt);
      }
    }
  }
  res.trained_variance /= trained_points;
  res.unseen_variance /= unseen_points;
  res.trained_accuracy = static_cast<double>(correct) / trained_points;
  return res;
}

}  // namespace uacoll::trainer
