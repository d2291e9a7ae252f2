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
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "uacoll/ensemble/ensemble.hpp"
#include "uacoll/env/trace.hpp"
#include "uacoll/env/world.hpp"
#include "uacoll/policy/cost.hpp"
#include "uacoll/trainer/dataset.hpp"
#include "uacoll/trainer/episode.hpp"
#include "uacoll/trainer/training.hpp"

namespace uacoll::trainer {

/// How lambda_v evolves during training.
enum class ScheduleMode {
  kIncreasing,  // linear ramp lambda_v_start -> lambda_v_end
  kConstant,    // lambda_v_end throughout
  kZero,        // uncertainty-unaware baseline
};

inline const char* to_string(ScheduleMode m) {
  switch (m) {
    case ScheduleMode::kIncreasing: return "increasing";
    case ScheduleMode::kConstant: return "constant";
    case ScheduleMode::kZero: return "zero";
  }
  return "?";
}

inline ScheduleMode schedule_mode_from_string(const std::string& s) {
  if (s == "increasing") return ScheduleMode::kIncreasing;
  if (s == "constant") return ScheduleMode::kConstant;
  if (s == "zero") return ScheduleMode::kZero;
  throw ConfigError("unknown lambda_v schedule '" + s + "' (expected increasing, constant or zero)");
}

struct TrainConfig {
  int sessions = 20;
  int episodes_per_session = 50;
  FitOptions fit;
  int history_length = 8;
  nn::LayerSpec network{policy::kFeatureWidth, 16, {}, nn::Activation::kTanh};
  EnsembleConfig ensemble;
  policy::CostWeights weights;
  ScheduleMode schedule = ScheduleMode::kIncreasing;
  long lambda_v_total_steps = 0;  // 0: derived from the nominal episode length
  env::ScenarioConfig scenario;
  std::uint64_t seed = 1;
  int threads = 1;

  void validate() const {
    if (sessions < 1 || episodes_per_session < 1) throw ConfigError("trainer sessions and episodes must be >= 1");
    if (history_length < 1) throw ConfigError("network.history_length must be >= 1");
    if (network.input != policy::kFeatureWidth) throw ConfigError("network input width must equal the feature width");
    if (lambda_v_total_steps < 0) throw ConfigError("trainer.lambda_v_total_steps must be >= 0");
    network.validate();
    ensemble.validate();
    weights.validate();
    scenario.validate();
  }

  /// Steps over which the ramp runs: every session but the last, at the
  /// nominal straight-line episode length.
  long ramp_steps() const {
    if (lambda_v_total_steps > 0) return lambda_v_total_steps;
    const long nominal = static_cast<long>(std::ceil(scenario.goal_distance / (scenario.agent_speed * scenario.dt)));
    return std::max(1L, static_cast<long>(std::max(sessions - 1, 1)) * episodes_per_session * nominal);
  }
};

struct SessionMetrics {
  int session = 0;
  int episodes = 0;
  int collisions = 0;
  double collision_rate = 0.0;
  double mean_uncertainty = 0.0;  // per-step uncertainty averaged over the session's steps
  double lambda_v_first = 0.0;
  double lambda_v_last = 0.0;
  std::size_t dataset_size = 0;
  double train_loss = 0.0;  // mean over members, last epoch
};

struct TrainResult {
  Ensemble ensemble;
  std::vector<SessionMetrics> metrics;
  ExperienceDataset dataset;
};

/// Observe-act-train cycle. Each session rolls out episodes with the current
/// (frozen) ensemble, appends their windows to the experience set and then
/// retrains every member on a fresh bootstrap resample. lambda_v advances per
/// environment step; the last session always runs at lambda_v_end.
inline TrainResult train_loop(const TrainConfig& cfg) {
  cfg.validate();
  TrainResult res;
  res.ensemble = make_ensemble(cfg.ensemble, cfg.network, substream_seed(cfg.seed, "ensemble-init"));
  res.dataset.history_length = cfg.history_length;
  AgentPolicy agent_policy{policy::primitive_set(cfg.scenario.agent_speed), cfg.weights, cfg.history_length};
  const long ramp = cfg.ramp_steps();
  long global_step = 0;

  for (int s = 0; s < cfg.sessions; ++s) {
    SessionMetrics m;
    m.session = s;
    const bool last = s == cfg.sessions - 1 && cfg.sessions > 1;
    double unc_sum = 0.0;
    long steps = 0;
    for (int e = 0; e < cfg.episodes_per_session; ++e) {
      const auto episode_id = static_cast<std::uint64_t>(s) * static_cast<std::uint64_t>(cfg.episodes_per_session) +
                              static_cast<std::uint64_t>(e);
      Rng env_rng = make_rng(cfg.seed, "env", episode_id);
      auto start = env::reset(cfg.scenario, env_rng);
      const long offset = global_step;
      LambdaFn lambda = [&](int t) {
        switch (cfg.schedule) {
          case ScheduleMode::kZero: return 0.0;
          case ScheduleMode::kConstant: return cfg.weights.lambda_v_end;
          case ScheduleMode::kIncreasing:
            return last ? cfg.weights.lambda_v_end : policy::lambda_v_schedule(offset + t, ramp, cfg.weights);
        }
        return 0.0;
      };
      auto rec = run_episode(start.world, start.observation, res.ensemble, agent_policy, lambda, env::Perturbation{},
                             substream_seed(cfg.seed, "episode", episode_id), cfg.threads);
      if (e == 0) m.lambda_v_first = rec.trace.rows.front().lambda_v;
      m.lambda_v_last = rec.trace.rows.back().lambda_v;
      for (const auto& row : rec.trace.rows) {
        double u = 0.0;
        for (double v : row.variance) u += v;
        unc_sum += u;
      }
      steps += static_cast<long>(rec.steps.size());
      global_step += static_cast<long>(rec.steps.size());
      m.collisions += rec.label;
      ++m.episodes;
      res.dataset.add_episode(rec);
    }
    m.collision_rate = static_cast<double>(m.collisions) / static_cast<double>(m.episodes);
    m.mean_uncertainty = steps > 0 ? unc_sum / static_cast<double>(steps) : 0.0;
    const auto losses = train_session(res.ensemble, res.dataset.examples, cfg.fit,
                                      substream_seed(cfg.seed, "session", static_cast<std::uint64_t>(s)), cfg.threads);
    double loss = 0.0;
    for (double l : losses) loss += l;
    m.train_loss = loss / static_cast<double>(losses.size());
    m.dataset_size = res.dataset.size();
    for (const auto& member : res.ensemble.members)
      if (!nn::all_finite(member)) throw NumericError("ensemble parameters became non-finite");
    res.metrics.push_back(m);
  }
  return res;
}

inline constexpr const char* kMetricsHeader =
    "session,episodes,collisions,collision_rate,mean_uncertainty,lambda_v_first,lambda_v_last,dataset_size,train_loss";

inline std::string metrics_csv(const std::vector<SessionMetrics>& metrics) {
  std::string out = std::string(kMetricsHeader) + "\n";
  for (const auto& m : metrics) {
    out += std::to_string(m.session) + "," + std::to_string(m.episodes) + "," + std::to_string(m.collisions);
    for (double v : {m.collision_rate, m.mean_uncertainty, m.lambda_v_first, m.lambda_v_last}) {
      out += ",";
      env::detail::put_real(out, v);
    }
    out += "," + std::to_string(m.dataset_size) + ",";
    env::detail::put_real(out, m.train_loss);
    out += "\n";
  }
  return out;
}

inline void write_metrics_csv(const std::filesystem::path& path, const std::vector<SessionMetrics>& metrics) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << metrics_csv(metrics);
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

}  // namespace uacoll::trainer
