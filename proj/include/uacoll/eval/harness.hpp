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
#include <vector>

#include "uacoll/core/parallel.hpp"
#include "uacoll/ensemble/ensemble.hpp"
#include "uacoll/env/world.hpp"
#include "uacoll/eval/report.hpp"
#include "uacoll/trainer/episode.hpp"

namespace uacoll::eval {

struct EvalConfig {
  int sessions = 5;
  int episodes = 20;
  std::vector<env::PerturbationKind> scenarios = {
      env::PerturbationKind::kNone, env::PerturbationKind::kGaussianNoise, env::PerturbationKind::kDrop,
      env::PerturbationKind::kMaskVelocity, env::PerturbationKind::kMaskPosition};
  double noise_sigma = 0.5;
  double drop_prob = 0.2;
  double lambda_v_aware = 200.0;
  env::ScenarioConfig scenario;
  std::uint64_t seed = 1;
  int threads = 1;

  void validate() const {
    if (sessions < 1 || episodes < 1) throw ConfigError("eval sessions and episodes must be >= 1");
    if (scenarios.empty()) throw ConfigError("eval.scenarios must not be empty");
    env::Perturbation{env::PerturbationKind::kNone, noise_sigma, drop_prob}.validate();
    scenario.validate();
  }

  env::Perturbation perturbation(env::PerturbationKind k) const { return {k, noise_sigma, drop_prob}; }
};

/// Rolls out sessions x episodes with frozen weights and a fixed lambda_v.
/// Episode (s, e) always gets the same spawn and dropout seeds, whatever the
/// model or perturbation, so comparisons use common random numbers.
inline std::vector<env::EpisodeTrace> run_scenario(const Ensemble& ensemble, const trainer::AgentPolicy& agent_policy,
                                                   const EvalConfig& cfg, env::PerturbationKind kind, double lambda_v) {
  const auto total = static_cast<std::size_t>(cfg.sessions) * static_cast<std::size_t>(cfg.episodes);
  std::vector<env::EpisodeTrace> traces(total);
  const auto perturbation = cfg.perturbation(kind);
  parallel_for(total, cfg.threads, [&](std::size_t i) {
    Rng env_rng = make_rng(cfg.seed, "eval-env", i);
    auto start = env::reset(cfg.scenario, env_rng);
    auto rec = trainer::run_episode(start.world, start.observation, ensemble, agent_policy,
                                    trainer::constant_lambda(lambda_v), perturbation,
                                    substream_seed(cfg.seed, "eval-episode", i));
    rec.trace.session = static_cast<int>(i / static_cast<std::size_t>(cfg.episodes));
    rec.trace.episode = static_cast<int>(i % static_cast<std::size_t>(cfg.episodes));
    traces[i] = std::move(rec.trace);
  });
  return traces;
}

struct ModelUnderTest {
  std::string name;
  const Ensemble* ensemble = nullptr;
  double lambda_v = 0.0;
};

struct ScenarioRun {
  std::string model;
  std::string scenario;
  std::vector<env::EpisodeTrace> traces;
};

struct Comparison {
  std::vector<ScenarioReport> reports;  // model-major, scenarios in config order
  std::vector<ScenarioRun> runs;
};

/// Evaluates each model under each perturbation scenario.
inline Comparison evaluate_models(const std::vector<ModelUnderTest>& models, const trainer::AgentPolicy& agent_policy,
                                  const EvalConfig& cfg) {
  cfg.validate();
  Comparison out;
  for (const auto& m : models) {
    if (m.ensemble == nullptr || m.ensemble->members.empty()) throw ConfigError("model '" + m.name + "' has no ensemble");
    for (auto kind : cfg.scenarios) {
      ScenarioRun run{m.name, env::scenario_name(kind), run_scenario(*m.ensemble, agent_policy, cfg, kind, m.lambda_v)};
      out.reports.push_back(make_report(run.model, run.scenario, run.traces));
      out.runs.push_back(std::move(run));
    }
  }
  return out;
}

/// Uncertainty-aware model at lambda_v_aware against the baseline at 0.
inline Comparison compare_models(const Ensemble& aware, const Ensemble& unaware,
                                 const trainer::AgentPolicy& agent_policy, const EvalConfig& cfg) {
  return evaluate_models({{"aware", &aware, cfg.lambda_v_aware}, {"unaware", &unaware, 0.0}}, agent_policy, cfg);
}

}  // namespace uacoll::eval
