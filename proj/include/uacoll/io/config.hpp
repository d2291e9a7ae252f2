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

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "uacoll/core/errors.hpp"
#include "uacoll/eval/harness.hpp"
#include "uacoll/trainer/loop.hpp"
#include "uacoll/trainer/toy1d.hpp"

namespace uacoll::io {

using nlohmann::json;

namespace detail {

inline double deg(double r) { return r * 180.0 / std::numbers::pi; }
inline double rad(double d) { return d * std::numbers::pi / 180.0; }

/// Reads known keys from one JSON object and rejects everything else.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError("'" + path_ + "' must be a JSON object");
  }

  std::string key_path(const std::string& k) const { return path_.empty() ? k : path_ + "." + k; }

  bool has(const std::string& k) {
    seen_.insert(k);
    return j_.contains(k);
  }

  template <class T>
  void get(const std::string& k, T& out) {
    if (!has(k)) return;
    const json& v = j_.at(k);
    if constexpr (std::is_same_v<T, bool>) {
      if (!v.is_boolean()) throw ConfigError("'" + key_path(k) + "' must be a boolean");
    } else if constexpr (std::is_integral_v<T>) {
      if (!v.is_number_integer()) throw ConfigError("'" + key_path(k) + "' must be an integer");
      if (std::is_unsigned_v<T> && v.is_number_integer() && !v.is_number_unsigned() && v.get<long long>() < 0)
        throw ConfigError("'" + key_path(k) + "' must be non-negative");
    } else if constexpr (std::is_floating_point_v<T>) {
      if (!v.is_number()) throw ConfigError("'" + key_path(k) + "' must be a number");
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!v.is_string()) throw ConfigError("'" + key_path(k) + "' must be a string");
    } else if constexpr (std::is_same_v<T, std::vector<int>>) {
      if (!v.is_array()) throw ConfigError("'" + key_path(k) + "' must be an array of integers");
      for (const auto& e : v)
        if (!e.is_number_integer()) throw ConfigError("'" + key_path(k) + "' must be an array of integers");
    } else if constexpr (std::is_same_v<T, std::vector<std::string>>) {
      if (!v.is_array()) throw ConfigError("'" + key_path(k) + "' must be an array of strings");
      for (const auto& e : v)
        if (!e.is_string()) throw ConfigError("'" + key_path(k) + "' must be an array of strings");
    }
    out = v.get<T>();
  }

  void get_vec2(const std::string& k, env::Vec2& out) {
    if (!has(k)) return;
    const json& v = j_.at(k);
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
      throw ConfigError("'" + key_path(k) + "' must be a [x, y] pair");
    out = env::Vec2(v[0].get<double>(), v[1].get<double>());
  }

  Section child(const std::string& k) {
    seen_.insert(k);
    return Section(j_.contains(k) ? j_.at(k) : empty(), key_path(k));
  }

  /// Throws on the first key that was never asked for.
  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!seen_.count(it.key())) throw ConfigError("unknown config key '" + key_path(it.key()) + "'");
  }

 private:
  static const json& empty() {
    static const json e = json::object();
    return e;
  }
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

}  // namespace detail

/// Everything a command needs. Angles are degrees in JSON, radians here.
struct RunConfig {
  std::uint64_t seed = 1;
  std::string output_dir = "out";

  env::ScenarioConfig env;
  nn::LayerSpec network{policy::kFeatureWidth, 16, {}, nn::Activation::kTanh};
  int history_length = 8;
  EnsembleConfig ensemble;
  policy::CostWeights weights;

  int sessions = 6;
  int episodes_per_session = 20;
  trainer::FitOptions fit;
  trainer::ScheduleMode schedule = trainer::ScheduleMode::kIncreasing;
  long lambda_v_total_steps = 0;

  int eval_sessions = 5;
  int eval_episodes = 20;
  int eval_sessions_full = 20;
  int eval_episodes_full = 50;
  std::vector<env::PerturbationKind> scenarios = eval::EvalConfig{}.scenarios;
  double noise_sigma = 0.5;
  double drop_prob = 0.2;
  double lambda_v_aware = 200.0;

  trainer::Toy1dConfig toy1d;

  trainer::TrainConfig train_config(int threads) const {
    trainer::TrainConfig c;
    c.sessions = sessions;
    c.episodes_per_session = episodes_per_session;
    c.fit = fit;
    c.history_length = history_length;
    c.network = network;
    c.ensemble = ensemble;
    c.weights = weights;
    c.schedule = schedule;
    c.lambda_v_total_steps = lambda_v_total_steps;
    c.scenario = env;
    c.seed = seed;
    c.threads = threads;
    c.validate();
    return c;
  }

  eval::EvalConfig eval_config(int threads, bool full_scale) const {
    eval::EvalConfig c;
    c.sessions = full_scale ? eval_sessions_full : eval_sessions;
    c.episodes = full_scale ? eval_episodes_full : eval_episodes;
    c.scenarios = scenarios;
    c.noise_sigma = noise_sigma;
    c.drop_prob = drop_prob;
    c.lambda_v_aware = lambda_v_aware;
    c.scenario = env;
    c.seed = seed;
    c.threads = threads;
    c.validate();
    return c;
  }

  trainer::Toy1dConfig toy1d_config(int threads) const {
    trainer::Toy1dConfig c = toy1d;
    c.seed = seed;
    c.threads = threads;
    c.validate();
    return c;
  }
};

namespace detail {

inline void read_network(Section s, nn::LayerSpec& spec, int* history_length) {
  int lstm = spec.lstm_hidden;
  std::vector<int> dense = spec.dense_hidden;
  std::string act = nn::to_string(spec.hidden_activation);
  s.get("lstm_hidden", lstm);
  s.get("dense_hidden", dense);
  s.get("activation", act);
  if (history_length) s.get("history_length", *history_length);
  s.finish();
  spec.lstm_hidden = lstm;
  spec.dense_hidden = dense;
  spec.hidden_activation = nn::activation_from_string(act);
}

inline void read_ensemble(Section s, EnsembleConfig& e) {
  s.get("members", e.members);
  s.get("dropout_passes", e.dropout_passes);
  s.get("keep_prob", e.keep_prob);
  s.finish();
}

inline void read_fit(Section& s, trainer::FitOptions& f) {
  s.get("epochs", f.epochs);
  s.get("batch_size", f.batch_size);
  s.get("learning_rate", f.adam.learning_rate);
}

inline json network_json(const nn::LayerSpec& n) {
  return {{"lstm_hidden", n.lstm_hidden}, {"dense_hidden", n.dense_hidden}, {"activation", nn::to_string(n.hidden_activation)}};
}

inline json ensemble_json(const EnsembleConfig& e) {
  return {{"members", e.members}, {"dropout_passes", e.dropout_passes}, {"keep_prob", e.keep_prob}};
}

}  // namespace detail

inline RunConfig config_from_json(const json& root) {
  RunConfig c;
  detail::Section top(root, "");
  top.get("seed", c.seed);
  top.get("output_dir", c.output_dir);

  {
    auto s = top.child("env");
    auto& e = c.env;
    s.get("dt", e.dt);
    s.get("timeout_steps", e.timeout_steps);
    s.get("goal_threshold", e.goal_threshold);
    s.get("substeps", e.substeps);
    s.get("agent_radius", e.agent_radius);
    s.get("agent_speed", e.agent_speed);
    s.get("goal_distance", e.goal_distance);
    std::string pol = env::to_string(e.obstacle_policy);
    s.get("obstacle_policy", pol);
    e.obstacle_policy = env::obstacle_policy_from_string(pol);
    s.get("obstacle_radius", e.obstacle_radius);
    s.get("obstacle_speed", e.obstacle_speed);
    std::string layout = e.layout == env::LayoutKind::kCrossing ? "crossing" : "fixed";
    s.get("layout", layout);
    if (layout == "crossing") e.layout = env::LayoutKind::kCrossing;
    else if (layout == "fixed") e.layout = env::LayoutKind::kFixed;
    else throw ConfigError("unknown layout '" + layout + "' (expected crossing or fixed)");
    double spawn_deg = detail::deg(e.spawn_angle);
    s.get("spawn_angle_deg", spawn_deg);
    e.spawn_angle = detail::rad(spawn_deg);
    s.get("spawn_distance_min", e.spawn_distance_min);
    s.get("spawn_distance_max", e.spawn_distance_max);
    s.get_vec2("fixed_obstacle_position", e.fixed_obstacle_position);
    s.get_vec2("fixed_obstacle_goal", e.fixed_obstacle_goal);
    s.get("fixed_jitter", e.fixed_jitter);
    auto r = s.child("rvo");
    r.get("horizon", e.rvo.horizon);
    r.get("margin", e.rvo.margin);
    r.get("candidates", e.rvo.candidates);
    double dev = detail::deg(e.rvo.max_deviation);
    r.get("max_deviation_deg", dev);
    e.rvo.max_deviation = detail::rad(dev);
    r.finish();
    s.finish();
  }

  detail::read_network(top.child("network"), c.network, &c.history_length);
  detail::read_ensemble(top.child("ensemble"), c.ensemble);

  {
    auto s = top.child("weights");
    s.get("lambda_c", c.weights.lambda_c);
    s.get("lambda_g", c.weights.lambda_g);
    s.get("lambda_v_start", c.weights.lambda_v_start);
    s.get("lambda_v_end", c.weights.lambda_v_end);
    s.finish();
  }
  {
    auto s = top.child("trainer");
    s.get("sessions", c.sessions);
    s.get("episodes_per_session", c.episodes_per_session);
    detail::read_fit(s, c.fit);
    std::string mode = trainer::to_string(c.schedule);
    s.get("schedule", mode);
    c.schedule = trainer::schedule_mode_from_string(mode);
    s.get("lambda_v_total_steps", c.lambda_v_total_steps);
    s.finish();
  }
  {
    auto s = top.child("eval");
    s.get("sessions", c.eval_sessions);
    s.get("episodes", c.eval_episodes);
    s.get("full_scale_sessions", c.eval_sessions_full);
    s.get("full_scale_episodes", c.eval_episodes_full);
    if (s.has("scenarios")) {
      std::vector<std::string> names;
      s.get("scenarios", names);
      c.scenarios.clear();
      for (const auto& n : names) c.scenarios.push_back(env::perturbation_from_string(n));
    }
    s.get("noise_sigma", c.noise_sigma);
    s.get("drop_prob", c.drop_prob);
    s.get("lambda_v_aware", c.lambda_v_aware);
    s.finish();
  }
  {
    auto s = top.child("toy1d");
    auto& t = c.toy1d;
    s.get("samples", t.samples);
    s.get("obstacle_distance", t.obstacle_distance);
    s.get("radius_sum", t.radius_sum);
    s.get("grid", t.grid);
    detail::read_fit(s, t.fit);
    detail::read_network(s.child("network"), t.network, nullptr);
    detail::read_ensemble(s.child("ensemble"), t.ensemble);
    s.finish();
  }
  top.finish();

  c.train_config(1);
  c.eval_config(1, false);
  c.eval_config(1, true);
  c.toy1d_config(1);
  return c;
}

/// Fully expanded form; reading it back gives the same RunConfig.
inline json config_to_json(const RunConfig& c) {
  const auto& e = c.env;
  json scen = json::array();
  for (auto k : c.scenarios) scen.push_back(env::scenario_name(k));
  return {
      {"seed", c.seed},
      {"output_dir", c.output_dir},
      {"env",
       {{"dt", e.dt},
        {"timeout_steps", e.timeout_steps},
        {"goal_threshold", e.goal_threshold},
        {"substeps", e.substeps},
        {"agent_radius", e.agent_radius},
        {"agent_speed", e.agent_speed},
        {"goal_distance", e.goal_distance},
        {"obstacle_policy", env::to_string(e.obstacle_policy)},
        {"obstacle_radius", e.obstacle_radius},
        {"obstacle_speed", e.obstacle_speed},
        {"layout", e.layout == env::LayoutKind::kCrossing ? "crossing" : "fixed"},
        {"spawn_angle_deg", detail::deg(e.spawn_angle)},
        {"spawn_distance_min", e.spawn_distance_min},
        {"spawn_distance_max", e.spawn_distance_max},
        {"fixed_obstacle_position", {e.fixed_obstacle_position.x(), e.fixed_obstacle_position.y()}},
        {"fixed_obstacle_goal", {e.fixed_obstacle_goal.x(), e.fixed_obstacle_goal.y()}},
        {"fixed_jitter", e.fixed_jitter},
        {"rvo",
         {{"horizon", e.rvo.horizon},
          {"margin", e.rvo.margin},
          {"candidates", e.rvo.candidates},
          {"max_deviation_deg", detail::deg(e.rvo.max_deviation)}}}}},
      {"network", [&] {
         json n = detail::network_json(c.network);
         n["history_length"] = c.history_length;
         return n;
       }()},
      {"ensemble", detail::ensemble_json(c.ensemble)},
      {"weights",
       {{"lambda_c", c.weights.lambda_c},
        {"lambda_g", c.weights.lambda_g},
        {"lambda_v_start", c.weights.lambda_v_start},
        {"lambda_v_end", c.weights.lambda_v_end}}},
      {"trainer",
       {{"sessions", c.sessions},
        {"episodes_per_session", c.episodes_per_session},
        {"epochs", c.fit.epochs},
        {"batch_size", c.fit.batch_size},
        {"learning_rate", c.fit.adam.learning_rate},
        {"schedule", trainer::to_string(c.schedule)},
        {"lambda_v_total_steps", c.lambda_v_total_steps}}},
      {"eval",
       {{"sessions", c.eval_sessions},
        {"episodes", c.eval_episodes},
        {"full_scale_sessions", c.eval_sessions_full},
        {"full_scale_episodes", c.eval_episodes_full},
        {"scenarios", scen},
        {"noise_sigma", c.noise_sigma},
        {"drop_prob", c.drop_prob},
        {"lambda_v_aware", c.lambda_v_aware}}},
      {"toy1d",
       {{"samples", c.toy1d.samples},
        {"obstacle_distance", c.toy1d.obstacle_distance},
        {"radius_sum", c.toy1d.radius_sum},
        {"grid", c.toy1d.grid},
        {"epochs", c.toy1d.fit.epochs},
        {"batch_size", c.toy1d.fit.batch_size},
        {"learning_rate", c.toy1d.fit.adam.learning_rate},
        {"network", detail::network_json(c.toy1d.network)},
        {"ensemble", detail::ensemble_json(c.toy1d.ensemble)}}},
  };
}

inline json parse_json_text(const std::string& text, const std::string& origin) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(origin + ": invalid JSON: " + e.what());
  }
}

inline RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return config_from_json(parse_json_text(ss.str(), path.string()));
}

inline void write_json(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << j.dump(2) << "\n";
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

}  // namespace uacoll::io
