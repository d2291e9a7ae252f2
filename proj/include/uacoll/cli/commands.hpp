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

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "uacoll/core/errors.hpp"
#include "uacoll/core/parallel.hpp"
#include "uacoll/ensemble/ensemble.hpp"
#include "uacoll/env/trace.hpp"
#include "uacoll/eval/harness.hpp"
#include "uacoll/eval/report.hpp"
#include "uacoll/io/config.hpp"
#include "uacoll/policy/features.hpp"
#include "uacoll/trainer/dataset.hpp"
#include "uacoll/trainer/loop.hpp"
#include "uacoll/trainer/toy1d.hpp"

namespace uacoll::cli {

namespace fs = std::filesystem;

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitIo = 3;
inline constexpr int kExitNumeric = 4;

/// Flags shared by every command.
struct Options {
  std::string config_path;
  std::string checkpoint;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  int threads = default_thread_count();
  bool full_scale = false;
};

/// Config file (or defaults) with command-line overrides applied.
inline io::RunConfig resolve_config(const Options& o) {
  io::RunConfig c = o.config_path.empty() ? io::config_from_json(nlohmann::json::object()) : io::load_config(o.config_path);
  if (o.seed) c.seed = *o.seed;
  if (!o.out_dir.empty()) c.output_dir = o.out_dir;
  if (o.threads < 1) throw ConfigError("--threads must be >= 1");
  return c;
}

inline fs::path prepare_output(const io::RunConfig& c) {
  const fs::path dir(c.output_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError("cannot create output directory '" + dir.string() + "'");
  io::write_json(dir / "config.json", io::config_to_json(c));
  return dir;
}

inline void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

inline trainer::AgentPolicy agent_policy(const io::RunConfig& c) {
  return {policy::primitive_set(c.env.agent_speed), c.weights, c.history_length};
}

/// Trains one model into `dir`: checkpoint/, metrics.csv, dataset.bin(+json).
inline trainer::TrainResult train_into(const io::RunConfig& c, trainer::ScheduleMode mode, const fs::path& dir,
                                       int threads, std::ostream& out) {
  auto tc = c.train_config(threads);
  tc.schedule = mode;
  out << "training " << (mode == trainer::ScheduleMode::kZero ? "unaware" : "aware") << " model ("
      << trainer::to_string(mode) << ", " << tc.sessions << " sessions x " << tc.episodes_per_session
      << " episodes)\n";
  auto res = trainer::train_loop(tc);
  fs::create_directories(dir);
  const nlohmann::json extra = {{"schedule", trainer::to_string(mode)},
                                {"uncertainty_aware", mode != trainer::ScheduleMode::kZero},
                                {"history_length", tc.history_length},
                                {"feature_width", policy::kFeatureWidth},
                                {"seed", tc.seed}};
  save_ensemble(res.ensemble, dir / "checkpoint", extra);
  trainer::write_metrics_csv(dir / "metrics.csv", res.metrics);
  trainer::save_dataset(res.dataset, dir / "dataset");
  for (const auto& m : res.metrics) {
    char line[160];
    std::snprintf(line, sizeof line, "  session %2d  collisions %2d/%-3d  unc %.4f  lambda_v %.1f  loss %.4f\n",
                  m.session, m.collisions, m.episodes, m.mean_uncertainty, m.lambda_v_last, m.train_loss);
    out << line;
  }
  return res;
}

/// Loads a checkpoint and checks it fits the configured network inputs.
inline LoadedEnsemble load_checked(const fs::path& dir, const io::RunConfig& c) {
  auto loaded = load_ensemble(dir);
  const auto& spec = loaded.ensemble.members.front().spec;
  if (spec.input != policy::kFeatureWidth)
    throw IoError(dir.string() + ": checkpoint input width " + std::to_string(spec.input) + " does not match " +
                  std::to_string(policy::kFeatureWidth));
  const int l = loaded.extra.value("history_length", c.history_length);
  if (l != c.history_length)
    throw IoError(dir.string() + ": checkpoint history_length " + std::to_string(l) + " differs from config " +
                  std::to_string(c.history_length));
  return loaded;
}

inline void write_comparison(const fs::path& dir, const eval::Comparison& cmp, std::ostream& out) {
  eval::write_report_csv(dir / "report.csv", cmp.reports);
  fs::create_directories(dir / "traces");
  for (const auto& run : cmp.runs) env::write_traces_csv(dir / "traces" / (run.model + "_" + run.scenario + ".csv"), run.traces);
  out << eval::format_report_table(cmp.reports);
}

inline int cmd_train(const Options& o, std::ostream& out) {
  const auto c = resolve_config(o);
  const auto dir = prepare_output(c);
  train_into(c, c.schedule, dir, o.threads, out);
  out << "wrote " << (dir / "checkpoint").string() << "\n";
  return kExitOk;
}

inline int cmd_evaluate(const Options& o, std::ostream& out) {
  const auto c = resolve_config(o);
  if (o.checkpoint.empty()) throw ConfigError("eval needs --checkpoint DIR");
  const auto loaded = load_checked(o.checkpoint, c);
  const auto dir = prepare_output(c);
  const bool aware = loaded.extra.value("uncertainty_aware", true);
  const auto ec = c.eval_config(o.threads, o.full_scale);
  const auto cmp = eval::evaluate_models({{aware ? "aware" : "unaware", &loaded.ensemble, aware ? ec.lambda_v_aware : 0.0}},
                                         agent_policy(c), ec);
  write_comparison(dir, cmp, out);
  return kExitOk;
}

inline int cmd_compare(const Options& o, std::ostream& out) {
  const auto c = resolve_config(o);
  const auto dir = prepare_output(c);
  Ensemble aware, unaware;
  if (!o.checkpoint.empty()) {
    aware = load_checked(fs::path(o.checkpoint) / "aware" / "checkpoint", c).ensemble;
    unaware = load_checked(fs::path(o.checkpoint) / "unaware" / "checkpoint", c).ensemble;
  } else {
    aware = train_into(c, c.schedule == trainer::ScheduleMode::kZero ? trainer::ScheduleMode::kIncreasing : c.schedule,
                       dir / "aware", o.threads, out)
                .ensemble;
    unaware = train_into(c, trainer::ScheduleMode::kZero, dir / "unaware", o.threads, out).ensemble;
  }
  const auto cmp = eval::compare_models(aware, unaware, agent_policy(c), c.eval_config(o.threads, o.full_scale));
  write_comparison(dir, cmp, out);
  return kExitOk;
}

inline int cmd_toy1d(const Options& o, std::ostream& out) {
  const auto c = resolve_config(o);
  const auto dir = prepare_output(c);
  const auto res = trainer::run_toy1d(c.toy1d_config(o.threads));
  std::string csv = "side,agent_heading,obstacle_heading,mean,variance,label\n";
  for (const auto& p : res.grid) {
    csv += p.trained_side ? "trained," : "unseen,";
    for (double v : {p.agent_heading, p.obstacle_heading, p.mean, p.variance}) {
      env::detail::put_real(csv, v);
      csv += ",";
    }
    csv += std::to_string(p.label) + "\n";
  }
  write_text(dir / "toy1d_grid.csv", csv);
  const double ratio = res.trained_variance > 0.0 ? res.unseen_variance / res.trained_variance : 0.0;
  io::write_json(dir / "toy1d_summary.json", {{"grid", c.toy1d.grid},
                                              {"trained_accuracy", res.trained_accuracy},
                                              {"trained_variance", res.trained_variance},
                                              {"unseen_variance", res.unseen_variance},
                                              {"variance_ratio", ratio}});
  char line[200];
  std::snprintf(line, sizeof line, "trained accuracy %.3f  variance trained %.5f  unseen %.5f  ratio %.2f\n",
                res.trained_accuracy, res.trained_variance, res.unseen_variance, ratio);
  out << line;
  return kExitOk;
}

/// Full command line entry point. Never throws.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Uncertainty-aware collision avoidance: train, evaluate and compare ensembles"};
  app.require_subcommand(1);
  Options o;
  std::uint64_t seed = 0;

  auto add_common = [&](CLI::App* sub, bool checkpoint, bool full_scale) {
    sub->add_option("--config", o.config_path, "JSON run configuration");
    sub->add_option("--out", o.out_dir, "output directory (overrides output_dir)");
    sub->add_option("--seed", seed, "root seed (overrides seed)");
    sub->add_option("--threads", o.threads, "worker threads")->check(CLI::PositiveNumber);
    if (checkpoint) sub->add_option("--checkpoint", o.checkpoint, "checkpoint directory");
    if (full_scale) sub->add_flag("--full-scale", o.full_scale, "evaluate with the full session/episode counts");
  };
  auto* train = app.add_subcommand("train", "run the observe-act-train loop");
  add_common(train, false, false);
  auto* ev = app.add_subcommand("eval", "evaluate one checkpoint under every scenario");
  add_common(ev, true, true);
  auto* toy = app.add_subcommand("toy1d", "regional novelty toy experiment");
  add_common(toy, false, false);
  auto* cmp = app.add_subcommand("compare", "train or load aware/unaware models and compare them");
  add_common(cmp, true, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }
  for (auto* sub : {train, ev, toy, cmp})
    if (sub->count("--seed") > 0) o.seed = seed;

  try {
    if (*train) return cmd_train(o, out);
    if (*ev) return cmd_evaluate(o, out);
    if (*toy) return cmd_toy1d(o, out);
    return cmd_compare(o, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const IoError& e) {
    err << "I/O error: " << e.what() << "\n";
    return kExitIo;
  } catch (const NumericError& e) {
    err << "numeric failure: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace uacoll::cli
