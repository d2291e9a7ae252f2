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
// Acceptance suite: one PASS/FAIL line per criterion. Run all criteria, or a
// subset by number, e.g. `test_acceptance 1 8 9`.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "support/nn_oracles.hpp"
#include "uacoll/cli/commands.hpp"
#include "uacoll/eval/harness.hpp"
#include "uacoll/io/config.hpp"
#include "uacoll/policy/mpc.hpp"
#include "uacoll/trainer/loop.hpp"
#include "uacoll/trainer/toy1d.hpp"

namespace {

using namespace uacoll;

constexpr int kSeeds = 5;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char b[64];
  std::snprintf(b, sizeof b, f, a);
  return b;
}

// 1. Analytic gradients vs central differences on >= 20 small networks.
Outcome gradient_correctness() {
  Rng rng(2024);
  const std::vector<nn::LayerSpec> shapes = {{3, 4, {}, nn::Activation::kTanh},  {2, 5, {3}, nn::Activation::kRelu},
                                             {4, 3, {4}, nn::Activation::kTanh}, {3, 0, {6, 4}, nn::Activation::kTanh},
                                             {5, 0, {8}, nn::Activation::kRelu}};
  double worst = 0.0;
  int nets = 0;
  std::size_t max_params = 0;
  for (int k = 0; k < 24; ++k) {
    const auto& spec = shapes[static_cast<std::size_t>(k) % shapes.size()];
    const auto p = testing::random_network(spec, 100 + static_cast<std::uint64_t>(k));
    max_params = std::max(max_params, nn::parameter_count(p));
    const auto batch = testing::random_batch(rng, spec.input, 3, 4);
    std::vector<nn::DropoutMask> masks;
    for (int b = 0; b < 3; ++b) masks.push_back(nn::sample_dropout_mask(p, k % 2 ? 0.7 : 1.0, rng));
    const auto analytic = testing::flatten(nn::backward(p, std::span<const nn::SequenceExample>(batch), masks).gradient);
    const auto numeric = testing::finite_difference_gradient(p, batch, masks);
    for (std::size_t i = 0; i < analytic.size(); ++i) worst = std::max(worst, testing::relative_error(analytic[i], numeric[i]));
    ++nets;
  }
  return {nets >= 20 && max_params <= 200 && worst <= 1e-4,
          std::to_string(nets) + " nets (<= " + std::to_string(max_params) + " params), max rel err " +
              fmt("%.2e", worst) + " (tol 1e-4)"};
}

// 2. One member with keep probability 1 has exactly zero variance.
Outcome variance_degeneracy() {
  const auto e = make_ensemble({1, 20, 1.0}, {policy::kFeatureWidth, 16, {}, nn::Activation::kTanh}, 5);
  Rng rng(6);
  int zero = 0;
  for (int i = 0; i < 100; ++i) {
    const int len = 1 + static_cast<int>(uniform_index(rng, 8));
    nn::Matrix prefix(len - 1, policy::kFeatureWidth);
    nn::Vector cand(policy::kFeatureWidth);
    for (int r = 0; r < prefix.rows(); ++r)
      for (int c = 0; c < prefix.cols(); ++c) prefix(r, c) = uniform(rng, -2, 2);
    for (int c = 0; c < cand.size(); ++c) cand(c) = uniform(rng, -2, 2);
    zero += predict_distribution(e, prefix, cand, static_cast<std::uint64_t>(i)).variance == 0.0 ? 1 : 0;
  }
  return {zero == 100, std::to_string(zero) + "/100 inputs with variance exactly 0"};
}

// 3. n_b = 5, n_d = 20 gives 100 samples per primitive per step.
Outcome sample_count() {
  const auto e = make_ensemble({5, 20, 0.7}, {policy::kFeatureWidth, 16, {}, nn::Activation::kTanh}, 3);
  env::ScenarioConfig sc;
  bool ok = true;
  int steps = 0;
  for (std::uint64_t ep = 0; ep < 3; ++ep) {
    Rng rng = make_rng(1, "env", ep);
    auto start = env::reset(sc, rng);
    policy::FeatureHistory h(8);
    env::Observation obs = start.observation;
    while (!start.world.done && steps < 60) {
      const auto prims = policy::primitive_set();
      const auto c = policy::select_action(e, h, obs, start.world.agent, prims, sc.dt, {}, 200.0, ep * 1000 + steps);
      ok = ok && c.distributions.size() == 11;
      for (const auto& d : c.distributions) ok = ok && d.samples.size() == 100;
      h.push(policy::encode_step(obs, policy::primitive_heading(prims[c.index], start.world.agent.heading)));
      obs = env::step(start.world, policy::primitive_velocity(prims[c.index], start.world.agent.heading)).observation;
      ++steps;
    }
  }
  return {ok, std::to_string(steps) + " steps, every primitive had exactly 100 samples: " + (ok ? "yes" : "no")};
}

// 4. Toy regional novelty, 5 seeds.
Outcome toy1d_novelty() {
  double trained = 0.0, unseen = 0.0, acc = 0.0, min_acc = 1.0;
  for (int s = 1; s <= kSeeds; ++s) {
    trainer::Toy1dConfig c;
    c.seed = static_cast<std::uint64_t>(s);
    const auto r = trainer::run_toy1d(c);
    trained += r.trained_variance / kSeeds;
    unseen += r.unseen_variance / kSeeds;
    acc += r.trained_accuracy / kSeeds;
    min_acc = std::min(min_acc, r.trained_accuracy);
  }
  const double ratio = unseen / trained;
  return {ratio >= 1.5 && acc >= 0.9,
          "unseen/trained variance " + fmt("%.2f", ratio) + " (need >= 1.5), trained-side accuracy " + fmt("%.3f", acc) +
              " (min seed " + fmt("%.3f", min_acc) + ", need >= 0.9)"};
}

// Shared by criteria 5 and 6: aware and unaware models per seed, evaluated
// under every scenario with common random numbers.
struct SeedComparison {
  std::map<std::string, double> aware_unc, aware_coll, unaware_unc, unaware_coll;
};

const std::vector<SeedComparison>& compare_runs() {
  static std::vector<SeedComparison> runs = [] {
    std::vector<SeedComparison> out;
    for (int s = 1; s <= kSeeds; ++s) {
      io::RunConfig rc = io::config_from_json(nlohmann::json::object());
      rc.seed = static_cast<std::uint64_t>(s);
      auto tc = rc.train_config(1);
      tc.schedule = trainer::ScheduleMode::kIncreasing;
      const auto aware = trainer::train_loop(tc).ensemble;
      tc.schedule = trainer::ScheduleMode::kZero;
      const auto unaware = trainer::train_loop(tc).ensemble;
      const auto cmp = eval::compare_models(aware, unaware, cli::agent_policy(rc), rc.eval_config(1, false));
      SeedComparison sc;
      for (const auto& r : cmp.reports) {
        (r.model == "aware" ? sc.aware_unc : sc.unaware_unc)[r.scenario] = r.unc_mean;
        (r.model == "aware" ? sc.aware_coll : sc.unaware_coll)[r.scenario] = r.collision_rate;
      }
      std::printf("       seed %d:", s);
      for (const auto& r : cmp.reports)
        std::printf(" %s/%s unc=%.4f coll=%.2f;", r.model.c_str(), r.scenario.c_str(), r.unc_mean, r.collision_rate);
      std::printf("\n");
      std::fflush(stdout);
      out.push_back(std::move(sc));
    }
    return out;
  }();
  return runs;
}

std::map<std::string, double> seed_average(std::map<std::string, double> SeedComparison::*field) {
  std::map<std::string, double> avg;
  for (const auto& r : compare_runs())
    for (const auto& [k, v] : r.*field) avg[k] += v / static_cast<double>(compare_runs().size());
  return avg;
}

const std::vector<std::string> kScenarios = {"none", "noise", "drop", "mask_vel", "mask_pos"};

// 5. Training-distribution uncertainty is the strict minimum (aware model).
Outcome table_ordering() {
  const auto unc = seed_average(&SeedComparison::aware_unc);
  bool ok = true;
  std::string d = "seed-avg E(Var):";
  for (const auto& s : kScenarios) {
    d += " " + s + "=" + fmt("%.4f", unc.at(s));
    if (s != "none") ok = ok && unc.at("none") < unc.at(s);
  }
  return {ok, d};
}

// 6. Aware collision rate <= unaware in noise, mask_pos, mask_vel; drop
// within +0.05.
Outcome safety_property() {
  const auto a = seed_average(&SeedComparison::aware_coll);
  const auto u = seed_average(&SeedComparison::unaware_coll);
  bool ok = true;
  std::string d = "seed-avg collision aware/unaware:";
  for (const auto& s : kScenarios) {
    d += " " + s + "=" + fmt("%.3f", a.at(s)) + "/" + fmt("%.3f", u.at(s));
    if (s == "noise" || s == "mask_pos" || s == "mask_vel") ok = ok && a.at(s) <= u.at(s);
    if (s == "drop") ok = ok && a.at(s) <= u.at(s) + 0.05;
  }
  return {ok, d};
}

// 7. Exploration: increasing vs constant lambda_v on near/far static layouts.
constexpr int kExploreSessions = 8;
constexpr int kExploreEpisodes = 10;

double final_collision_rate(double obstacle_x, double radius, double jitter, trainer::ScheduleMode mode, int seed) {
  io::RunConfig rc = io::config_from_json(nlohmann::json::object());
  rc.seed = static_cast<std::uint64_t>(seed);
  rc.sessions = kExploreSessions;
  rc.episodes_per_session = kExploreEpisodes;
  rc.env.layout = env::LayoutKind::kFixed;
  rc.env.obstacle_policy = env::ObstaclePolicy::kStatic;
  rc.env.obstacle_radius = radius;
  rc.env.fixed_obstacle_position = env::Vec2(obstacle_x, 0.0);
  rc.env.fixed_obstacle_goal = rc.env.fixed_obstacle_position;
  rc.env.fixed_jitter = jitter;
  auto tc = rc.train_config(1);
  tc.schedule = mode;
  return trainer::train_loop(tc).metrics.back().collision_rate;
}

Outcome exploration_property() {
  struct Layout {
    const char* name;
    double x, radius, jitter;
  };
  const Layout near{"near", 1.5, 0.5, 0.1}, far{"far", 4.0, 0.3, 0.6};
  std::map<std::string, double> avg;
  for (const auto& l : {near, far}) {
    for (auto mode : {trainer::ScheduleMode::kIncreasing, trainer::ScheduleMode::kConstant}) {
      const std::string key = std::string(l.name) + "/" + trainer::to_string(mode);
      std::printf("       %s:", key.c_str());
      for (int s = 1; s <= kSeeds; ++s) {
        const double r = final_collision_rate(l.x, l.radius, l.jitter, mode, s);
        std::printf(" %.2f", r);
        avg[key] += r / kSeeds;
      }
      std::printf("\n");
      std::fflush(stdout);
    }
  }
  const bool ok = avg["near/increasing"] < avg["near/constant"] && avg["far/increasing"] <= 0.1 &&
                  avg["far/constant"] <= 0.1;
  std::string d = "final-session collision rate, seed-avg:";
  for (const auto& [k, v] : avg) d += " " + k + "=" + fmt("%.3f", v);
  return {ok, d};
}

// 8. select_action vs exhaustive argmin, including the tie rule.
Outcome mpc_oracle() {
  const auto e = make_ensemble({5, 20, 0.7}, {policy::kFeatureWidth, 16, {}, nn::Activation::kTanh}, 77);
  const auto prims = policy::primitive_set();
  Rng rng(8);
  int agree = 0, ties = 0;
  const int trials = 1000;
  for (int t = 0; t < trials; ++t) {
    env::AgentState a;
    a.position = env::Vec2(uniform(rng, -3, 3), uniform(rng, -3, 3));
    a.heading = uniform(rng, -3.14, 3.14);
    a.goal = env::Vec2(uniform(rng, -6, 6), uniform(rng, -6, 6));
    policy::CostWeights w;
    w.lambda_c = uniform(rng, 1, 50);
    w.lambda_g = uniform(rng, 0.1, 5);
    const double lv = uniform(rng, -50000, 200);
    std::vector<double> costs(11);
    int chosen = 0;
    if (t % 4 == 3) {
      // Tie-heavy trial: integer costs straight into the selection rule.
      for (auto& c : costs) c = static_cast<double>(uniform_index(rng, 3));
      chosen = policy::argmin_cost(costs, prims);
      ++ties;
    } else {
      env::Observation obs;
      obs.obstacle_position = env::Vec2(uniform(rng, -4, 4), uniform(rng, -4, 4));
      obs.obstacle_velocity = env::Vec2(uniform(rng, -1, 1), uniform(rng, -1, 1));
      obs.obstacle_radius = 0.3;
      obs.relative_goal = a.goal - a.position;
      policy::FeatureHistory h(8);
      for (std::size_t k = 0; k < uniform_index(rng, 8); ++k) h.push(policy::encode_step(obs, uniform(rng, -1, 1)));
      const auto c = policy::select_action(e, h, obs, a, prims, 0.25, w, lv, static_cast<std::uint64_t>(t));
      chosen = c.index;
      for (int i = 0; i < 11; ++i) {
        const double hd = a.heading + prims[static_cast<std::size_t>(i)].heading_offset;
        const env::Vec2 end = a.position + 0.25 * env::Vec2(std::cos(hd), std::sin(hd));
        const auto& d = c.distributions[static_cast<std::size_t>(i)];
        costs[static_cast<std::size_t>(i)] = lv * d.variance + w.lambda_c * d.mean + w.lambda_g * (a.goal - end).norm();
      }
    }
    // Oracle: minimum cost; among equal costs the smallest |alpha|; then index.
    int best = 0;
    for (int i = 1; i < 11; ++i) {
      const double ci = costs[static_cast<std::size_t>(i)], cb = costs[static_cast<std::size_t>(best)];
      const double ai = std::abs(prims[static_cast<std::size_t>(i)].heading_offset);
      const double ab = std::abs(prims[static_cast<std::size_t>(best)].heading_offset);
      if (ci < cb - 1e-12 || (std::abs(ci - cb) <= 1e-12 && ai < ab - 1e-12)) best = i;
    }
    agree += chosen == best ? 1 : 0;
  }
  return {agree == trials, std::to_string(agree) + "/" + std::to_string(trials) + " agree (" + std::to_string(ties) +
                               " tie-heavy trials)"};
}

// 9. Schedule endpoints.
Outcome schedule_endpoints() {
  const long total = 12345;
  const double a = policy::lambda_v_schedule(0, total), b = policy::lambda_v_schedule(total, total);
  return {a == -50000.0 && b == 200.0, "lambda_v(0)=" + fmt("%g", a) + ", lambda_v(total)=" + fmt("%g", b)};
}

// 10. One selection step (11 x 100 passes, LSTM-16, l = 8) single-threaded.
Outcome performance() {
  const auto e = make_ensemble({5, 20, 0.7}, {policy::kFeatureWidth, 16, {}, nn::Activation::kTanh}, 1);
  env::Observation obs;
  obs.obstacle_position = env::Vec2(2, 1);
  obs.relative_goal = env::Vec2(6, 0);
  policy::FeatureHistory h(8);
  for (int i = 0; i < 7; ++i) h.push(policy::encode_step(obs, 0.1 * i));
  env::AgentState a;
  a.goal = env::Vec2(6, 0);
  const auto prims = policy::primitive_set();
  std::vector<double> ms;
  for (int r = 0; r < 40; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto c = policy::select_action(e, h, obs, a, prims, 0.25, {}, 200.0, static_cast<std::uint64_t>(r), 1);
    ms.push_back(std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count());
    if (c.distributions.front().samples.size() != 100) return {false, "wrong sample count"};
  }
  std::sort(ms.begin(), ms.end());
  const double median = ms[ms.size() / 2], worst = ms.back();
  return {median < 50.0, "median " + fmt("%.2f", median) + " ms, max " + fmt("%.2f", worst) + " ms (bound 50 ms)"};
}

// 11. cmd_train twice, --threads 1 and --threads 8, byte-identical metrics.
Outcome determinism() {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "uacoll_acceptance_determinism";
  fs::remove_all(dir);
  fs::create_directories(dir);
  std::ofstream(dir / "config.json") << R"({"seed": 3, "trainer": {"sessions": 3, "episodes_per_session": 6}})";
  auto run = [&](const std::string& out, const std::string& threads) {
    const std::string cfg = (dir / "config.json").string(), o = (dir / out).string();
    const char* argv[] = {"uacoll", "train", "--config", cfg.c_str(), "--out", o.c_str(), "--threads", threads.c_str()};
    std::ostringstream sink;
    return cli::run(8, argv, sink, sink);
  };
  auto slurp = [&](const std::string& out) {
    std::ifstream in(dir / out / "metrics.csv", std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  const int c1 = run("t1", "1"), c2 = run("t1b", "1"), c3 = run("t8", "8");
  const std::string m1 = slurp("t1"), m2 = slurp("t1b"), m8 = slurp("t8");
  fs::remove_all(dir);
  const bool ok = c1 == 0 && c2 == 0 && c3 == 0 && !m1.empty() && m1 == m2 && m1 == m8;
  return {ok, "metrics.csv " + std::to_string(m1.size()) + " bytes; repeat identical: " + (m1 == m2 ? "yes" : "no") +
                  ", threads 1 vs 8 identical: " + (m1 == m8 ? "yes" : "no")};
}

struct Criterion {
  int id;
  const char* name;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all = {
      {1, "gradient correctness", gradient_correctness},
      {2, "variance degeneracy", variance_degeneracy},
      {3, "sample-count contract", sample_count},
      {4, "toy1d regional novelty", toy1d_novelty},
      {5, "uncertainty ordering (training distribution lowest)", table_ordering},
      {6, "safety: aware collisions <= unaware", safety_property},
      {7, "exploration: increasing vs constant lambda_v", exploration_property},
      {8, "MPC oracle equivalence", mpc_oracle},
      {9, "schedule endpoints", schedule_endpoints},
      {10, "selection step performance", performance},
      {11, "train determinism across runs and threads", determinism},
  };
  // Criterion numbers select a subset; --known-fail=N reports N's FAIL line
  // but leaves the exit code alone.
  std::set<int> only, known;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a.rfind("--known-fail=", 0) == 0)
      known.insert(std::atoi(a.c_str() + 13));
    else
      only.insert(std::atoi(a.c_str()));
  }
  int failed = 0, known_failed = 0;
  for (const auto& c : all) {
    if (!only.empty() && !only.count(c.id)) continue;
    std::printf("  ...  C%-2d %s\n", c.id, c.name);
    std::fflush(stdout);
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool tolerated = !o.pass && known.count(c.id);
    std::printf("[%s] C%-2d %s: %s (%.1f s)%s\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(), sec,
                tolerated ? " [known shortfall]" : "");
    std::fflush(stdout);
    (tolerated ? known_failed : failed) += o.pass ? 0 : 1;
  }
  std::printf("%s: %d criterion(s) failed, %d known shortfall(s)\n", failed == 0 ? "ACCEPTANCE PASSED" : "ACCEPTANCE FAILED",
              failed, known_failed);
  return failed == 0 ? 0 : 1;
}
