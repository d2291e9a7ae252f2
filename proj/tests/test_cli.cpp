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
#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "uacoll/cli/commands.hpp"

namespace uacoll::cli {
namespace {

namespace fs = std::filesystem;

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "uacoll");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("uacoll_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path write_config(const std::string& name, const std::string& text) {
    const auto p = dir_ / name;
    std::ofstream(p) << text;
    return p;
  }

  fs::path minimal_config() {
    return write_config("minimal.json", R"({
      "env": {"dt": 0.25, "timeout_steps": 20},
      "network": {"lstm_hidden": 4},
      "ensemble": {"members": 2, "dropout_passes": 3},
      "trainer": {"sessions": 2, "episodes_per_session": 2, "epochs": 1},
      "eval": {"sessions": 1, "episodes": 2, "scenarios": ["none", "drop"]},
      "toy1d": {"samples": 100, "grid": 7, "epochs": 3, "ensemble": {"members": 2, "dropout_passes": 4}}
    })");
  }

  fs::path dir_;
};

TEST_F(CliTest, MissingConfigFileNamesPath) {
  const auto missing = (dir_ / "nope.json").string();
  const auto r = run_cli({"train", "--config", missing});
  EXPECT_EQ(r.code, kExitIo);
  EXPECT_NE(r.err.find(missing), std::string::npos);
}

TEST_F(CliTest, UnknownKeyIsConfigErrorNamingKey) {
  const auto cfg = write_config("bad.json", R"({"trainer": {"sessions": 2, "epoks": 3}})");
  const auto r = run_cli({"train", "--config", cfg.string(), "--out", (dir_ / "o").string()});
  EXPECT_EQ(r.code, kExitConfig);
  EXPECT_NE(r.err.find("trainer.epoks"), std::string::npos);
  EXPECT_FALSE(fs::exists(dir_ / "o"));
}

TEST_F(CliTest, WrongTypeAndBadValuesAreConfigErrors) {
  EXPECT_EQ(run_cli({"train", "--config", write_config("a.json", R"({"env": {"dt": "fast"}})").string()}).code, kExitConfig);
  EXPECT_EQ(run_cli({"train", "--config", write_config("b.json", R"({"env": {"dt": -1}})").string()}).code, kExitConfig);
  EXPECT_EQ(run_cli({"train", "--config", write_config("c.json", R"({"eval": {"scenarios": ["fog"]}})").string()}).code,
            kExitConfig);
  EXPECT_EQ(run_cli({"train", "--config", write_config("d.json", "{not json").string()}).code, kExitConfig);
  EXPECT_EQ(run_cli({"train", "--threads", "0"}).code, kExitConfig);
  EXPECT_EQ(run_cli({"fly"}).code, kExitConfig);
}

TEST_F(CliTest, ConfigEchoRoundTrips) {
  const auto c = io::load_config(minimal_config());
  const auto j = io::config_to_json(c);
  EXPECT_EQ(io::config_to_json(io::config_from_json(j)), j);
  EXPECT_EQ(j.at("trainer").at("sessions"), 2);
  EXPECT_EQ(j.at("eval").at("scenarios").size(), 2u);
}

TEST_F(CliTest, TrainWritesCheckpointAndIsDeterministic) {
  const auto cfg = minimal_config().string();
  const auto a = run_cli({"train", "--config", cfg, "--out", (dir_ / "a").string(), "--threads", "1"});
  ASSERT_EQ(a.code, kExitOk) << a.err;
  EXPECT_TRUE(fs::exists(dir_ / "a" / "checkpoint" / "manifest.json"));
  EXPECT_TRUE(fs::exists(dir_ / "a" / "config.json"));
  EXPECT_TRUE(fs::exists(dir_ / "a" / "dataset.bin"));
  const auto b = run_cli({"train", "--config", cfg, "--out", (dir_ / "b").string(), "--threads", "4"});
  ASSERT_EQ(b.code, kExitOk) << b.err;
  EXPECT_EQ(slurp(dir_ / "a" / "metrics.csv"), slurp(dir_ / "b" / "metrics.csv"));
  const auto c = run_cli({"train", "--config", cfg, "--out", (dir_ / "c").string(), "--seed", "2"});
  ASSERT_EQ(c.code, kExitOk) << c.err;
  EXPECT_NE(slurp(dir_ / "a" / "metrics.csv"), slurp(dir_ / "c" / "metrics.csv"));
  EXPECT_EQ(io::load_config(dir_ / "c" / "config.json").seed, 2u);
}

TEST_F(CliTest, EvalWritesReportWithRequestedScenarios) {
  const auto cfg = minimal_config().string();
  ASSERT_EQ(run_cli({"train", "--config", cfg, "--out", (dir_ / "t").string()}).code, kExitOk);
  const auto r = run_cli({"eval", "--config", cfg, "--checkpoint", (dir_ / "t" / "checkpoint").string(), "--out",
                          (dir_ / "e").string()});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  std::stringstream csv(slurp(dir_ / "e" / "report.csv"));
  std::string line;
  std::vector<std::string> lines;
  while (std::getline(csv, line)) lines.push_back(line);
  ASSERT_EQ(lines.size(), 3u);
  EXPECT_EQ(lines[0], "model,scenario,unc_mean,unc_std,collision_rate,episodes,sessions");
  EXPECT_EQ(lines[1].rfind("aware,none,", 0), 0u);
  EXPECT_EQ(lines[2].rfind("aware,drop,", 0), 0u);
  EXPECT_TRUE(fs::exists(dir_ / "e" / "traces" / "aware_drop.csv"));
}

TEST_F(CliTest, EvalRejectsCorruptOrMissingCheckpoint) {
  const auto cfg = minimal_config().string();
  EXPECT_EQ(run_cli({"eval", "--config", cfg, "--out", (dir_ / "e").string()}).code, kExitConfig);
  EXPECT_EQ(run_cli({"eval", "--config", cfg, "--checkpoint", (dir_ / "none").string()}).code, kExitIo);
  ASSERT_EQ(run_cli({"train", "--config", cfg, "--out", (dir_ / "t").string()}).code, kExitOk);
  const auto ck = dir_ / "t" / "checkpoint";
  std::ofstream(ck / "manifest.json") << "{\"format\": \"something-else\", \"version\": 1}";
  EXPECT_EQ(run_cli({"eval", "--config", cfg, "--checkpoint", ck.string(), "--out", (dir_ / "e").string()}).code, kExitIo);
  std::ofstream(ck / "manifest.json") << "garbage";
  EXPECT_EQ(run_cli({"eval", "--config", cfg, "--checkpoint", ck.string(), "--out", (dir_ / "e").string()}).code, kExitIo);
}

TEST_F(CliTest, EvalRejectsHistoryLengthMismatch) {
  const auto cfg = minimal_config().string();
  ASSERT_EQ(run_cli({"train", "--config", cfg, "--out", (dir_ / "t").string()}).code, kExitOk);
  const auto other = write_config("l4.json", R"({"network": {"history_length": 4}})");
  const auto r = run_cli({"eval", "--config", other.string(), "--checkpoint", (dir_ / "t" / "checkpoint").string(),
                          "--out", (dir_ / "e").string()});
  EXPECT_EQ(r.code, kExitIo);
  EXPECT_NE(r.err.find("history_length"), std::string::npos);
}

TEST_F(CliTest, Toy1dGridCoversBothSidesAndIsDeterministic) {
  const auto cfg = minimal_config().string();
  ASSERT_EQ(run_cli({"toy1d", "--config", cfg, "--out", (dir_ / "y1").string()}).code, kExitOk);
  ASSERT_EQ(run_cli({"toy1d", "--config", cfg, "--out", (dir_ / "y2").string()}).code, kExitOk);
  const auto text = slurp(dir_ / "y1" / "toy1d_grid.csv");
  EXPECT_EQ(text, slurp(dir_ / "y2" / "toy1d_grid.csv"));
  std::stringstream csv(text);
  std::string line;
  std::getline(csv, line);
  EXPECT_EQ(line, "side,agent_heading,obstacle_heading,mean,variance,label");
  int trained = 0, unseen = 0;
  while (std::getline(csv, line)) {
    const bool is_trained = line.rfind("trained,", 0) == 0;
    (is_trained ? trained : unseen) += 1;
    const auto c1 = line.find(',');
    const auto c2 = line.find(',', c1 + 1);
    const double beta = std::stod(line.substr(c2 + 1));
    EXPECT_EQ(is_trained, beta > 0.0);
  }
  EXPECT_EQ(trained, 7 * 7);
  EXPECT_EQ(unseen, 7 * 7);
}

TEST_F(CliTest, CompareReusesCheckpoints) {
  const auto cfg = minimal_config().string();
  const auto first = run_cli({"compare", "--config", cfg, "--out", (dir_ / "c1").string()});
  ASSERT_EQ(first.code, kExitOk) << first.err;
  EXPECT_TRUE(fs::exists(dir_ / "c1" / "aware" / "checkpoint" / "manifest.json"));
  EXPECT_TRUE(fs::exists(dir_ / "c1" / "unaware" / "metrics.csv"));
  const auto second = run_cli({"compare", "--config", cfg, "--checkpoint", (dir_ / "c1").string(), "--out",
                               (dir_ / "c2").string()});
  ASSERT_EQ(second.code, kExitOk) << second.err;
  EXPECT_EQ(slurp(dir_ / "c1" / "report.csv"), slurp(dir_ / "c2" / "report.csv"));
  EXPECT_FALSE(fs::exists(dir_ / "c2" / "aware"));
}

}  // namespace
}  // namespace uacoll::cli
