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
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "uacoll/core/errors.hpp"
#include "uacoll/env/trace.hpp"

namespace uacoll::eval {

struct UncertaintySummary {
  double mean = 0.0;
  double std = 0.0;  // population std across sessions
};

/// Per step: sum of the primitive variances. Per session: the average of that
/// over every step of every episode. Returned: mean and population std of the
/// per-session values.
inline UncertaintySummary aggregate_uncertainty(std::span<const env::EpisodeTrace> traces) {
  std::map<int, std::pair<double, long>> per_session;
  for (const auto& t : traces) {
    auto& acc = per_session[t.session];
    for (const auto& r : t.rows) {
      double u = 0.0;
      for (double v : r.variance) u += v;
      acc.first += u;
      ++acc.second;
    }
  }
  std::vector<double> values;
  for (const auto& [session, acc] : per_session)
    if (acc.second > 0) values.push_back(acc.first / static_cast<double>(acc.second));
  if (values.empty()) throw ConfigError("aggregate_uncertainty needs at least one logged step");
  UncertaintySummary s;
  for (double v : values) s.mean += v;
  s.mean /= static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - s.mean) * (v - s.mean);
  s.std = std::sqrt(ss / static_cast<double>(values.size()));
  return s;
}

inline double collision_rate(std::span<const env::EpisodeTrace> traces) {
  if (traces.empty()) throw ConfigError("collision_rate needs at least one episode");
  int collided = 0;
  for (const auto& t : traces) collided += t.collided() ? 1 : 0;
  return static_cast<double>(collided) / static_cast<double>(traces.size());
}

inline int session_count(std::span<const env::EpisodeTrace> traces) {
  std::map<int, int> seen;
  for (const auto& t : traces) seen[t.session] = 1;
  return static_cast<int>(seen.size());
}

struct ScenarioReport {
  std::string model;
  std::string scenario;
  double unc_mean = 0.0;
  double unc_std = 0.0;
  double collision_rate = 0.0;
  int episodes = 0;
  int sessions = 0;
};

/// Builds a report purely from logged traces.
inline ScenarioReport make_report(const std::string& model, const std::string& scenario,
                                  std::span<const env::EpisodeTrace> traces) {
  const auto unc = aggregate_uncertainty(traces);
  return {model, scenario, unc.mean, unc.std, collision_rate(traces), static_cast<int>(traces.size()),
          session_count(traces)};
}

inline constexpr const char* kReportHeader = "model,scenario,unc_mean,unc_std,collision_rate,episodes,sessions";

inline std::string report_csv(const std::vector<ScenarioReport>& reports) {
  std::string out = std::string(kReportHeader) + "\n";
  char buf[256];
  for (const auto& r : reports) {
    std::snprintf(buf, sizeof buf, "%s,%s,%.17g,%.17g,%.17g,%d,%d\n", r.model.c_str(), r.scenario.c_str(), r.unc_mean,
                  r.unc_std, r.collision_rate, r.episodes, r.sessions);
    out += buf;
  }
  return out;
}

inline void write_report_csv(const std::filesystem::path& path, const std::vector<ScenarioReport>& reports) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << report_csv(reports);
  if (!out) throw IoError("failed writing " + path.string());
}

inline std::string format_report_table(const std::vector<ScenarioReport>& reports) {
  std::string out;
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-10s %-10s %12s %12s %10s %9s %9s\n", "model", "scenario", "E(Var)", "sigma(Var)",
                "coll.rate", "episodes", "sessions");
  out += buf;
  for (const auto& r : reports) {
    std::snprintf(buf, sizeof buf, "%-10s %-10s %12.5f %12.5f %10.3f %9d %9d\n", r.model.c_str(), r.scenario.c_str(),
                  r.unc_mean, r.unc_std, r.collision_rate, r.episodes, r.sessions);
    out += buf;
  }
  return out;
}

}  // namespace uacoll::eval
