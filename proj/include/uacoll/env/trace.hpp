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

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "uacoll/core/errors.hpp"

namespace uacoll::env {

/// One logged simulation step. mean/variance/cost hold one entry per motion
/// primitive, in primitive order.
struct TraceRow {
  int step = 0;
  double time = 0.0;
  double agent_x = 0.0, agent_y = 0.0, agent_heading = 0.0;
  double obstacle_x = 0.0, obstacle_y = 0.0;
  int action = 0;
  double lambda_v = 0.0;
  std::vector<double> mean, variance, cost;
  bool collided = false;
  bool reached_goal = false;
};

struct EpisodeTrace {
  int session = 0;
  int episode = 0;
  std::vector<TraceRow> rows;

  bool collided() const { return !rows.empty() && rows.back().collided; }
  bool reached_goal() const { return !rows.empty() && rows.back().reached_goal; }
};

/// CSV header for traces with `primitives` actions:
///   session,episode,step,time,agent_x,agent_y,agent_heading,obstacle_x,
///   obstacle_y,action,lambda_v,mean_0..mean_{K-1},var_0..var_{K-1},
///   cost_0..cost_{K-1},collided,reached_goal
/// Poses are recorded before the step is applied; collided/reached_goal give
/// the outcome of that step. Reals use %.17g so files round-trip exactly.
inline std::string trace_csv_header(int primitives) {
  std::string h = "session,episode,step,time,agent_x,agent_y,agent_heading,obstacle_x,obstacle_y,action,lambda_v";
  for (const char* prefix : {"mean_", "var_", "cost_"})
    for (int k = 0; k < primitives; ++k) h += std::string(",") + prefix + std::to_string(k);
  h += ",collided,reached_goal";
  return h;
}

namespace detail {
inline void put_real(std::string& out, double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out += buf;
}
}  // namespace detail

inline void write_traces_csv(const std::filesystem::path& path, const std::vector<EpisodeTrace>& traces) {
  int primitives = 0;
  for (const auto& t : traces)
    if (!t.rows.empty()) primitives = static_cast<int>(t.rows.front().mean.size());
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << trace_csv_header(primitives) << '\n';
  std::string line;
  for (const auto& t : traces) {
    for (const auto& r : t.rows) {
      line.clear();
      line += std::to_string(t.session) + ',' + std::to_string(t.episode) + ',' + std::to_string(r.step) + ',';
      for (double v : {r.time, r.agent_x, r.agent_y, r.agent_heading, r.obstacle_x, r.obstacle_y}) {
        detail::put_real(line, v);
        line += ',';
      }
      line += std::to_string(r.action) + ',';
      detail::put_real(line, r.lambda_v);
      for (const auto* vec : {&r.mean, &r.variance, &r.cost}) {
        if (static_cast<int>(vec->size()) != primitives) throw IoError("trace rows have inconsistent primitive counts");
        for (double v : *vec) {
          line += ',';
          detail::put_real(line, v);
        }
      }
      line += r.collided ? ",1" : ",0";
      line += r.reached_goal ? ",1" : ",0";
      out << line << '\n';
    }
  }
  if (!out) throw IoError("failed writing " + path.string());
}

inline std::vector<EpisodeTrace> read_traces_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  std::string header;
  std::getline(in, header);
  const std::size_t cols = static_cast<std::size_t>(std::count(header.begin(), header.end(), ',')) + 1;
  if (cols < 13 || (cols - 13) % 3 != 0) throw IoError(path.string() + ": unexpected trace header");
  const int primitives = static_cast<int>((cols - 13) / 3);
  if (header != trace_csv_header(primitives)) throw IoError(path.string() + ": unexpected trace header");

  std::vector<EpisodeTrace> traces;
  std::string line;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (f.size() != cols) throw IoError(path.string() + ":" + std::to_string(line_no) + ": wrong column count");
    try {
      const int session = std::stoi(f[0]);
      const int episode = std::stoi(f[1]);
      if (traces.empty() || traces.back().session != session || traces.back().episode != episode)
        traces.push_back({session, episode, {}});
      TraceRow r;
      r.step = std::stoi(f[2]);
      r.time = std::stod(f[3]);
      r.agent_x = std::stod(f[4]);
      r.agent_y = std::stod(f[5]);
      r.agent_heading = std::stod(f[6]);
      r.obstacle_x = std::stod(f[7]);
      r.obstacle_y = std::stod(f[8]);
      r.action = std::stoi(f[9]);
      r.lambda_v = std::stod(f[10]);
      std::size_t c = 11;
      for (auto* vec : {&r.mean, &r.variance, &r.cost})
        for (int k = 0; k < primitives; ++k) vec->push_back(std::stod(f[c++]));
      r.collided = f[c++] == "1";
      r.reached_goal = f[c] == "1";
      traces.back().rows.push_back(std::move(r));
    } catch (const std::logic_error&) {
      throw IoError(path.string() + ":" + std::to_string(line_no) + ": malformed number");
    }
  }
  return traces;
}

}  // namespace uacoll::env
