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

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "uacoll/core/errors.hpp"
#include "uacoll/nn/params.hpp"

namespace uacoll::nn {

inline constexpr const char* kCheckpointFormat = "uacoll-network";
inline constexpr int kCheckpointVersion = 1;

inline nlohmann::json spec_to_json(const LayerSpec& s) {
  return {{"input", s.input},
          {"lstm_hidden", s.lstm_hidden},
          {"dense_hidden", s.dense_hidden},
          {"hidden_activation", to_string(s.hidden_activation)}};
}

inline LayerSpec spec_from_json(const nlohmann::json& j) {
  LayerSpec s;
  s.input = j.at("input").get<int>();
  s.lstm_hidden = j.at("lstm_hidden").get<int>();
  s.dense_hidden = j.at("dense_hidden").get<std::vector<int>>();
  s.hidden_activation = activation_from_string(j.at("hidden_activation").get<std::string>());
  s.validate();
  return s;
}

/// Checkpoint layout:
///   {"format": "uacoll-network", "version": 1, "spec": {...},
///    "tensors": {name: {"shape": [rows, cols], "data": [row-major values]}}}
/// Doubles are written in shortest round-trip form, so save/load is bit-exact.
inline nlohmann::json params_to_json(const NetworkParams& p) {
  nlohmann::json tensors = nlohmann::json::object();
  for (const auto& t : tensor_views(p)) {
    std::vector<double> row_major;
    row_major.reserve(t.data.size());
    for (Eigen::Index r = 0; r < t.rows; ++r)
      for (Eigen::Index c = 0; c < t.cols; ++c)
        row_major.push_back(t.data[static_cast<std::size_t>(c * t.rows + r)]);
    tensors[t.name] = {{"shape", {t.rows, t.cols}}, {"data", std::move(row_major)}};
  }
  return {{"format", kCheckpointFormat},
          {"version", kCheckpointVersion},
          {"spec", spec_to_json(p.spec)},
          {"tensors", std::move(tensors)}};
}

inline NetworkParams params_from_json(const nlohmann::json& j) {
  try {
    if (j.at("format").get<std::string>() != kCheckpointFormat)
      throw IoError("not a network checkpoint");
    if (j.at("version").get<int>() != kCheckpointVersion)
      throw IoError("unsupported checkpoint version " + j.at("version").dump());
    NetworkParams p = init_params(spec_from_json(j.at("spec")), 0);
    const auto& tensors = j.at("tensors");
    auto views = tensor_views(p);
    if (tensors.size() != views.size()) throw IoError("checkpoint tensor count does not match spec");
    for (auto& t : views) {
      const auto& entry = tensors.at(t.name);
      const auto shape = entry.at("shape").get<std::vector<Eigen::Index>>();
      if (shape.size() != 2 || shape[0] != t.rows || shape[1] != t.cols)
        throw IoError("checkpoint tensor " + t.name + " has the wrong shape");
      const auto data = entry.at("data").get<std::vector<double>>();
      if (data.size() != t.data.size()) throw IoError("checkpoint tensor " + t.name + " has the wrong size");
      std::size_t i = 0;
      for (Eigen::Index r = 0; r < t.rows; ++r)
        for (Eigen::Index c = 0; c < t.cols; ++c) t.data[static_cast<std::size_t>(c * t.rows + r)] = data[i++];
    }
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("malformed network checkpoint: ") + e.what());
  } catch (const ConfigError& e) {
    throw IoError(std::string("malformed network checkpoint: ") + e.what());
  }
}

inline void save_params(const NetworkParams& p, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << params_to_json(p).dump(1) << '\n';
  if (!out) throw IoError("failed writing " + path.string());
}

inline NetworkParams load_params(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw IoError(path.string() + ": " + e.what());
  }
  return params_from_json(j);
}

}  // namespace uacoll::nn
