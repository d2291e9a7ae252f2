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
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "uacoll/core/errors.hpp"
#include "uacoll/core/parallel.hpp"
#include "uacoll/core/rng.hpp"
#include "uacoll/nn/checkpoint.hpp"
#include "uacoll/nn/network.hpp"

namespace uacoll {

struct EnsembleConfig {
  int members = 5;         // n_b
  int dropout_passes = 20;  // n_d per member
  double keep_prob = 0.7;

  int total_passes() const { return members * dropout_passes; }

  void validate() const {
    if (members < 1) throw ConfigError("ensemble.members must be >= 1");
    if (dropout_passes < 1) throw ConfigError("ensemble.dropout_passes must be >= 1");
    nn::check_keep_prob(keep_prob);
  }

  bool operator==(const EnsembleConfig&) const = default;
};

/// Collision-probability samples for one motion primitive, with their mean
/// and population variance.
struct PredictionDistribution {
  std::vector<double> samples;
  double mean = 0.0;
  double variance = 0.0;

  static PredictionDistribution from_samples(std::vector<double> samples) {
    PredictionDistribution d;
    d.samples = std::move(samples);
    if (d.samples.empty()) return d;
    const double n = static_cast<double>(d.samples.size());
    // Shifted by the first sample: identical samples give exactly zero.
    const double x0 = d.samples.front();
    double sum = 0.0;
    for (double s : d.samples) sum += s - x0;
    const double shift = sum / n;
    d.mean = x0 + shift;
    double ss = 0.0;
    for (double s : d.samples) ss += (s - x0 - shift) * (s - x0 - shift);
    d.variance = ss / n;
    return d;
  }
};

struct Ensemble {
  EnsembleConfig config;
  std::vector<nn::NetworkParams> members;

  const nn::LayerSpec& spec() const { return members.front().spec; }
};

/// Fresh ensemble whose member i is initialised from substream ("member", i).
inline Ensemble make_ensemble(const EnsembleConfig& config, const nn::LayerSpec& spec, std::uint64_t seed) {
  config.validate();
  Ensemble e{config, {}};
  for (int i = 0; i < config.members; ++i)
    e.members.push_back(nn::init_params(spec, substream_seed(seed, "member", static_cast<std::uint64_t>(i))));
  return e;
}

/// Indices of a with-replacement resample of size n.
inline std::vector<std::size_t> bootstrap_indices(std::size_t n, Rng& rng) {
  if (n == 0) throw ConfigError("cannot resample an empty dataset");
  std::vector<std::size_t> idx(n);
  for (auto& i : idx) i = uniform_index(rng, n);
  return idx;
}

template <typename T>
std::vector<T> bootstrap_resample(std::span<const T> dataset, Rng& rng) {
  std::vector<T> out;
  out.reserve(dataset.size());
  for (std::size_t i : bootstrap_indices(dataset.size(), rng)) out.push_back(dataset[i]);
  return out;
}

/// Dropout masks of one member for one prediction step, drawn from that
/// member's own substream so members can be evaluated in any order.
inline std::vector<nn::DropoutMask> member_masks(const Ensemble& e, std::size_t member, std::uint64_t step_seed) {
  Rng rng = make_rng(step_seed, "dropout", member);
  std::vector<nn::DropoutMask> masks;
  masks.reserve(static_cast<std::size_t>(e.config.dropout_passes));
  for (int d = 0; d < e.config.dropout_passes; ++d)
    masks.push_back(nn::sample_dropout_mask(e.members[member], e.config.keep_prob, rng));
  return masks;
}

/// Predictive distributions for several candidate final timesteps sharing one
/// history. Row k of `candidates` yields element k. Samples are stored
/// member-major (member m, pass d at index m * n_d + d).
inline std::vector<PredictionDistribution> predict_distributions(const Ensemble& e, const nn::Matrix& prefix,
                                                                 const nn::Matrix& candidates,
                                                                 std::uint64_t step_seed, int threads = 1) {
  if (e.members.empty()) throw ConfigError("ensemble has no members");
  const auto n_b = e.members.size();
  const auto n_d = static_cast<std::size_t>(e.config.dropout_passes);
  std::vector<nn::Matrix> per_member(n_b);
  parallel_for(n_b, threads, [&](std::size_t m) {
    const auto masks = member_masks(e, m, step_seed);
    per_member[m] = nn::forward_passes(e.members[m], prefix, candidates, masks);
  });
  std::vector<PredictionDistribution> out;
  out.reserve(static_cast<std::size_t>(candidates.rows()));
  for (Eigen::Index k = 0; k < candidates.rows(); ++k) {
    std::vector<double> samples;
    samples.reserve(n_b * n_d);
    for (std::size_t m = 0; m < n_b; ++m)
      for (std::size_t d = 0; d < n_d; ++d) samples.push_back(per_member[m](k, static_cast<Eigen::Index>(d)));
    out.push_back(PredictionDistribution::from_samples(std::move(samples)));
  }
  return out;
}

/// Single-candidate form. Equal to the matching element of
/// predict_distributions for the same seed.
inline PredictionDistribution predict_distribution(const Ensemble& e, const nn::Matrix& prefix,
                                                   const nn::Vector& candidate, std::uint64_t step_seed) {
  return predict_distributions(e, prefix, candidate.transpose(), step_seed).front();
}

/// Sum of the predictive variances over all primitives of one step.
inline double per_step_uncertainty(std::span<const PredictionDistribution> dists) {
  double total = 0.0;
  for (const auto& d : dists) total += d.variance;
  return total;
}

inline constexpr const char* kEnsembleFormat = "uacoll-ensemble";
inline constexpr int kEnsembleVersion = 1;

/// Writes manifest.json plus member_<i>.json into `dir`.
inline void save_ensemble(const Ensemble& e, const std::filesystem::path& dir,
                          const nlohmann::json& extra = nlohmann::json::object()) {
  std::filesystem::create_directories(dir);
  nlohmann::json files = nlohmann::json::array();
  for (std::size_t i = 0; i < e.members.size(); ++i) {
    const std::string name = "member_" + std::to_string(i) + ".json";
    nn::save_params(e.members[i], dir / name);
    files.push_back(name);
  }
  nlohmann::json manifest = {{"format", kEnsembleFormat},
                             {"version", kEnsembleVersion},
                             {"config",
                              {{"members", e.config.members},
                               {"dropout_passes", e.config.dropout_passes},
                               {"keep_prob", e.config.keep_prob}}},
                             {"member_files", files},
                             {"extra", extra}};
  std::ofstream out(dir / "manifest.json");
  if (!out) throw IoError("cannot write " + (dir / "manifest.json").string());
  out << manifest.dump(2) << '\n';
}

struct LoadedEnsemble {
  Ensemble ensemble;
  nlohmann::json extra;
};

inline LoadedEnsemble load_ensemble(const std::filesystem::path& dir) {
  const auto manifest_path = dir / "manifest.json";
  std::ifstream in(manifest_path);
  if (!in) throw IoError("cannot read " + manifest_path.string());
  try {
    nlohmann::json m;
    in >> m;
    if (m.at("format").get<std::string>() != kEnsembleFormat) throw IoError(manifest_path.string() + ": not an ensemble manifest");
    if (m.at("version").get<int>() != kEnsembleVersion) throw IoError(manifest_path.string() + ": unsupported version");
    LoadedEnsemble out;
    const auto& c = m.at("config");
    out.ensemble.config = {c.at("members").get<int>(), c.at("dropout_passes").get<int>(), c.at("keep_prob").get<double>()};
    out.ensemble.config.validate();
    const auto files = m.at("member_files").get<std::vector<std::string>>();
    if (static_cast<int>(files.size()) != out.ensemble.config.members)
      throw IoError(manifest_path.string() + ": member count does not match manifest config");
    for (const auto& f : files) out.ensemble.members.push_back(nn::load_params(dir / f));
    for (const auto& member : out.ensemble.members)
      if (!(member.spec == out.ensemble.members.front().spec))
        throw IoError(manifest_path.string() + ": members have different layer specs");
    out.extra = m.value("extra", nlohmann::json::object());
    return out;
  } catch (const nlohmann::json::exception& e) {
    throw IoError(manifest_path.string() + ": " + e.what());
  } catch (const ConfigError& e) {
    throw IoError(manifest_path.string() + ": " + e.what());
  }
}

}  // namespace uacoll
