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

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "uacoll/core/errors.hpp"
#include "uacoll/nn/network.hpp"
#include "uacoll/policy/features.hpp"
#include "uacoll/trainer/episode.hpp"

namespace uacoll::trainer {

/// Append-only store of labelled windows. Windows are cut per episode, so no
/// example ever spans two episodes.
struct ExperienceDataset {
  int history_length = 8;
  std::vector<nn::SequenceExample> examples;
  int episodes = 0;

  void add_episode(const EpisodeRecord& rec) {
    auto w = windows_from_episode(rec, history_length);
    examples.insert(examples.end(), std::make_move_iterator(w.begin()), std::make_move_iterator(w.end()));
    ++episodes;
  }

  std::size_t size() const { return examples.size(); }
};

inline constexpr char kDatasetMagic[8] = {'U', 'A', 'C', 'D', 'S', 'E', 'T', '1'};

namespace detail {

static_assert(std::endian::native == std::endian::little, "dataset files are written little-endian");

template <typename T>
void put(std::string& buf, T v) {
  char bytes[sizeof(T)];
  std::memcpy(bytes, &v, sizeof(T));
  buf.append(bytes, sizeof(T));
}

template <typename T>
T get(const char*& p, const char* end) {
  if (static_cast<std::size_t>(end - p) < sizeof(T)) throw IoError("dataset record truncated");
  T v;
  std::memcpy(&v, p, sizeof(T));
  p += sizeof(T);
  return v;
}

}  // namespace detail

/// Writes <stem>.bin and <stem>.json. The binary file is the 8-byte magic
/// "UACDSET1" followed by records, each a little-endian uint32 byte count and
/// then: uint32 valid_length, uint32 width, float64 label, and
/// valid_length * width float64 features in row-major order. The JSON sidecar
/// carries counts, the history length and the feature layout version.
inline void save_dataset(const ExperienceDataset& ds, const std::filesystem::path& stem) {
  const auto bin = std::filesystem::path(stem).replace_extension(".bin");
  const auto meta = std::filesystem::path(stem).replace_extension(".json");
  std::ofstream out(bin, std::ios::binary);
  if (!out) throw IoError("cannot write " + bin.string());
  out.write(kDatasetMagic, sizeof kDatasetMagic);
  std::string payload;
  for (const auto& ex : ds.examples) {
    payload.clear();
    detail::put<std::uint32_t>(payload, static_cast<std::uint32_t>(ex.valid_length));
    detail::put<std::uint32_t>(payload, static_cast<std::uint32_t>(ex.steps.cols()));
    detail::put<double>(payload, ex.label);
    for (int t = 0; t < ex.valid_length; ++t)
      for (Eigen::Index k = 0; k < ex.steps.cols(); ++k) detail::put<double>(payload, ex.steps(t, k));
    std::string rec;
    detail::put<std::uint32_t>(rec, static_cast<std::uint32_t>(payload.size()));
    out.write(rec.data(), static_cast<std::streamsize>(rec.size()));
    out.write(payload.data(), static_cast<std::streamsize>(payload.size()));
  }
  if (!out) throw IoError("failed writing " + bin.string());

  const nlohmann::json sidecar = {{"format", "uacoll-dataset"},
                                  {"version", 1},
                                  {"records_file", bin.filename().string()},
                                  {"examples", ds.examples.size()},
                                  {"episodes", ds.episodes},
                                  {"history_length", ds.history_length},
                                  {"feature_layout_version", policy::kFeatureLayoutVersion},
                                  {"feature_width", policy::kFeatureWidth}};
  std::ofstream m(meta);
  if (!m) throw IoError("cannot write " + meta.string());
  m << sidecar.dump(2) << '\n';
}

inline ExperienceDataset load_dataset(const std::filesystem::path& stem) {
  const auto meta_path = std::filesystem::path(stem).replace_extension(".json");
  std::ifstream m(meta_path);
  if (!m) throw IoError("cannot read " + meta_path.string());
  nlohmann::json meta;
  try {
    m >> meta;
    if (meta.at("format").get<std::string>() != "uacoll-dataset" || meta.at("version").get<int>() != 1)
      throw IoError(meta_path.string() + ": not a version 1 dataset sidecar");
    if (meta.at("feature_layout_version").get<int>() != policy::kFeatureLayoutVersion)
      throw IoError(meta_path.string() + ": feature layout version mismatch");
  } catch (const nlohmann::json::exception& e) {
    throw IoError(meta_path.string() + ": " + e.what());
  }
  const auto bin = meta_path.parent_path() / meta.at("records_file").get<std::string>();
  std::ifstream in(bin, std::ios::binary);
  if (!in) throw IoError("cannot read " + bin.string());
  const std::string blob((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (blob.size() < sizeof kDatasetMagic || std::memcmp(blob.data(), kDatasetMagic, sizeof kDatasetMagic) != 0)
    throw IoError(bin.string() + ": bad magic");

  ExperienceDataset ds;
  ds.history_length = meta.at("history_length").get<int>();
  ds.episodes = meta.at("episodes").get<int>();
  const char* p = blob.data() + sizeof kDatasetMagic;
  const char* end = blob.data() + blob.size();
  while (p < end) {
    const auto bytes = detail::get<std::uint32_t>(p, end);
    if (static_cast<std::size_t>(end - p) < bytes) throw IoError(bin.string() + ": record truncated");
    const char* rec_end = p + bytes;
    nn::SequenceExample ex;
    const auto len = detail::get<std::uint32_t>(p, rec_end);
    const auto width = detail::get<std::uint32_t>(p, rec_end);
    ex.label = detail::get<double>(p, rec_end);
    if (len == 0 || bytes != 16 + 8ull * len * width) throw IoError(bin.string() + ": inconsistent record length");
    ex.valid_length = static_cast<int>(len);
    ex.steps.resize(len, width);
    for (std::uint32_t t = 0; t < len; ++t)
      for (std::uint32_t k = 0; k < width; ++k) ex.steps(t, k) = detail::get<double>(p, rec_end);
    ds.examples.push_back(std::move(ex));
  }
  if (ds.examples.size() != meta.at("examples").get<std::size_t>())
    throw IoError(bin.string() + ": record count does not match sidecar");
  return ds;
}

}  // namespace uacoll::trainer
