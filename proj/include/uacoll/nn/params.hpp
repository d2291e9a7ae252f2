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

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "uacoll/core/errors.hpp"
#include "uacoll/core/rng.hpp"

namespace uacoll::nn {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

enum class Activation { kTanh, kRelu };

inline const char* to_string(Activation a) { return a == Activation::kTanh ? "tanh" : "relu"; }

inline Activation activation_from_string(const std::string& s) {
  if (s == "tanh") return Activation::kTanh;
  if (s == "relu") return Activation::kRelu;
  throw ConfigError("unknown activation '" + s + "' (expected tanh or relu)");
}

/// Network topology: input width, an optional LSTM layer (lstm_hidden = 0
/// disables it), dense hidden layers, and a single sigmoid output unit.
struct LayerSpec {
  int input = 0;
  int lstm_hidden = 0;
  std::vector<int> dense_hidden;
  Activation hidden_activation = Activation::kRelu;

  bool has_lstm() const { return lstm_hidden > 0; }

  /// Width of the representation handed to the first dense layer.
  int trunk_width() const { return has_lstm() ? lstm_hidden : input; }

  void validate() const {
    if (input <= 0) throw ConfigError("layer spec: input width must be positive");
    if (lstm_hidden < 0) throw ConfigError("layer spec: lstm_hidden must be >= 0");
    for (int w : dense_hidden)
      if (w <= 0) throw ConfigError("layer spec: dense layer widths must be positive");
  }

  bool operator==(const LayerSpec&) const = default;
};

/// Gate order used everywhere: input, forget, cell candidate, output.
enum Gate : int { kInputGate = 0, kForgetGate = 1, kCellGate = 2, kOutputGate = 3 };
inline constexpr std::array<const char*, 4> kGateNames = {"input", "forget", "cell", "output"};

struct LstmParams {
  std::array<Matrix, 4> w_input;   // hidden x input
  std::array<Matrix, 4> w_hidden;  // hidden x hidden
  std::array<Vector, 4> bias;      // hidden
};

struct DenseParams {
  Matrix weight;  // out x in
  Vector bias;    // out
};

struct NetworkParams {
  LayerSpec spec;
  std::optional<LstmParams> lstm;
  std::vector<DenseParams> dense;  // hidden layers then the 1-unit output layer
};

/// Mutable flat view of one parameter block. Data is Eigen column-major.
struct TensorView {
  std::string name;
  std::span<double> data;
  Eigen::Index rows;
  Eigen::Index cols;
};

inline std::vector<TensorView> tensor_views(NetworkParams& p) {
  std::vector<TensorView> out;
  auto add = [&out](std::string name, auto& t) {
    out.push_back({std::move(name), std::span<double>(t.data(), static_cast<std::size_t>(t.size())),
                   t.rows(), t.cols()});
  };
  if (p.lstm) {
    for (int g = 0; g < 4; ++g) {
      const std::string gate = kGateNames[static_cast<std::size_t>(g)];
      add("lstm.w_input." + gate, p.lstm->w_input[static_cast<std::size_t>(g)]);
      add("lstm.w_hidden." + gate, p.lstm->w_hidden[static_cast<std::size_t>(g)]);
      add("lstm.bias." + gate, p.lstm->bias[static_cast<std::size_t>(g)]);
    }
  }
  for (std::size_t k = 0; k < p.dense.size(); ++k) {
    add("dense." + std::to_string(k) + ".weight", p.dense[k].weight);
    add("dense." + std::to_string(k) + ".bias", p.dense[k].bias);
  }
  return out;
}

inline std::vector<TensorView> tensor_views(const NetworkParams& p) {
  return tensor_views(const_cast<NetworkParams&>(p));
}

inline std::size_t parameter_count(const NetworkParams& p) {
  std::size_t n = 0;
  for (const auto& t : tensor_views(p)) n += t.data.size();
  return n;
}

inline bool all_finite(const NetworkParams& p) {
  for (const auto& t : tensor_views(p))
    for (double v : t.data)
      if (!std::isfinite(v)) return false;
  return true;
}

/// Same structure as `like`, every value zero. Used for gradients and
/// optimizer moments.
inline NetworkParams zeros_like(const NetworkParams& like) {
  NetworkParams z = like;
  for (auto& t : tensor_views(z)) std::fill(t.data.begin(), t.data.end(), 0.0);
  return z;
}

/// Glorot-uniform weights in +-sqrt(6/(fan_in+fan_out)) per block, zero
/// biases, forget-gate bias 1.
inline NetworkParams init_params(const LayerSpec& spec, std::uint64_t seed) {
  spec.validate();
  Rng rng(substream_seed(seed, "init_params"));
  auto glorot = [&rng](Eigen::Index rows, Eigen::Index cols) {
    const double limit = std::sqrt(6.0 / static_cast<double>(rows + cols));
    Matrix m(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j)
      for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = uniform(rng, -limit, limit);
    return m;
  };

  NetworkParams p;
  p.spec = spec;
  if (spec.has_lstm()) {
    LstmParams l;
    const int h = spec.lstm_hidden;
    for (std::size_t g = 0; g < 4; ++g) {
      l.w_input[g] = glorot(h, spec.input);
      l.w_hidden[g] = glorot(h, h);
      l.bias[g] = Vector::Zero(h);
    }
    l.bias[kForgetGate].setConstant(1.0);
    p.lstm = std::move(l);
  }
  int fan_in = spec.trunk_width();
  std::vector<int> widths = spec.dense_hidden;
  widths.push_back(1);
  for (int out : widths) {
    p.dense.push_back({glorot(out, fan_in), Vector::Zero(out)});
    fan_in = out;
  }
  return p;
}

}  // namespace uacoll::nn
