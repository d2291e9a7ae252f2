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

#include <vector>

#include "uacoll/nn/params.hpp"

namespace uacoll::nn {

/// Keep indicators for one forward pass. layers[0] covers the LSTM hidden
/// state when the network has one; the rest cover dense hidden layers in
/// order. The output unit is never dropped. The same mask is reused at every
/// timestep of the pass.
struct DropoutMask {
  double keep_prob = 1.0;
  std::vector<Vector> layers;

  /// Multiplier applied to activations: indicator / keep_prob.
  Vector scale(std::size_t layer) const { return layers[layer] / keep_prob; }
};

/// Widths of the maskable layers of a network, in DropoutMask order.
inline std::vector<int> maskable_widths(const LayerSpec& spec) {
  std::vector<int> w;
  if (spec.has_lstm()) w.push_back(spec.lstm_hidden);
  for (int d : spec.dense_hidden) w.push_back(d);
  return w;
}

inline void check_keep_prob(double p_keep) {
  if (!(p_keep > 0.0 && p_keep <= 1.0))
    throw ConfigError("dropout keep probability must lie in (0, 1]");
}

inline DropoutMask full_mask(const LayerSpec& spec) {
  DropoutMask m;
  for (int w : maskable_widths(spec)) m.layers.push_back(Vector::Ones(w));
  return m;
}

inline DropoutMask sample_dropout_mask(const LayerSpec& spec, double p_keep, Rng& rng) {
  check_keep_prob(p_keep);
  DropoutMask m;
  m.keep_prob = p_keep;
  for (int w : maskable_widths(spec)) {
    Vector v(w);
    for (int i = 0; i < w; ++i) v(i) = (p_keep >= 1.0 || bernoulli(rng, p_keep)) ? 1.0 : 0.0;
    m.layers.push_back(std::move(v));
  }
  return m;
}

inline DropoutMask sample_dropout_mask(const NetworkParams& params, double p_keep, Rng& rng) {
  return sample_dropout_mask(params.spec, p_keep, rng);
}

}  // namespace uacoll::nn
