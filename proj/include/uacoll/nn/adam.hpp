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
#include <string>

#include "uacoll/nn/params.hpp"

namespace uacoll::nn {

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// First/second moment estimates shaped like the parameters.
struct AdamState {
  NetworkParams first;
  NetworkParams second;
  long step = 0;

  static AdamState for_params(const NetworkParams& p) { return {zeros_like(p), zeros_like(p), 0}; }
};

/// Applies one adaptive-moment update in place. A gradient containing a
/// non-finite value is rejected before anything is modified.
inline void optimizer_step(NetworkParams& params, const NetworkParams& gradient, AdamState& state,
                           const AdamConfig& cfg = {}) {
  auto p = tensor_views(params);
  const auto g = tensor_views(gradient);
  auto m = tensor_views(state.first);
  auto v = tensor_views(state.second);
  if (p.size() != g.size() || p.size() != m.size() || p.size() != v.size())
    throw ConfigError("optimizer_step: parameter and gradient structures differ");
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i].data.size() != g[i].data.size() || p[i].data.size() != m[i].data.size())
      throw ConfigError("optimizer_step: shape mismatch in " + p[i].name);
    for (double x : g[i].data)
      if (!std::isfinite(x)) throw NumericError("optimizer_step: non-finite gradient in " + g[i].name);
  }

  ++state.step;
  const double bias1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.step));
  const double bias2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.step));
  for (std::size_t i = 0; i < p.size(); ++i) {
    for (std::size_t j = 0; j < p[i].data.size(); ++j) {
      const double grad = g[i].data[j];
      double& m1 = m[i].data[j];
      double& m2 = v[i].data[j];
      m1 = cfg.beta1 * m1 + (1.0 - cfg.beta1) * grad;
      m2 = cfg.beta2 * m2 + (1.0 - cfg.beta2) * grad * grad;
      const double m_hat = m1 / bias1;
      const double v_hat = m2 / bias2;
      p[i].data[j] -= cfg.learning_rate * m_hat / (std::sqrt(v_hat) + cfg.epsilon);
    }
  }
  if (!all_finite(params)) throw NumericError("optimizer_step produced non-finite parameters");
}

}  // namespace uacoll::nn
