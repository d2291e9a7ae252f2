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
#include <span>
#include <vector>

#include "uacoll/core/parallel.hpp"
#include "uacoll/core/rng.hpp"
#include "uacoll/ensemble/ensemble.hpp"
#include "uacoll/nn/adam.hpp"
#include "uacoll/nn/network.hpp"

namespace uacoll::trainer {

struct FitOptions {
  int epochs = 3;
  int batch_size = 32;
  nn::AdamConfig adam;
};

/// Mini-batch training of one network on data[indices] with dropout active.
/// Order is reshuffled every epoch. Returns the mean loss of the last epoch.
inline double train_member(nn::NetworkParams& params, std::span<const nn::SequenceExample> data,
                           std::vector<std::size_t> indices, const FitOptions& opt, double keep_prob,
                           std::uint64_t seed) {
  if (indices.empty()) throw ConfigError("cannot train on an empty dataset");
  if (opt.epochs < 1 || opt.batch_size < 1) throw ConfigError("epochs and batch_size must be >= 1");
  Rng shuffle_rng = make_rng(seed, "shuffle");
  Rng mask_rng = make_rng(seed, "train-dropout");
  nn::AdamState state = nn::AdamState::for_params(params);
  double epoch_loss = 0.0;
  std::vector<const nn::SequenceExample*> batch;
  std::vector<nn::DropoutMask> masks;
  for (int epoch = 0; epoch < opt.epochs; ++epoch) {
    for (std::size_t i = indices.size(); i > 1; --i) std::swap(indices[i - 1], indices[uniform_index(shuffle_rng, i)]);
    double total = 0.0;
    for (std::size_t start = 0; start < indices.size(); start += static_cast<std::size_t>(opt.batch_size)) {
      const std::size_t stop = std::min(indices.size(), start + static_cast<std::size_t>(opt.batch_size));
      batch.clear();
      masks.clear();
      for (std::size_t i = start; i < stop; ++i) {
        batch.push_back(&data[indices[i]]);
        masks.push_back(nn::sample_dropout_mask(params, keep_prob, mask_rng));
      }
      const auto lg = nn::backward(params, batch, masks);
      if (!std::isfinite(lg.loss)) throw NumericError("training loss became non-finite");
      nn::optimizer_step(params, lg.gradient, state, opt.adam);
      total += lg.loss * static_cast<double>(stop - start);
    }
    epoch_loss = total / static_cast<double>(indices.size());
  }
  return epoch_loss;
}

/// Trains every member on its own bootstrap resample of the dataset. Member
/// m draws its resample from substream ("bootstrap", m) and its shuffling and
/// dropout from ("member-train", m), so results do not depend on `threads`.
inline std::vector<double> train_session(Ensemble& ensemble, std::span<const nn::SequenceExample> data,
                                         const FitOptions& opt, std::uint64_t seed, int threads = 1) {
  if (data.empty()) throw ConfigError("cannot train on an empty dataset");
  std::vector<double> losses(ensemble.members.size());
  parallel_for(ensemble.members.size(), threads, [&](std::size_t m) {
    Rng boot = make_rng(seed, "bootstrap", m);
    auto indices = bootstrap_indices(data.size(), boot);
    losses[m] = train_member(ensemble.members[m], data, std::move(indices), opt, ensemble.config.keep_prob,
                             substream_seed(seed, "member-train", m));
  });
  return losses;
}

}  // namespace uacoll::trainer
