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
#include <cmath>
#include <span>
#include <vector>

#include "uacoll/nn/dropout.hpp"
#include "uacoll/nn/params.hpp"

namespace uacoll::nn {

inline constexpr double kProbClamp = 1e-7;

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

/// Binary cross-entropy with the prediction clamped to [1e-7, 1 - 1e-7].
inline double bce_loss(double prediction, double label) {
  const double p = std::clamp(prediction, kProbClamp, 1.0 - kProbClamp);
  return -(label * std::log(p) + (1.0 - label) * std::log(1.0 - p));
}

/// One training/evaluation sequence. Rows of `steps` are timesteps; only the
/// first valid_length rows are read, anything after is padding.
struct SequenceExample {
  Matrix steps;
  int valid_length = 1;
  double label = 0.0;
};

struct LossAndGradient {
  double loss = 0.0;
  NetworkParams gradient;
};

namespace detail {

inline Matrix sigmoid(const Matrix& a) {
  return a.unaryExpr([](double x) { return 1.0 / (1.0 + std::exp(-x)); });
}
inline Matrix tanh(const Matrix& a) {
  return a.unaryExpr([](double x) { return std::tanh(x); });
}
inline Matrix activate(const Matrix& a, Activation act) {
  if (act == Activation::kTanh) return tanh(a);
  return a.cwiseMax(0.0);
}
/// Derivative of the activation expressed through its pre-activation input.
inline Matrix activation_grad(const Matrix& a, Activation act) {
  if (act == Activation::kTanh) return tanh(a).unaryExpr([](double t) { return 1.0 - t * t; });
  return a.unaryExpr([](double x) { return x > 0.0 ? 1.0 : 0.0; });
}

inline void check_width(const NetworkParams& p, Eigen::Index width) {
  if (width != p.spec.input) throw ConfigError("sequence feature width does not match network input");
}

/// Stacks per-example mask columns for one maskable layer into units x B.
inline Matrix stack_scales(std::span<const DropoutMask> masks, std::size_t layer, Eigen::Index batch) {
  const Eigen::Index units = masks[0].layers[layer].size();
  Matrix s(units, batch);
  for (Eigen::Index b = 0; b < batch; ++b) {
    const DropoutMask& m = masks.size() == 1 ? masks[0] : masks[static_cast<std::size_t>(b)];
    s.col(b) = m.scale(layer);
  }
  return s;
}

/// Cached activations of one batched pass, kept for backpropagation.
struct BatchTape {
  Eigen::Index batch = 0;
  int steps = 0;
  std::vector<Matrix> x;                           // per t: input x B
  std::vector<Eigen::RowVectorXd> valid;           // per t: 1 x B
  std::vector<std::array<Matrix, 4>> gates;        // post-nonlinearity, per t
  std::vector<Matrix> cell_candidate;              // per t
  std::vector<Matrix> cell;                        // state after t (index t+1), cell[0] = 0
  std::vector<Matrix> hidden_scaled;               // masked hidden after t, [0] = 0
  Matrix lstm_scale;                               // hidden x B
  std::vector<Matrix> dense_in;                    // input to dense layer k
  std::vector<Matrix> dense_pre;                   // pre-activation of dense layer k
  std::vector<Matrix> dense_scale;                 // mask of dense hidden layer k
  Eigen::RowVectorXd prob;
};

inline BatchTape forward_tape(const NetworkParams& p, std::span<const SequenceExample* const> batch,
                              std::span<const DropoutMask> masks) {
  if (batch.empty()) throw ConfigError("batch must not be empty");
  if (masks.empty() || (masks.size() != 1 && masks.size() != batch.size()))
    throw ConfigError("need one dropout mask, or one per example");
  BatchTape tape;
  const auto bsz = static_cast<Eigen::Index>(batch.size());
  tape.batch = bsz;
  int t_max = 0;
  for (const SequenceExample* ex : batch) {
    check_width(p, ex->steps.cols());
    if (ex->valid_length < 1 || ex->valid_length > ex->steps.rows())
      throw ConfigError("valid_length must lie in [1, sequence length]");
    t_max = std::max(t_max, ex->valid_length);
  }
  tape.steps = t_max;
  std::size_t mask_layer = 0;

  Matrix trunk;
  if (p.lstm) {
    const LstmParams& l = *p.lstm;
    const Eigen::Index h = p.spec.lstm_hidden;
    tape.lstm_scale = stack_scales(masks, mask_layer++, bsz);
    tape.cell.push_back(Matrix::Zero(h, bsz));
    tape.hidden_scaled.push_back(Matrix::Zero(h, bsz));
    Matrix hidden = Matrix::Zero(h, bsz);
    for (int t = 0; t < t_max; ++t) {
      Matrix xt(p.spec.input, bsz);
      Eigen::RowVectorXd v(bsz);
      for (Eigen::Index b = 0; b < bsz; ++b) {
        const SequenceExample& ex = *batch[static_cast<std::size_t>(b)];
        const bool on = t < ex.valid_length;
        v(b) = on ? 1.0 : 0.0;
        if (on)
          xt.col(b) = ex.steps.row(t).transpose();
        else
          xt.col(b).setZero();
      }
      const Matrix& h_prev = tape.hidden_scaled.back();
      std::array<Matrix, 4> g;
      for (std::size_t k = 0; k < 4; ++k) {
        Matrix a = l.w_input[k] * xt + l.w_hidden[k] * h_prev;
        a.colwise() += l.bias[k];
        g[k] = (k == kCellGate) ? tanh(a) : sigmoid(a);
      }
      Matrix c_cand = g[kForgetGate].cwiseProduct(tape.cell.back()) + g[kInputGate].cwiseProduct(g[kCellGate]);
      Matrix h_cand = g[kOutputGate].cwiseProduct(tanh(c_cand));
      Matrix c_next = tape.cell.back();
      for (Eigen::Index b = 0; b < bsz; ++b) {
        if (v(b) != 0.0) {
          c_next.col(b) = c_cand.col(b);
          hidden.col(b) = h_cand.col(b);
        }
      }
      tape.x.push_back(std::move(xt));
      tape.valid.push_back(v);
      tape.gates.push_back(std::move(g));
      tape.cell_candidate.push_back(std::move(c_cand));
      tape.cell.push_back(std::move(c_next));
      tape.hidden_scaled.push_back(hidden.cwiseProduct(tape.lstm_scale));
    }
    trunk = tape.hidden_scaled.back();
  } else {
    trunk.resize(p.spec.input, bsz);
    for (Eigen::Index b = 0; b < bsz; ++b) {
      const SequenceExample& ex = *batch[static_cast<std::size_t>(b)];
      trunk.col(b) = ex.steps.row(ex.valid_length - 1).transpose();
    }
  }

  Matrix z = std::move(trunk);
  for (std::size_t k = 0; k < p.dense.size(); ++k) {
    Matrix a = p.dense[k].weight * z;
    a.colwise() += p.dense[k].bias;
    tape.dense_in.push_back(z);
    tape.dense_pre.push_back(a);
    if (k + 1 < p.dense.size()) {
      Matrix s = stack_scales(masks, mask_layer++, bsz);
      z = activate(a, p.spec.hidden_activation).cwiseProduct(s);
      tape.dense_scale.push_back(std::move(s));
    } else {
      z = std::move(a);
    }
  }
  tape.prob = sigmoid(z).row(0);
  return tape;
}

}  // namespace detail

/// Collision probability of one sequence under a fixed dropout mask.
/// Timesteps at or beyond valid_length do not touch the recurrent state.
inline double forward(const NetworkParams& params, const Matrix& sequence, int valid_length,
                      const DropoutMask& mask) {
  const SequenceExample ex{sequence, valid_length, 0.0};
  const SequenceExample* ptr = &ex;
  const auto tape = detail::forward_tape(params, std::span(&ptr, 1), std::span(&mask, 1));
  return tape.prob(0);
}

/// Mean BCE over the batch and its gradient (backprop through time).
/// `masks` holds either one mask shared by all examples or one per example.
inline LossAndGradient backward(const NetworkParams& p, std::span<const SequenceExample* const> batch,
                                std::span<const DropoutMask> masks) {
  using detail::activation_grad;
  const detail::BatchTape tape = detail::forward_tape(p, batch, masks);
  const Eigen::Index bsz = tape.batch;
  const double inv_b = 1.0 / static_cast<double>(bsz);

  LossAndGradient out;
  out.gradient = zeros_like(p);
  NetworkParams& grad = out.gradient;

  Eigen::RowVectorXd dlogit(bsz);
  for (Eigen::Index b = 0; b < bsz; ++b) {
    const double prob = tape.prob(b);
    const double y = batch[static_cast<std::size_t>(b)]->label;
    out.loss += bce_loss(prob, y) * inv_b;
    const bool clamped = prob < kProbClamp || prob > 1.0 - kProbClamp;
    dlogit(b) = clamped ? 0.0 : (prob - y) * inv_b;
  }

  Matrix dz = dlogit;
  for (std::size_t k = p.dense.size(); k-- > 0;) {
    Matrix da = dz;
    if (k + 1 < p.dense.size()) {
      da = dz.cwiseProduct(tape.dense_scale[k]).cwiseProduct(activation_grad(tape.dense_pre[k], p.spec.hidden_activation));
    }
    grad.dense[k].weight.noalias() += da * tape.dense_in[k].transpose();
    grad.dense[k].bias += da.rowwise().sum();
    dz = p.dense[k].weight.transpose() * da;
  }

  if (p.lstm) {
    const LstmParams& l = *p.lstm;
    LstmParams& gl = *grad.lstm;
    Matrix d_hidden = dz.cwiseProduct(tape.lstm_scale);
    Matrix d_cell = Matrix::Zero(d_hidden.rows(), bsz);
    for (int t = tape.steps - 1; t >= 0; --t) {
      const auto ts = static_cast<std::size_t>(t);
      const auto& g = tape.gates[ts];
      const Matrix& c_prev = tape.cell[ts];
      const Matrix& h_prev_scaled = tape.hidden_scaled[ts];
      const Matrix tanh_c = detail::tanh(tape.cell_candidate[ts]);
      const Eigen::RowVectorXd& v = tape.valid[ts];

      Matrix dc = d_cell + d_hidden.cwiseProduct(g[kOutputGate]).cwiseProduct(
                               (1.0 - tanh_c.array().square()).matrix());
      std::array<Matrix, 4> da;
      da[kOutputGate] = d_hidden.cwiseProduct(tanh_c).cwiseProduct(
          g[kOutputGate].cwiseProduct((1.0 - g[kOutputGate].array()).matrix()));
      da[kInputGate] = dc.cwiseProduct(g[kCellGate]).cwiseProduct(
          g[kInputGate].cwiseProduct((1.0 - g[kInputGate].array()).matrix()));
      da[kCellGate] = dc.cwiseProduct(g[kInputGate]).cwiseProduct(
          (1.0 - g[kCellGate].array().square()).matrix());
      da[kForgetGate] = dc.cwiseProduct(c_prev).cwiseProduct(
          g[kForgetGate].cwiseProduct((1.0 - g[kForgetGate].array()).matrix()));
      for (auto& m : da) m = m.array().rowwise() * v.array();

      Matrix dh_prev = Matrix::Zero(d_hidden.rows(), bsz);
      for (std::size_t k = 0; k < 4; ++k) {
        gl.w_input[k].noalias() += da[k] * tape.x[ts].transpose();
        gl.w_hidden[k].noalias() += da[k] * h_prev_scaled.transpose();
        gl.bias[k] += da[k].rowwise().sum();
        dh_prev.noalias() += l.w_hidden[k].transpose() * da[k];
      }
      dh_prev = dh_prev.cwiseProduct(tape.lstm_scale);
      const Matrix dc_prev = dc.cwiseProduct(g[kForgetGate]);
      for (Eigen::Index b = 0; b < bsz; ++b) {
        if (v(b) != 0.0) {
          d_hidden.col(b) = dh_prev.col(b);
          d_cell.col(b) = dc_prev.col(b);
        }
      }
    }
  }
  return out;
}

inline LossAndGradient backward(const NetworkParams& p, std::span<const SequenceExample> batch,
                                std::span<const DropoutMask> masks) {
  std::vector<const SequenceExample*> ptrs;
  ptrs.reserve(batch.size());
  for (const auto& ex : batch) ptrs.push_back(&ex);
  return backward(p, std::span<const SequenceExample* const>(ptrs), masks);
}

/// Mean BCE of a batch without gradients.
inline double batch_loss(const NetworkParams& p, std::span<const SequenceExample* const> batch,
                         std::span<const DropoutMask> masks) {
  const auto tape = detail::forward_tape(p, batch, masks);
  double loss = 0.0;
  for (Eigen::Index b = 0; b < tape.batch; ++b)
    loss += bce_loss(tape.prob(b), batch[static_cast<std::size_t>(b)]->label);
  return loss / static_cast<double>(tape.batch);
}

/// Evaluates many stochastic passes of one network over a shared history and
/// several candidate final timesteps. Column d of the result corresponds to
/// masks[d], row k to candidates.row(k). The history prefix is run once per
/// pass and reused for every candidate.
inline Matrix forward_passes(const NetworkParams& p, const Matrix& prefix, const Matrix& candidates,
                             std::span<const DropoutMask> masks) {
  if (masks.empty()) throw ConfigError("forward_passes needs at least one mask");
  if (candidates.rows() == 0) throw ConfigError("forward_passes needs at least one candidate");
  detail::check_width(p, candidates.cols());
  if (prefix.rows() > 0) detail::check_width(p, prefix.cols());
  const auto passes = static_cast<Eigen::Index>(masks.size());
  std::size_t mask_layer = 0;
  Matrix result(candidates.rows(), passes);

  Matrix lstm_scale;
  std::array<Matrix, 4> recurrent;  // w_hidden * h after the prefix
  Matrix cell;
  if (p.lstm) {
    const LstmParams& l = *p.lstm;
    const Eigen::Index h = p.spec.lstm_hidden;
    lstm_scale = detail::stack_scales(masks, mask_layer++, passes);
    Matrix hidden_scaled = Matrix::Zero(h, passes);
    cell = Matrix::Zero(h, passes);
    for (Eigen::Index t = 0; t < prefix.rows(); ++t) {
      const Vector x = prefix.row(t).transpose();
      std::array<Matrix, 4> g;
      for (std::size_t k = 0; k < 4; ++k) {
        const Vector in = l.w_input[k] * x + l.bias[k];
        Matrix a = l.w_hidden[k] * hidden_scaled;
        a.colwise() += in;
        g[k] = (k == kCellGate) ? detail::tanh(a) : detail::sigmoid(a);
      }
      cell = g[kForgetGate].cwiseProduct(cell) + g[kInputGate].cwiseProduct(g[kCellGate]);
      hidden_scaled = g[kOutputGate].cwiseProduct(detail::tanh(cell)).cwiseProduct(lstm_scale);
    }
    for (std::size_t k = 0; k < 4; ++k) recurrent[k] = l.w_hidden[k] * hidden_scaled;
  }
  std::vector<Matrix> dense_scales;
  for (std::size_t k = 0; k + 1 < p.dense.size(); ++k)
    dense_scales.push_back(detail::stack_scales(masks, mask_layer++, passes));

  for (Eigen::Index c = 0; c < candidates.rows(); ++c) {
    const Vector x = candidates.row(c).transpose();
    Matrix z;
    if (p.lstm) {
      const LstmParams& l = *p.lstm;
      std::array<Matrix, 4> g;
      for (std::size_t k = 0; k < 4; ++k) {
        const Vector in = l.w_input[k] * x + l.bias[k];
        Matrix a = recurrent[k];
        a.colwise() += in;
        g[k] = (k == kCellGate) ? detail::tanh(a) : detail::sigmoid(a);
      }
      const Matrix c_next = g[kForgetGate].cwiseProduct(cell) + g[kInputGate].cwiseProduct(g[kCellGate]);
      z = g[kOutputGate].cwiseProduct(detail::tanh(c_next)).cwiseProduct(lstm_scale);
    } else {
      z = x.replicate(1, passes);
    }
    for (std::size_t k = 0; k < p.dense.size(); ++k) {
      Matrix a = p.dense[k].weight * z;
      a.colwise() += p.dense[k].bias;
      if (k + 1 < p.dense.size())
        z = detail::activate(a, p.spec.hidden_activation).cwiseProduct(dense_scales[k]);
      else
        z = std::move(a);
    }
    result.row(c) = detail::sigmoid(z).row(0);
  }
  return result;
}

}  // namespace uacoll::nn
