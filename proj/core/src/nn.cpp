// Copyright 2026 The lpgraph Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "lpg/nn.hpp"

#include <cmath>

#include "lpg/errors.hpp"

namespace lpg {

Matrix softmax_rows(const Matrix& logits) {
  Matrix out(logits.rows(), logits.cols());
  for (Eigen::Index v = 0; v < logits.rows(); ++v) {
    const double shift = logits.row(v).maxCoeff();
    out.row(v).array() = (logits.row(v).array() - shift).exp();
    out.row(v) /= out.row(v).sum();
  }
  return out;
}

double cross_entropy(const Matrix& probs, const std::vector<std::int32_t>& labels,
                     std::span<const NodeId> ids, CrossEntropyStats* stats) {
  if (labels.size() != static_cast<std::size_t>(probs.rows())) {
    throw ShapeError("label vector length does not match probability rows");
  }
  double total = 0.0;
  long counted = 0;
  for (const NodeId v : ids) {
    const auto y = labels[v];
    if (y == kUnlabeled) continue;
    double p = probs(v, y);
    if (p < kProbClamp) {
      p = kProbClamp;
      if (stats != nullptr) stats->clamped++;
    }
    total -= std::log(p);
    ++counted;
  }
  if (counted == 0) throw ArgumentError("cross_entropy over an empty node set");
  return total / static_cast<double>(counted);
}

Matrix cross_entropy_grad_logits(const Matrix& probs,
                                 const std::vector<std::int32_t>& labels,
                                 std::span<const NodeId> ids) {
  long counted = 0;
  for (const NodeId v : ids) counted += labels[v] != kUnlabeled;
  if (counted == 0) throw ArgumentError("cross_entropy over an empty node set");
  Matrix grad = Matrix::Zero(probs.rows(), probs.cols());
  const double inv = 1.0 / static_cast<double>(counted);
  for (const NodeId v : ids) {
    const auto y = labels[v];
    if (y == kUnlabeled) continue;
    grad.row(v) = probs.row(v) * inv;
    grad(v, y) -= inv;
  }
  return grad;
}

Matrix forward_correct(const Matrix& probs, const TransitionMatrix& t) {
  if (probs.cols() != t.probs.rows()) {
    throw ShapeError("probability columns do not match transition classes");
  }
  return probs * t.probs;
}

Matrix softmax_backward(const Matrix& probs, const Matrix& dprobs) {
  Matrix out(probs.rows(), probs.cols());
  for (Eigen::Index v = 0; v < probs.rows(); ++v) {
    const double dot = probs.row(v).dot(dprobs.row(v));
    out.row(v).array() = probs.row(v).array() * (dprobs.row(v).array() - dot);
  }
  return out;
}

void adam_step(Vector& weights, const Vector& grads, AdamState& state) {
  if (weights.size() != grads.size() || weights.size() != state.m.size()) {
    throw ShapeError("adam_step: weight/gradient/state sizes disagree");
  }
  const auto& cfg = state.config;
  state.step += 1;
  state.m = cfg.beta1 * state.m + (1.0 - cfg.beta1) * grads;
  state.v = cfg.beta2 * state.v + (1.0 - cfg.beta2) * grads.cwiseProduct(grads);
  const double bias1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.step));
  const double bias2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.step));
  weights.array() -= cfg.learning_rate *
                     (state.m.array() / bias1) /
                     ((state.v.array() / bias2).sqrt() + cfg.epsilon);
  if (cfg.weight_decay != 0.0) {
    weights.array() -= cfg.learning_rate * cfg.weight_decay * weights.array();
  }
}

}  // namespace lpg
