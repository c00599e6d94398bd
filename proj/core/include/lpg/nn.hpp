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

#ifndef LPG_NN_HPP_
#define LPG_NN_HPP_

#include <span>
#include <vector>

#include "lpg/mechanisms.hpp"
#include "lpg/types.hpp"

namespace lpg {

// SeLU activation (self-normalizing constants).
inline constexpr double kSeluLambda = 1.0507009873554804934193349852946;
inline constexpr double kSeluAlpha = 1.6732632423543772848170429916717;

inline double selu(double z) {
  return z > 0.0 ? kSeluLambda * z : kSeluLambda * kSeluAlpha * (std::exp(z) - 1.0);
}
inline double selu_deriv(double z) {
  return z > 0.0 ? kSeluLambda : kSeluLambda * kSeluAlpha * std::exp(z);
}

// Row-wise softmax in the log domain (max-shifted).
Matrix softmax_rows(const Matrix& logits);

// Probabilities below this are clamped inside log-losses.
inline constexpr double kProbClamp = 1e-12;

struct CrossEntropyStats {
  long clamped = 0;  // how many log arguments hit the clamp
};

// Mean of -log probs[v, labels[v]] over the labeled nodes of `ids`.
// Throws ArgumentError if `ids` contains no labeled node.
double cross_entropy(const Matrix& probs, const std::vector<std::int32_t>& labels,
                     std::span<const NodeId> ids, CrossEntropyStats* stats = nullptr);

// d(mean cross-entropy)/d(logits), with probs = softmax(logits).
Matrix cross_entropy_grad_logits(const Matrix& probs,
                                 const std::vector<std::int32_t>& labels,
                                 std::span<const NodeId> ids);

// Pushes class probabilities through the label-noise transition:
// out = probs * T. Rows stay on the simplex.
Matrix forward_correct(const Matrix& probs, const TransitionMatrix& t);

// Pulls a gradient with respect to probs back to the logits through the
// softmax Jacobian: dlogits_v = p_v .* dp_v - (p_v . dp_v) * p_v.
Matrix softmax_backward(const Matrix& probs, const Matrix& dprobs);

struct AdamConfig {
  double learning_rate = 1e-2;
  double weight_decay = 0.0;  // decoupled; applied after the Adam step
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct AdamState {
  AdamConfig config;
  Vector m;
  Vector v;
  long step = 0;

  AdamState(Eigen::Index size, AdamConfig cfg)
      : config(cfg), m(Vector::Zero(size)), v(Vector::Zero(size)) {}
};

void adam_step(Vector& weights, const Vector& grads, AdamState& state);

}  // namespace lpg

#endif  // LPG_NN_HPP_
