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

#include "lpg/train.hpp"

#include <cmath>

#include "lpg/errors.hpp"
#include "lpg/propagate.hpp"

namespace lpg {
namespace {

// Accuracy of argmax rows of `probs` against `labels` over the labeled ids.
double label_accuracy(const Matrix& probs, const std::vector<std::int32_t>& labels,
                      std::span<const NodeId> ids) {
  long correct = 0;
  long counted = 0;
  for (const NodeId v : ids) {
    if (labels[v] == kUnlabeled) continue;
    Eigen::Index best;
    probs.row(v).maxCoeff(&best);
    correct += static_cast<std::int32_t>(best) == labels[v];
    ++counted;
  }
  if (counted == 0) throw ArgumentError("accuracy over an empty node set");
  return static_cast<double>(correct) / static_cast<double>(counted);
}

// Gradient of mean -log(max(q[v, y_v], clamp)) with respect to q, over the
// labeled ids. Zero where the clamp is active (the loss is flat there).
Matrix clamped_log_grad(const Matrix& q, const std::vector<std::int32_t>& targets,
                        std::span<const NodeId> ids) {
  long counted = 0;
  for (const NodeId v : ids) counted += targets[v] != kUnlabeled;
  if (counted == 0) throw ArgumentError("loss over an empty node set");
  Matrix dq = Matrix::Zero(q.rows(), q.cols());
  const double inv = 1.0 / static_cast<double>(counted);
  for (const NodeId v : ids) {
    const auto y = targets[v];
    if (y == kUnlabeled) continue;
    if (q(v, y) >= kProbClamp) dq(v, y) = -inv / q(v, y);
  }
  return dq;
}

}  // namespace

void TrainPlan::validate() const {
  if (!(eps_x > 0.0)) throw ArgumentError("eps_x must be positive (or infinite)");
  if (!(eps_y > 0.0)) throw ArgumentError("eps_y must be positive (or infinite)");
  if (k_x < 0 || k_y < 0) throw ArgumentError("propagation steps must be non-negative");
  if (max_epochs < 1) throw ArgumentError("max_epochs must be at least 1");
  if (dropout < 0.0 || dropout >= 1.0) throw ArgumentError("dropout must lie in [0, 1)");
}

double acc_star(double eps_y, int num_classes) {
  if (num_classes < 2) throw ArgumentError("acc_star needs c >= 2");
  if (std::isinf(eps_y)) return 1.0;
  return 1.0 / (1.0 + (num_classes - 1) * std::exp(-eps_y));
}

Matrix drop_soft_labels(const Matrix& probs, const TransitionMatrix& t,
                        const Graph& graph, int k_y) {
  const Matrix corrected = forward_correct(probs, t);
  const Matrix propagated = kprop(graph, corrected, k_y, AggregatorKind::kGcn);
  return softmax_rows(propagated);
}

LossEval eval_loss(LossKind kind, const Matrix& probs, const TransitionMatrix& t,
                   const Graph& graph, int k_y,
                   const std::vector<std::int32_t>& targets,
                   std::span<const NodeId> ids) {
  LossEval out;
  switch (kind) {
    case LossKind::kCrossEntropy: {
      out.value = cross_entropy(probs, targets, ids);
      out.dlogits = cross_entropy_grad_logits(probs, targets, ids);
      return out;
    }
    case LossKind::kForwardCorrection: {
      const Matrix q = forward_correct(probs, t);
      out.value = cross_entropy(q, targets, ids);
      const Matrix dq = clamped_log_grad(q, targets, ids);
      const Matrix dprobs = dq * t.probs.transpose();
      out.dlogits = softmax_backward(probs, dprobs);
      return out;
    }
    case LossKind::kDrop: {
      const Matrix q = forward_correct(probs, t);
      const Matrix propagated = kprop(graph, q, k_y, AggregatorKind::kGcn);
      const Matrix soft = softmax_rows(propagated);
      out.value = cross_entropy(soft, targets, ids);
      // Fused softmax + cross-entropy gradient on the propagated logits.
      long counted = 0;
      for (const NodeId v : ids) counted += targets[v] != kUnlabeled;
      if (counted == 0) throw ArgumentError("loss over an empty node set");
      Matrix d_propagated = Matrix::Zero(soft.rows(), soft.cols());
      const double inv = 1.0 / static_cast<double>(counted);
      for (const NodeId v : ids) {
        const auto y = targets[v];
        if (y == kUnlabeled) continue;
        d_propagated.row(v) = soft.row(v) * inv;
        d_propagated(v, y) -= inv;
      }
      const Matrix dq = kprop_transpose(graph, d_propagated, k_y, AggregatorKind::kGcn);
      const Matrix dprobs = dq * t.probs.transpose();
      out.dlogits = softmax_backward(probs, dprobs);
      return out;
    }
  }
  throw ArgumentError("unknown loss kind");
}

namespace {

TrainResult train_with_loss(LossKind kind, const Graph& graph, const Matrix& features,
                            const std::vector<std::int32_t>& y_perturbed,
                            const LabelStore& labels, const DataSplit& split,
                            const TrainPlan& plan, const GnnConfig& config) {
  plan.validate();
  config.validate();
  const int c = config.num_classes;

  const Matrix h0 = kprop(graph, features, plan.k_x, AggregatorKind::kGcn);
  const TransitionMatrix t = rr_transition(plan.eps_y, c);

  // Training targets. Drop fits the propagation-denoised labels; the
  // baselines fit the perturbed labels as-is.
  std::vector<std::int32_t> targets;
  if (kind == LossKind::kDrop) {
    targets = estimate_labels(graph, labels.one_hot(y_perturbed), plan.k_y);
  } else {
    targets = y_perturbed;
  }

  GnnModel model(graph, h0, config);
  Rng init_rng(hash_combine(plan.seed, fnv1a("glorot-init")));
  ModelWeights weights = ModelWeights::glorot(static_cast<int>(h0.cols()), config, init_rng);
  Rng dropout_rng(hash_combine(plan.seed, fnv1a("dropout")));

  AdamConfig adam_cfg;
  adam_cfg.learning_rate = plan.learning_rate;
  adam_cfg.weight_decay = plan.weight_decay;
  AdamState adam(weights.num_params(), adam_cfg);

  const double bound = acc_star(plan.eps_y, c);
  const bool guarded = kind != LossKind::kCrossEntropy;

  TrainResult result;
  result.acc_star_bound = bound;

  ModelWeights best_feasible;
  ModelWeights best_any;
  double best_feasible_loss = std::numeric_limits<double>::infinity();
  double best_any_loss = std::numeric_limits<double>::infinity();
  int best_feasible_epoch = 0;
  int best_any_epoch = 0;

  for (int epoch = 1; epoch <= plan.max_epochs; ++epoch) {
    const auto fwd = model.forward_epoch(weights, dropout_rng);

    // Validation loss (same kind as the objective, on perturbed labels) and
    // the noisy-label accuracies, all at this epoch's pre-update weights.
    double val_loss;
    if (kind == LossKind::kCrossEntropy) {
      val_loss = cross_entropy(fwd.eval_probs, y_perturbed, split.val_ids);
    } else {
      const Matrix q_eval = forward_correct(fwd.eval_probs, t);
      val_loss = cross_entropy(q_eval, y_perturbed, split.val_ids);
    }
    const double train_acc = label_accuracy(fwd.eval_probs, y_perturbed, split.train_ids);
    const double val_acc = label_accuracy(fwd.eval_probs, y_perturbed, split.val_ids);
    result.history.epochs.push_back({epoch, val_loss, train_acc, val_acc});

    const bool feasible = !guarded || (train_acc <= bound && val_acc <= bound);
    if (feasible && val_loss < best_feasible_loss) {
      best_feasible_loss = val_loss;
      best_feasible_epoch = epoch;
      best_feasible = weights;
    }
    if (val_loss < best_any_loss) {
      best_any_loss = val_loss;
      best_any_epoch = epoch;
      best_any = weights;
    }

    const LossEval loss =
        eval_loss(kind, fwd.train_probs, t, graph, plan.k_y, targets, split.train_ids);
    const Vector grads = model.backward(weights, loss.dlogits);
    Vector flat = weights.flat();
    adam_step(flat, grads, adam);
    weights.set_flat(flat);
  }

  if (best_feasible_epoch > 0) {
    result.weights = std::move(best_feasible);
    result.selected_epoch = best_feasible_epoch;
    result.guard_infeasible = false;
  } else {
    result.weights = std::move(best_any);
    result.selected_epoch = best_any_epoch;
    result.guard_infeasible = guarded;  // only meaningful when a guard applied
  }

  const Matrix final_probs = model.forward(result.weights, Mode::kEval);
  result.test_accuracy = label_accuracy(final_probs, labels.clean(), split.test_ids);
  return result;
}

}  // namespace

TrainResult train_drop(const Graph& graph, const Matrix& features,
                       const std::vector<std::int32_t>& y_perturbed,
                       const LabelStore& labels, const DataSplit& split,
                       const TrainPlan& plan, const GnnConfig& config) {
  return train_with_loss(LossKind::kDrop, graph, features, y_perturbed, labels, split,
                         plan, config);
}

TrainResult train_baseline(LossKind kind, const Graph& graph, const Matrix& features,
                           const std::vector<std::int32_t>& y_perturbed,
                           const LabelStore& labels, const DataSplit& split,
                           const TrainPlan& plan, const GnnConfig& config) {
  return train_with_loss(kind, graph, features, y_perturbed, labels, split, plan,
                         config);
}

}  // namespace lpg
