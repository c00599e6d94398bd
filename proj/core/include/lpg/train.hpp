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

#ifndef LPG_TRAIN_HPP_
#define LPG_TRAIN_HPP_

#include <cstdint>
#include <limits>
#include <vector>

#include "lpg/dataset.hpp"
#include "lpg/graph.hpp"
#include "lpg/mechanisms.hpp"
#include "lpg/model.hpp"
#include "lpg/types.hpp"

namespace lpg {

// Training objectives:
//   kCrossEntropy:       l(y', p(y|x))   -- fit the noisy labels directly
//   kForwardCorrection:  l(y', p(y'|x))  -- push predictions through the
//                                           known noise transition first
//   kDrop:               l(y~, p(y~|x))  -- propagation-denoised labels vs.
//                                           equally-propagated soft labels
enum class LossKind { kCrossEntropy, kForwardCorrection, kDrop };

struct TrainPlan {
  double eps_x = std::numeric_limits<double>::infinity();
  double eps_y = std::numeric_limits<double>::infinity();
  int k_x = 0;
  int k_y = 0;
  int max_epochs = 500;
  double learning_rate = 1e-2;
  double weight_decay = 1e-3;
  double dropout = 0.0;
  std::uint64_t seed = 0;

  void validate() const;
};

struct EpochRecord {
  int epoch = 0;          // 1-based; doubles as the weights snapshot id
  double val_loss = 0.0;  // forward-correction (or same-kind) validation loss
  double train_acc = 0.0;  // accuracy of argmax p(y|x) against y' on train
  double val_acc = 0.0;    // same on validation
};

struct TrainHistory {
  std::vector<EpochRecord> epochs;
};

struct TrainResult {
  ModelWeights weights;  // snapshot of the selected epoch
  TrainHistory history;
  int selected_epoch = 0;
  bool guard_infeasible = false;  // no epoch satisfied the Acc* constraints
  double acc_star_bound = 1.0;
  double test_accuracy = 0.0;  // against clean labels on the test set
};

// Maximum expected noisy-label accuracy of a perfect classifier:
// e^{eps_y} / (e^{eps_y} + c - 1); 1 when eps_y is infinite.
double acc_star(double eps_y, int num_classes);

// Soft-label path of the Drop objective: forward correction, then K_y steps
// of gcn propagation, then a row-wise softmax.
Matrix drop_soft_labels(const Matrix& probs, const TransitionMatrix& t,
                        const Graph& graph, int k_y);

// Loss value and its gradient with respect to the logits of `probs`.
struct LossEval {
  double value = 0.0;
  Matrix dlogits;
};
LossEval eval_loss(LossKind kind, const Matrix& probs, const TransitionMatrix& t,
                   const Graph& graph, int k_y,
                   const std::vector<std::int32_t>& targets,
                   std::span<const NodeId> ids);

// Runs the Drop training loop: propagates the rectified features K_x steps,
// denoises the perturbed labels with K_y propagation steps, trains on the
// propagated soft labels, validates with the forward-correction loss, and
// picks the best epoch subject to the Acc* overfitting guard. When no epoch
// satisfies the guard, falls back to the unconstrained best and flags the
// run. Test labels are only touched for the final clean-accuracy readout.
TrainResult train_drop(const Graph& graph, const Matrix& features,
                       const std::vector<std::int32_t>& y_perturbed,
                       const LabelStore& labels, const DataSplit& split,
                       const TrainPlan& plan, const GnnConfig& config);

// Same loop with a baseline objective. Model selection uses the validation
// loss of the same kind; the Acc* guard applies only to forward correction.
TrainResult train_baseline(LossKind kind, const Graph& graph, const Matrix& features,
                           const std::vector<std::int32_t>& y_perturbed,
                           const LabelStore& labels, const DataSplit& split,
                           const TrainPlan& plan, const GnnConfig& config);

}  // namespace lpg

#endif  // LPG_TRAIN_HPP_
