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

#ifndef LPG_MODEL_HPP_
#define LPG_MODEL_HPP_

#include <filesystem>

#include "lpg/graph.hpp"
#include "lpg/nn.hpp"
#include "lpg/rng.hpp"
#include "lpg/types.hpp"

namespace lpg {

enum class Backbone { kGcn, kSage };

// Two graph-convolution layers, SeLU activations, dropout after the hidden
// activation, softmax on the output logits.
struct GnnConfig {
  Backbone backbone = Backbone::kSage;
  int hidden_dim = 16;
  int num_classes = 0;
  double dropout_rate = 0.0;  // in [0, 1)

  void validate() const;
  // Input width of layer 1 for feature dimension d (doubled for sage,
  // which concatenates the mean-aggregated and self vectors).
  int layer1_in(int d) const { return backbone == Backbone::kSage ? 2 * d : d; }
  int layer2_in() const {
    return backbone == Backbone::kSage ? 2 * hidden_dim : hidden_dim;
  }
};

struct ModelWeights {
  Matrix w1;     // layer1_in x hidden
  RowVector b1;  // hidden
  Matrix w2;     // layer2_in x classes
  RowVector b2;  // classes

  static ModelWeights glorot(int feature_dim, const GnnConfig& config, Rng& rng);
  static ModelWeights zeros(int feature_dim, const GnnConfig& config);

  Eigen::Index num_params() const;
  Vector flat() const;
  void set_flat(const Vector& values);
};

enum class Mode { kTrain, kEval };

// The backbone GNN evaluated on a fixed input matrix. The layer-1 input
// aggregation does not depend on the weights, so it is precomputed once at
// construction; each forward pass then costs two dense products plus the
// cheap hidden-width aggregation.
class GnnModel {
 public:
  GnnModel(const Graph& graph, const Matrix& h0, const GnnConfig& config);

  const GnnConfig& config() const { return config_; }
  int feature_dim() const { return feature_dim_; }

  // Class-probability matrix (rows sum to 1). Train mode samples a dropout
  // mask from `rng` and captures the tape consumed by backward().
  // Throws NumericError naming the layer if activations go non-finite.
  Matrix forward(const ModelWeights& weights, Mode mode, Rng* rng = nullptr);

  struct EpochOutput {
    Matrix train_probs;  // dropout applied; tape captured
    Matrix eval_probs;   // deterministic path, same weights
  };
  // One training epoch needs both paths; the shared layer-1 product is
  // computed once.
  EpochOutput forward_epoch(const ModelWeights& weights, Rng& rng);

  // Gradient of a scalar loss with respect to the flattened weights, given
  // d(loss)/d(logits) of the captured train-mode forward pass.
  Vector backward(const ModelWeights& weights, const Matrix& dlogits) const;

 private:
  Matrix layer2_input(const Matrix& hidden) const;
  Matrix logits_to_probs(const Matrix& logits) const;

  const Graph& graph_;
  GnnConfig config_;
  int feature_dim_;
  Matrix input1_;  // precomputed layer-1 input (aggregated/concatenated h0)

  // tape of the last train-mode forward
  struct Tape {
    Matrix z1;        // pre-activation, layer 1
    Matrix dropped;   // post-dropout hidden activations
    Matrix mask;      // dropout mask with inverted scaling; empty if unused
    Matrix z2_input;  // aggregated layer-2 input
    bool valid = false;
  };
  mutable Tape tape_;
};

// Convenience single-shot form.
Matrix gnn_forward(const Graph& graph, const Matrix& h0, const ModelWeights& weights,
                   const GnnConfig& config, Mode mode, Rng* rng = nullptr);

// Versioned binary checkpoint: magic, version, backbone tag, shapes, then
// little-endian 32-bit float payload. save(load(p)) reproduces p's bytes.
void save_weights(const std::filesystem::path& path, const ModelWeights& weights,
                  Backbone backbone);
std::pair<ModelWeights, Backbone> load_weights(const std::filesystem::path& path);

}  // namespace lpg

#endif  // LPG_MODEL_HPP_
