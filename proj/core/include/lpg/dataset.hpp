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

#ifndef LPG_DATASET_HPP_
#define LPG_DATASET_HPP_

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "lpg/graph.hpp"
#include "lpg/types.hpp"

namespace lpg {

// Dense node-feature matrix with its declared value range [alpha, beta].
struct FeatureMatrix {
  Matrix values;  // num_nodes x d
  double alpha = 0.0;
  double beta = 1.0;

  Eigen::Index dim() const { return values.cols(); }
  Eigen::Index num_nodes() const { return values.rows(); }
};

// Per-node class labels. kUnlabeled (-1) marks nodes without a label.
// Holds the clean labels plus the perturbed and propagation-estimated
// variants produced further down the pipeline.
class LabelStore {
 public:
  LabelStore() = default;
  LabelStore(std::vector<std::int32_t> clean, int num_classes);

  int num_classes() const { return num_classes_; }
  NodeId size() const { return static_cast<NodeId>(clean_.size()); }

  bool is_labeled(NodeId v) const { return clean_[v] != kUnlabeled; }
  std::int32_t clean(NodeId v) const { return clean_[v]; }
  const std::vector<std::int32_t>& clean() const { return clean_; }

  std::vector<std::int32_t>& perturbed() { return perturbed_; }
  const std::vector<std::int32_t>& perturbed() const { return perturbed_; }
  std::vector<std::int32_t>& estimated() { return estimated_; }
  const std::vector<std::int32_t>& estimated() const { return estimated_; }

  // One-hot view: labeled rows sum to 1, unlabeled rows are all-zero.
  Matrix one_hot(const std::vector<std::int32_t>& labels) const;

 private:
  std::vector<std::int32_t> clean_;
  std::vector<std::int32_t> perturbed_;  // empty until labels are collected
  std::vector<std::int32_t> estimated_;  // empty until propagation runs
  int num_classes_ = 0;
};

// Disjoint train/validation/test node sets covering all nodes.
struct DataSplit {
  std::vector<NodeId> train_ids;
  std::vector<NodeId> val_ids;
  std::vector<NodeId> test_ids;
  std::uint64_t seed = 0;
};

struct Dataset {
  Graph graph;
  FeatureMatrix features;
  LabelStore labels;
  std::string name;
  std::uint64_t content_hash = 0;  // for run manifests
};

// Loads the documented two-file text format:
//   edges file: one edge per line, "u<TAB>v", 0-based ids, '#' comments.
//   nodes file: header "id<TAB>label<TAB>f0,f1,...", then one row per node;
//               label is an integer class or "-" for unlabeled.
// The graph is symmetrized and deduplicated; self-loops are dropped.
Dataset load_graph(const std::filesystem::path& edge_path,
                   const std::filesystem::path& node_path);

struct SbmParams {
  NodeId num_nodes = 0;
  int num_classes = 2;
  int feature_dim = 1;
  double p_in = 0.0;
  double p_out = 0.0;
  double feature_signal = 0.5;  // in [0,1]; 0 = uninformative, 1 = separable
  std::uint64_t seed = 0;
};

// Planted-partition graph with class-conditional Bernoulli features.
// Blocks are contiguous and as equal as rounding allows; node v's class
// is its block. Deterministic for a fixed seed.
Dataset generate_sbm(const SbmParams& params);

// Random node partition with the requested ratios. Set sizes are floored;
// the remainder goes to train. Deterministic for a fixed seed.
DataSplit split_nodes(const Graph& graph, std::array<double, 3> ratios,
                      std::uint64_t seed);

// Per-column min-max scaling to [0, 1]; constant columns map to all-zero.
FeatureMatrix normalize_features(const FeatureMatrix& features);

}  // namespace lpg

#endif  // LPG_DATASET_HPP_
