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

#ifndef LPG_PROPAGATE_HPP_
#define LPG_PROPAGATE_HPP_

#include <vector>

#include "lpg/graph.hpp"
#include "lpg/types.hpp"

namespace lpg {

// Neighborhood aggregators. Neighborhoods never include the node itself.
//   gcn:  row_v = sum_{u in N(v)} X_u / sqrt(|N(u)| * |N(v)|)
//   mean: row_v = sum_{u in N(v)} X_u / |N(v)|
// Degree-0 rows are all-zero by definition.
enum class AggregatorKind { kGcn, kMean };

// One aggregation step over the CSR rows. Throws ShapeError if X has the
// wrong number of rows. Linear in X; pure; row order of accumulation is the
// fixed CSR neighbor order, so results are bit-stable.
Matrix aggregate(const Graph& graph, const Matrix& x, AggregatorKind kind);

// Adjoint of aggregate (as a linear map on node vectors). For the gcn
// aggregator this is aggregate itself; for mean the normalization moves to
// the source side. Used by reverse-mode gradients.
Matrix aggregate_transpose(const Graph& graph, const Matrix& x, AggregatorKind kind);

// K repeated aggregations with no nonlinearity and no self-loops.
// K = 0 returns X unchanged.
Matrix kprop(const Graph& graph, Matrix x, int steps, AggregatorKind kind);
Matrix kprop_transpose(const Graph& graph, Matrix x, int steps, AggregatorKind kind);

// Label-frequency estimate: propagates one-hot perturbed labels with the
// gcn aggregator K_y times and takes the per-row argmax (ties broken toward
// the lowest class index). Labeled nodes whose propagated row is all-zero
// keep their own perturbed label; unlabeled nodes stay unlabeled.
std::vector<std::int32_t> estimate_labels(const Graph& graph,
                                          const Matrix& y_perturbed_one_hot,
                                          int steps);

}  // namespace lpg

#endif  // LPG_PROPAGATE_HPP_
