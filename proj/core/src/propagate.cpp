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

#include "lpg/propagate.hpp"

#include <cmath>

#include "lpg/errors.hpp"

namespace lpg {
namespace {

enum class NormSide { kSymmetric, kTarget, kSource };

// Shared gather kernel: out_v = sum_{u in N(v)} X_u * w(u, v), where the
// weight depends on the normalization side. No adjacency matrix is ever
// materialized; rows stream through the CSR arrays.
Matrix gather(const Graph& graph, const Matrix& x, NormSide side) {
  if (x.rows() != graph.num_nodes()) {
    throw ShapeError("matrix has " + std::to_string(x.rows()) + " rows, graph has " +
                     std::to_string(graph.num_nodes()) + " nodes");
  }
  const NodeId n = graph.num_nodes();
  Vector inv_sqrt_deg;
  if (side == NormSide::kSymmetric) {
    inv_sqrt_deg.resize(n);
    for (NodeId v = 0; v < n; ++v) {
      const auto deg = graph.degree(v);
      inv_sqrt_deg[v] = deg > 0 ? 1.0 / std::sqrt(static_cast<double>(deg)) : 0.0;
    }
  }

  Matrix out = Matrix::Zero(n, x.cols());
  for (NodeId v = 0; v < n; ++v) {
    const auto nbrs = graph.neighbors(v);
    if (nbrs.empty()) continue;
    auto row = out.row(v);
    switch (side) {
      case NormSide::kSymmetric:
        for (const NodeId u : nbrs) row += x.row(u) * inv_sqrt_deg[u];
        row *= inv_sqrt_deg[v];
        break;
      case NormSide::kTarget: {
        for (const NodeId u : nbrs) row += x.row(u);
        row /= static_cast<double>(nbrs.size());
        break;
      }
      case NormSide::kSource:
        for (const NodeId u : nbrs) row += x.row(u) / static_cast<double>(graph.degree(u));
        break;
    }
  }
  return out;
}

}  // namespace

Matrix aggregate(const Graph& graph, const Matrix& x, AggregatorKind kind) {
  return gather(graph, x,
                kind == AggregatorKind::kGcn ? NormSide::kSymmetric : NormSide::kTarget);
}

Matrix aggregate_transpose(const Graph& graph, const Matrix& x, AggregatorKind kind) {
  // gcn's D^{-1/2} A D^{-1/2} is symmetric; mean's D^{-1} A transposes to A D^{-1}.
  return gather(graph, x,
                kind == AggregatorKind::kGcn ? NormSide::kSymmetric : NormSide::kSource);
}

Matrix kprop(const Graph& graph, Matrix x, int steps, AggregatorKind kind) {
  if (steps < 0) throw ArgumentError("KProp step count must be non-negative");
  for (int k = 0; k < steps; ++k) x = aggregate(graph, x, kind);
  return x;
}

Matrix kprop_transpose(const Graph& graph, Matrix x, int steps, AggregatorKind kind) {
  if (steps < 0) throw ArgumentError("KProp step count must be non-negative");
  for (int k = 0; k < steps; ++k) x = aggregate_transpose(graph, x, kind);
  return x;
}

std::vector<std::int32_t> estimate_labels(const Graph& graph,
                                          const Matrix& y_perturbed_one_hot,
                                          int steps) {
  const Matrix propagated = kprop(graph, y_perturbed_one_hot, steps, AggregatorKind::kGcn);
  const NodeId n = graph.num_nodes();
  std::vector<std::int32_t> out(n, kUnlabeled);
  for (NodeId v = 0; v < n; ++v) {
    const bool labeled = y_perturbed_one_hot.row(v).sum() > 0.0;
    if (!labeled) continue;
    if (propagated.row(v).maxCoeff() <= 0.0) {
      // No labeled mass reached this node; keep its own perturbed label.
      Eigen::Index own;
      y_perturbed_one_hot.row(v).maxCoeff(&own);
      out[v] = static_cast<std::int32_t>(own);
      continue;
    }
    // Ascending scan with strict improvement: ties go to the lowest class.
    Eigen::Index best = 0;
    for (Eigen::Index j = 1; j < propagated.cols(); ++j) {
      if (propagated(v, j) > propagated(v, best)) best = j;
    }
    out[v] = static_cast<std::int32_t>(best);
  }
  return out;
}

}  // namespace lpg
