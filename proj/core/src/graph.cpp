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

#include "lpg/graph.hpp"

#include <algorithm>
#include <string>

#include "lpg/errors.hpp"

namespace lpg {

Graph Graph::from_edges(NodeId num_nodes,
                        const std::vector<std::pair<NodeId, NodeId>>& edges) {
  if (num_nodes <= 0) {
    throw StructuralError("graph must have at least one node");
  }

  std::vector<std::pair<NodeId, NodeId>> arcs;
  arcs.reserve(edges.size() * 2);
  for (const auto& [u, v] : edges) {
    if (u < 0 || v < 0 || u >= num_nodes || v >= num_nodes) {
      throw StructuralError("edge endpoint out of range: " + std::to_string(u) +
                            "-" + std::to_string(v));
    }
    if (u == v) continue;  // self-loops are dropped at ingestion
    arcs.emplace_back(u, v);
    arcs.emplace_back(v, u);
  }
  std::sort(arcs.begin(), arcs.end());
  arcs.erase(std::unique(arcs.begin(), arcs.end()), arcs.end());

  Graph g;
  g.num_nodes_ = num_nodes;
  g.num_edges_ = static_cast<std::int64_t>(arcs.size()) / 2;
  g.offsets_.assign(static_cast<std::size_t>(num_nodes) + 1, 0);
  g.neighbors_.resize(arcs.size());
  for (const auto& [u, v] : arcs) g.offsets_[u + 1]++;
  for (NodeId v = 0; v < num_nodes; ++v) g.offsets_[v + 1] += g.offsets_[v];
  std::size_t pos = 0;
  for (const auto& [u, v] : arcs) g.neighbors_[pos++] = v;  // arcs sorted by (u, v)
  return g;
}

void Graph::validate() const {
  if (num_nodes_ <= 0) throw StructuralError("empty graph");
  if (offsets_.size() != static_cast<std::size_t>(num_nodes_) + 1 ||
      offsets_.front() != 0 ||
      offsets_.back() != static_cast<std::int64_t>(neighbors_.size())) {
    throw StructuralError("CSR offsets are inconsistent with storage");
  }
  if (static_cast<std::int64_t>(neighbors_.size()) != 2 * num_edges_) {
    throw StructuralError("arc count does not match undirected edge count");
  }
  for (NodeId v = 0; v < num_nodes_; ++v) {
    if (offsets_[v] > offsets_[v + 1]) {
      throw StructuralError("offsets not non-decreasing at node " + std::to_string(v));
    }
    auto row = neighbors(v);
    for (std::size_t i = 0; i < row.size(); ++i) {
      const NodeId u = row[i];
      if (u < 0 || u >= num_nodes_) {
        throw StructuralError("neighbor id out of range at node " + std::to_string(v));
      }
      if (u == v) throw StructuralError("self-loop stored at node " + std::to_string(v));
      if (i > 0 && row[i - 1] >= u) {
        throw StructuralError("neighbor list not sorted/deduplicated at node " +
                              std::to_string(v));
      }
      // reverse edge must exist
      auto back = neighbors(u);
      if (!std::binary_search(back.begin(), back.end(), v)) {
        throw StructuralError("missing reverse edge " + std::to_string(u) + "-" +
                              std::to_string(v));
      }
    }
  }
}

}  // namespace lpg
