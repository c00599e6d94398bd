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

#ifndef LPG_GRAPH_HPP_
#define LPG_GRAPH_HPP_

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "lpg/types.hpp"

namespace lpg {

// Immutable undirected graph in CSR form.
//
// Invariants (established at construction, checkable via validate()):
//   - adjacency is symmetric: u in N(v) iff v in N(u)
//   - no self-loops, no duplicate neighbors
//   - each neighbor list is sorted ascending; offsets are non-decreasing
//
// Safe for concurrent reads; construction is single-threaded.
class Graph {
 public:
  Graph() = default;

  // Builds from an edge list. Edges are treated as undirected: reverse
  // duplicates and repeated edges collapse to one edge, self-loops are
  // dropped.
  static Graph from_edges(NodeId num_nodes,
                          const std::vector<std::pair<NodeId, NodeId>>& edges);

  NodeId num_nodes() const { return num_nodes_; }

  // Undirected edge count.
  std::int64_t num_edges() const { return num_edges_; }

  std::int64_t degree(NodeId v) const { return offsets_[v + 1] - offsets_[v]; }

  std::span<const NodeId> neighbors(NodeId v) const {
    return {neighbors_.data() + offsets_[v],
            static_cast<std::size_t>(offsets_[v + 1] - offsets_[v])};
  }

  const std::vector<std::int64_t>& csr_offsets() const { return offsets_; }
  const std::vector<NodeId>& csr_neighbors() const { return neighbors_; }

  // Re-checks every invariant in O(V + E); throws StructuralError.
  void validate() const;

 private:
  NodeId num_nodes_ = 0;
  std::int64_t num_edges_ = 0;
  std::vector<std::int64_t> offsets_ = {0};
  std::vector<NodeId> neighbors_;
};

}  // namespace lpg

#endif  // LPG_GRAPH_HPP_
