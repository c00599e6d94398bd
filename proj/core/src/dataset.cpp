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

#include "lpg/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <string_view>

#include "lpg/errors.hpp"
#include "lpg/rng.hpp"

namespace lpg {
namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return std::move(buf).str();
}

// Splits on a single separator; leading/trailing whitespace is not trimmed
// except for a trailing '\r' (files may be CRLF).
std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  while (true) {
    const auto pos = line.find(sep);
    out.push_back(line.substr(0, pos));
    if (pos == std::string_view::npos) break;
    line.remove_prefix(pos + 1);
  }
  if (!out.empty() && !out.back().empty() && out.back().back() == '\r') {
    out.back().remove_suffix(1);
  }
  return out;
}

long parse_int(std::string_view token, long line_no, const char* what) {
  long value = 0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc{} || ptr != token.data() + token.size()) {
    throw ParseError(std::string("expected integer ") + what + ", got '" +
                         std::string(token) + "'",
                     line_no);
  }
  return value;
}

double parse_real(std::string_view token, long line_no) {
  double value = 0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc{} || ptr != token.data() + token.size()) {
    throw ParseError("expected real number, got '" + std::string(token) + "'", line_no);
  }
  return value;
}

// Geometric skip over [begin, end) hitting each index with probability p.
template <class Fn>
void sample_bernoulli_range(NodeId begin, NodeId end, double p, Rng& rng, Fn&& emit) {
  if (p <= 0.0 || begin >= end) return;
  if (p >= 1.0) {
    for (NodeId j = begin; j < end; ++j) emit(j);
    return;
  }
  const double denom = std::log1p(-p);
  std::int64_t j = static_cast<std::int64_t>(begin) - 1;
  while (true) {
    double u = rng.uniform();
    if (u <= 0.0) u = 0x1.0p-53;
    j += 1 + static_cast<std::int64_t>(std::floor(std::log(u) / denom));
    if (j >= end) break;
    emit(static_cast<NodeId>(j));
  }
}

}  // namespace

LabelStore::LabelStore(std::vector<std::int32_t> clean, int num_classes)
    : clean_(std::move(clean)), num_classes_(num_classes) {
  for (std::size_t v = 0; v < clean_.size(); ++v) {
    if (clean_[v] != kUnlabeled && (clean_[v] < 0 || clean_[v] >= num_classes_)) {
      throw StructuralError("label out of range at node " + std::to_string(v));
    }
  }
}

Matrix LabelStore::one_hot(const std::vector<std::int32_t>& labels) const {
  if (labels.size() != clean_.size()) {
    throw ShapeError("label vector length does not match node count");
  }
  Matrix out = Matrix::Zero(static_cast<Eigen::Index>(labels.size()), num_classes_);
  for (std::size_t v = 0; v < labels.size(); ++v) {
    if (labels[v] == kUnlabeled) continue;
    if (labels[v] < 0 || labels[v] >= num_classes_) {
      throw StructuralError("label out of range at node " + std::to_string(v));
    }
    out(static_cast<Eigen::Index>(v), labels[v]) = 1.0;
  }
  return out;
}

Dataset load_graph(const std::filesystem::path& edge_path,
                   const std::filesystem::path& node_path) {
  const std::string node_text = read_file(node_path);
  const std::string edge_text = read_file(edge_path);

  // ---- nodes file ----
  std::istringstream nodes_in(node_text);
  std::string line;
  long line_no = 0;

  if (!std::getline(nodes_in, line)) throw StructuralError("nodes file is empty");
  ++line_no;
  const auto header = split(line, '\t');
  if (header.size() != 3 || header[0] != "id" || header[1] != "label") {
    throw ParseError("nodes header must be 'id<TAB>label<TAB>f0,f1,...'", line_no);
  }
  const auto feature_names = split(header[2], ',');
  const int d = static_cast<int>(feature_names.size());
  if (d < 1) throw ParseError("nodes header declares no features", line_no);

  std::vector<std::int32_t> ids;
  std::vector<std::int32_t> labels;
  std::vector<double> feature_rows;
  while (std::getline(nodes_in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    const auto cols = split(line, '\t');
    if (cols.size() != 3) {
      throw ParseError("expected 3 tab-separated columns", line_no);
    }
    ids.push_back(static_cast<std::int32_t>(parse_int(cols[0], line_no, "node id")));
    if (cols[1] == "-") {
      labels.push_back(kUnlabeled);
    } else {
      const long y = parse_int(cols[1], line_no, "label");
      if (y < 0) throw ParseError("labels must be non-negative or '-'", line_no);
      labels.push_back(static_cast<std::int32_t>(y));
    }
    const auto feats = split(cols[2], ',');
    if (static_cast<int>(feats.size()) != d) {
      throw StructuralError("row declares " + std::to_string(feats.size()) +
                            " features but header declares " + std::to_string(d) +
                            " (line " + std::to_string(line_no) + ")");
    }
    for (const auto& f : feats) feature_rows.push_back(parse_real(f, line_no));
  }

  const NodeId n = static_cast<NodeId>(ids.size());
  if (n == 0) throw StructuralError("nodes file declares no nodes");

  // ids must be a permutation of 0..n-1; rows may arrive in any order.
  std::vector<std::int32_t> position(n, -1);
  for (NodeId row = 0; row < n; ++row) {
    const std::int32_t id = ids[row];
    if (id < 0 || id >= n) {
      throw StructuralError("node id " + std::to_string(id) + " out of range [0, " +
                            std::to_string(n) + ")");
    }
    if (position[id] != -1) throw StructuralError("duplicate node id " + std::to_string(id));
    position[id] = row;
  }

  Matrix values(n, d);
  std::vector<std::int32_t> clean(n, kUnlabeled);
  int num_classes = 0;
  for (NodeId id = 0; id < n; ++id) {
    const std::int32_t row = position[id];
    for (int j = 0; j < d; ++j) {
      values(id, j) = feature_rows[static_cast<std::size_t>(row) * d + j];
    }
    clean[id] = labels[row];
    if (clean[id] != kUnlabeled) num_classes = std::max(num_classes, clean[id] + 1);
  }

  // ---- edges file ----
  std::istringstream edges_in(edge_text);
  std::vector<std::pair<NodeId, NodeId>> edges;
  line_no = 0;
  while (std::getline(edges_in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    const auto cols = split(line, '\t');
    if (cols.size() != 2) throw ParseError("expected 'u<TAB>v'", line_no);
    const long u = parse_int(cols[0], line_no, "node id");
    const long v = parse_int(cols[1], line_no, "node id");
    if (u < 0 || v < 0 || u >= n || v >= n) {
      throw StructuralError("edge endpoint " + std::to_string(u) + "-" +
                            std::to_string(v) + " out of range (line " +
                            std::to_string(line_no) + ")");
    }
    edges.emplace_back(static_cast<NodeId>(u), static_cast<NodeId>(v));
  }

  Dataset ds;
  ds.graph = Graph::from_edges(n, edges);
  ds.features.values = std::move(values);
  ds.features.alpha = ds.features.values.minCoeff();
  ds.features.beta = ds.features.values.maxCoeff();
  if (ds.features.alpha == ds.features.beta) ds.features.beta = ds.features.alpha + 1.0;
  ds.labels = LabelStore(std::move(clean), num_classes);
  ds.name = node_path.parent_path().filename().string();
  if (ds.name.empty()) ds.name = node_path.stem().string();
  ds.content_hash = fnv1a(edge_text, fnv1a(node_text));
  return ds;
}

Dataset generate_sbm(const SbmParams& p) {
  if (p.num_classes < 2) throw ArgumentError("SBM needs at least 2 classes");
  if (!(p.p_in > p.p_out)) {
    throw ArgumentError("SBM requires p_in > p_out (no homophily otherwise)");
  }
  if (p.p_in > 1.0 || p.p_out < 0.0) throw ArgumentError("SBM probabilities out of [0, 1]");
  if (p.num_nodes < p.num_classes) throw ArgumentError("SBM needs at least one node per class");
  if (p.feature_dim < 1) throw ArgumentError("SBM feature dimension must be positive");
  if (p.feature_signal < 0.0 || p.feature_signal > 1.0) {
    throw ArgumentError("feature_signal must lie in [0, 1]");
  }

  const NodeId n = p.num_nodes;
  const int c = p.num_classes;

  // Contiguous, near-equal blocks: the first n % c blocks get one extra node.
  std::vector<std::int32_t> block(n);
  std::vector<NodeId> block_end(c);
  {
    NodeId next = 0;
    for (int k = 0; k < c; ++k) {
      NodeId size = n / c + (k < n % c ? 1 : 0);
      next += size;
      block_end[k] = next;
    }
    int k = 0;
    for (NodeId v = 0; v < n; ++v) {
      while (v >= block_end[k]) ++k;
      block[v] = k;
    }
  }

  std::vector<std::pair<NodeId, NodeId>> edges;
  Rng edge_rng = node_stream(p.seed, 0, "sbm-edges");
  for (NodeId i = 0; i < n; ++i) {
    const NodeId same_end = block_end[block[i]];
    auto emit = [&](NodeId j) { edges.emplace_back(i, j); };
    sample_bernoulli_range(i + 1, same_end, p.p_in, edge_rng, emit);
    sample_bernoulli_range(same_end, n, p.p_out, edge_rng, emit);
  }

  Matrix values(n, p.feature_dim);
  for (NodeId v = 0; v < n; ++v) {
    Rng rng = node_stream(p.seed, static_cast<std::uint64_t>(v), "sbm-feat");
    for (int j = 0; j < p.feature_dim; ++j) {
      const bool preferred = (j % c) == block[v];
      const double prob = preferred ? 0.5 + 0.5 * p.feature_signal
                                    : 0.5 - 0.5 * p.feature_signal;
      values(v, j) = rng.bernoulli(prob) ? 1.0 : 0.0;
    }
  }

  Dataset ds;
  ds.graph = Graph::from_edges(n, edges);
  ds.features.values = std::move(values);
  ds.features.alpha = 0.0;
  ds.features.beta = 1.0;
  ds.labels = LabelStore(std::move(block), c);
  {
    std::ostringstream name;
    name << "sbm-n" << n << "-c" << c << "-d" << p.feature_dim << "-pin" << p.p_in
         << "-pout" << p.p_out << "-sig" << p.feature_signal;
    ds.name = name.str();
  }
  ds.content_hash = hash_combine(fnv1a(ds.name), p.seed);
  return ds;
}

DataSplit split_nodes(const Graph& graph, std::array<double, 3> ratios,
                      std::uint64_t seed) {
  const double total = ratios[0] + ratios[1] + ratios[2];
  if (std::abs(total - 1.0) > 1e-9 || ratios[0] < 0 || ratios[1] < 0 || ratios[2] < 0) {
    throw ArgumentError("split ratios must be non-negative and sum to 1");
  }
  const NodeId n = graph.num_nodes();
  auto n_train = static_cast<std::size_t>(std::floor(ratios[0] * n));
  const auto n_val = static_cast<std::size_t>(std::floor(ratios[1] * n));
  const auto n_test = static_cast<std::size_t>(std::floor(ratios[2] * n));
  n_train += static_cast<std::size_t>(n) - (n_train + n_val + n_test);  // remainder to train

  std::vector<NodeId> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(hash_combine(seed, fnv1a("split")));
  rng.shuffle(order.begin(), order.end());

  DataSplit split;
  split.seed = seed;
  split.train_ids.assign(order.begin(), order.begin() + n_train);
  split.val_ids.assign(order.begin() + n_train, order.begin() + n_train + n_val);
  split.test_ids.assign(order.begin() + n_train + n_val, order.end());
  std::sort(split.train_ids.begin(), split.train_ids.end());
  std::sort(split.val_ids.begin(), split.val_ids.end());
  std::sort(split.test_ids.begin(), split.test_ids.end());
  return split;
}

FeatureMatrix normalize_features(const FeatureMatrix& features) {
  FeatureMatrix out;
  out.alpha = 0.0;
  out.beta = 1.0;
  out.values = features.values;
  for (Eigen::Index j = 0; j < out.values.cols(); ++j) {
    auto col = out.values.col(j);
    const double lo = col.minCoeff();
    const double hi = col.maxCoeff();
    if (hi > lo) {
      col = (col.array() - lo) / (hi - lo);
    } else {
      col.setZero();  // constant column, no information to keep
    }
  }
  return out;
}

}  // namespace lpg
