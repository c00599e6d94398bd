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

#include <doctest.h>

#include "lpg/dataset.hpp"
#include "lpg/errors.hpp"
#include "lpg/mechanisms.hpp"
#include "lpg/propagate.hpp"
#include "oracles.hpp"
#include "testutil.hpp"

using namespace lpg;

TEST_SUITE_BEGIN("propagate");

TEST_CASE("gcn aggregation on a single edge copies the neighbor") {
  const Graph g = testutil::path_graph(2);
  Matrix x(2, 2);
  x << 1, 2, 3, 4;
  const Matrix out = aggregate(g, x, AggregatorKind::kGcn);
  CHECK(out(0, 0) == doctest::Approx(3));  // deg(u)=deg(v)=1, norm = 1
  CHECK(out(0, 1) == doctest::Approx(4));
  CHECK(out(1, 0) == doctest::Approx(1));
}

TEST_CASE("mean aggregation on a path") {
  const Graph g = testutil::path_graph(3);  // A-B-C
  Matrix x(3, 1);
  x << 1, 10, 100;
  const Matrix out = aggregate(g, x, AggregatorKind::kMean);
  CHECK(out(1, 0) == doctest::Approx((1.0 + 100.0) / 2));
  CHECK(out(0, 0) == doctest::Approx(10.0));
}

TEST_CASE("isolated nodes aggregate to zero") {
  const Graph g = Graph::from_edges(3, {{0, 1}});
  Matrix x(3, 2);
  x << 1, 1, 2, 2, 3, 3;
  for (const auto kind : {AggregatorKind::kGcn, AggregatorKind::kMean}) {
    const Matrix out = aggregate(g, x, kind);
    CHECK(out.row(2).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("aggregate rejects mismatched shapes") {
  const Graph g = testutil::path_graph(3);
  const Matrix x = Matrix::Zero(4, 2);
  CHECK_THROWS_AS(aggregate(g, x, AggregatorKind::kGcn), ShapeError);
}

TEST_CASE("kprop: zero steps is the identity") {
  const Graph g = testutil::path_graph(5);
  Matrix x = Matrix::Random(5, 3);
  CHECK(kprop(g, x, 0, AggregatorKind::kGcn) == x);
}

TEST_CASE("two mean steps on a path") {
  const Graph g = testutil::path_graph(3);
  Matrix x(3, 1);
  x << 4, 0, 8;
  const Matrix out = kprop(g, x, 2, AggregatorKind::kMean);
  CHECK(out(0, 0) == doctest::Approx((4.0 + 8.0) / 2));
}

TEST_CASE("kprop composes additively in the step count") {
  SbmParams p;
  p.num_nodes = 40;
  p.num_classes = 4;
  p.feature_dim = 6;
  p.p_in = 0.2;
  p.p_out = 0.02;
  p.seed = 5;
  const Dataset ds = generate_sbm(p);
  const Matrix x = ds.features.values;
  for (const auto kind : {AggregatorKind::kGcn, AggregatorKind::kMean}) {
    const Matrix whole = kprop(ds.graph, x, 5, kind);
    const Matrix parts = kprop(ds.graph, kprop(ds.graph, x, 2, kind), 3, kind);
    CHECK((whole - parts).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("aggregation is linear") {
  SbmParams p;
  p.num_nodes = 30;
  p.num_classes = 3;
  p.feature_dim = 4;
  p.p_in = 0.3;
  p.p_out = 0.05;
  p.seed = 9;
  const Dataset ds = generate_sbm(p);
  Rng rng(2);
  Matrix x(30, 4), z(30, 4);
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    x.data()[i] = rng.uniform(-1, 1);
    z.data()[i] = rng.uniform(-1, 1);
  }
  for (const auto kind : {AggregatorKind::kGcn, AggregatorKind::kMean}) {
    const Matrix lhs = aggregate(ds.graph, 2.5 * x - 0.75 * z, kind);
    const Matrix rhs =
        2.5 * aggregate(ds.graph, x, kind) - 0.75 * aggregate(ds.graph, z, kind);
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("kprop matches the dense matrix-power oracle") {
  SbmParams p;
  p.num_nodes = 50;
  p.num_classes = 5;
  p.feature_dim = 7;
  p.p_in = 0.25;
  p.p_out = 0.03;
  p.seed = 13;
  const Dataset ds = generate_sbm(p);
  const Matrix x = ds.features.values;
  for (const auto kind : {AggregatorKind::kGcn, AggregatorKind::kMean}) {
    for (const int steps : {1, 2, 4}) {
      const Matrix sparse = kprop(ds.graph, x, steps, kind);
      const Matrix dense = oracles::dense_kprop(ds.graph, x, steps, kind);
      CHECK((sparse - dense).cwiseAbs().maxCoeff() <= 1e-10);
    }
  }
}

TEST_CASE("aggregate_transpose is the adjoint of aggregate") {
  SbmParams p;
  p.num_nodes = 35;
  p.num_classes = 5;
  p.feature_dim = 3;
  p.p_in = 0.2;
  p.p_out = 0.04;
  p.seed = 23;
  const Dataset ds = generate_sbm(p);
  Rng rng(4);
  Matrix x(35, 3), y(35, 3);
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    x.data()[i] = rng.uniform(-1, 1);
    y.data()[i] = rng.uniform(-1, 1);
  }
  for (const auto kind : {AggregatorKind::kGcn, AggregatorKind::kMean}) {
    const double lhs = (aggregate(ds.graph, x, kind).cwiseProduct(y)).sum();
    const double rhs = (x.cwiseProduct(aggregate_transpose(ds.graph, y, kind))).sum();
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
  }
}

TEST_CASE("estimate_labels with zero steps returns the perturbed labels") {
  const Graph g = testutil::path_graph(4);
  LabelStore labels({0, 1, kUnlabeled, 2}, 3);
  const auto est = estimate_labels(g, labels.one_hot(labels.clean()), 0);
  CHECK(est == std::vector<std::int32_t>{0, 1, kUnlabeled, 2});
}

TEST_CASE("two gcn steps on a star pull the majority leaf label") {
  // Center (node 0) unlabeled; leaves labeled 1, 1, 2.
  const Graph g = testutil::star_graph(3);
  LabelStore labels({kUnlabeled, 1, 1, 2}, 3);
  const auto est = estimate_labels(g, labels.one_hot(labels.clean()), 2);
  CHECK(est[0] == kUnlabeled);  // unlabeled nodes stay unlabeled
  CHECK(est[1] == 1);
  CHECK(est[2] == 1);
  CHECK(est[3] == 1);  // leaf labeled 2 is outvoted through the center
}

TEST_CASE("isolated labeled nodes fall back to their own label") {
  const Graph g = Graph::from_edges(3, {{0, 1}});
  LabelStore labels({0, 1, 2}, 3);
  const auto est = estimate_labels(g, labels.one_hot(labels.clean()), 2);
  CHECK(est[2] == 2);
}

TEST_CASE("argmax ties break toward the lowest class") {
  // Node 0 sees one neighbor of class 2 and one of class 1, symmetric weights.
  const Graph g = Graph::from_edges(3, {{0, 1}, {0, 2}});
  LabelStore labels({kUnlabeled, 2, 1}, 3);
  const auto est = estimate_labels(g, labels.one_hot(labels.clean()), 2);
  // After two steps both leaves see equal mass of classes 1 and 2.
  CHECK(est[1] == 1);
  CHECK(est[2] == 1);
}

TEST_CASE("clean labels on a homophilous SBM propagate to the block label") {
  SbmParams p;
  p.num_nodes = 20;
  p.num_classes = 2;
  p.feature_dim = 1;
  p.p_in = 0.8;
  p.p_out = 0.0;  // disconnected blocks
  p.seed = 31;
  const Dataset ds = generate_sbm(p);
  const auto est = estimate_labels(ds.graph, ds.labels.one_hot(ds.labels.clean()), 2);
  for (NodeId v = 0; v < ds.graph.num_nodes(); ++v) {
    if (ds.graph.degree(v) == 0) continue;
    CHECK(est[v] == ds.labels.clean(v));
  }
}

TEST_SUITE_END();
