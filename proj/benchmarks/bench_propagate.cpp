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

#include <benchmark/benchmark.h>

#include "lpg/dataset.hpp"
#include "lpg/propagate.hpp"

namespace {

using namespace lpg;

Dataset bench_graph(NodeId n, int d) {
  SbmParams p;
  p.num_nodes = n;
  p.num_classes = 8;
  p.feature_dim = d;
  p.p_in = 8.0 / static_cast<double>(n);  // average degree ~ 2
  p.p_out = 2.0 / static_cast<double>(n);
  p.seed = 5;
  return generate_sbm(p);
}

void BM_AggregateGcn(benchmark::State& state) {
  const auto ds = bench_graph(static_cast<NodeId>(state.range(0)),
                              static_cast<int>(state.range(1)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(aggregate(ds.graph, ds.features.values, AggregatorKind::kGcn));
  }
  state.SetItemsProcessed(state.iterations() * ds.graph.num_edges() * state.range(1));
}
BENCHMARK(BM_AggregateGcn)->Args({2000, 64})->Args({10000, 64})->Args({2000, 1024});

void BM_KProp16(benchmark::State& state) {
  const auto ds = bench_graph(static_cast<NodeId>(state.range(0)), 128);
  for (auto _ : state) {
    benchmark::DoNotOptimize(kprop(ds.graph, ds.features.values, 16, AggregatorKind::kGcn));
  }
}
BENCHMARK(BM_KProp16)->Arg(2000)->Arg(10000);

void BM_EstimateLabels(benchmark::State& state) {
  const auto ds = bench_graph(static_cast<NodeId>(state.range(0)), 4);
  const Matrix one_hot = ds.labels.one_hot(ds.labels.clean());
  for (auto _ : state) {
    benchmark::DoNotOptimize(estimate_labels(ds.graph, one_hot, 8));
  }
}
BENCHMARK(BM_EstimateLabels)->Arg(10000);

}  // namespace

BENCHMARK_MAIN();
