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

#include "lpg/mechanisms.hpp"
#include "lpg/wire.hpp"

namespace {

using namespace lpg;

void BM_MultibitEncode(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  MechanismParams params;
  params.epsilon = 1.0;
  params.d = d;
  params.m = optimal_m(1.0, d);
  std::vector<double> x(d);
  Rng rng(1);
  for (auto& v : x) v = rng.uniform();
  for (auto _ : state) {
    benchmark::DoNotOptimize(multibit_encode(x, params, rng));
  }
  state.SetItemsProcessed(state.iterations() * d);
}
BENCHMARK(BM_MultibitEncode)->Arg(128)->Arg(1433)->Arg(8192);

void BM_EncodeRectifyRoundTrip(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  MechanismParams params;
  params.epsilon = 1.0;
  params.d = d;
  params.m = optimal_m(1.0, d);
  std::vector<double> x(d);
  Rng rng(2);
  for (auto& v : x) v = rng.uniform();
  for (auto _ : state) {
    benchmark::DoNotOptimize(multibit_rectify(multibit_encode(x, params, rng), params));
  }
  state.SetItemsProcessed(state.iterations() * d);
}
BENCHMARK(BM_EncodeRectifyRoundTrip)->Arg(1433);

void BM_PackRow(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  Rng rng(3);
  std::vector<std::int8_t> row(d);
  for (auto& e : row) e = static_cast<std::int8_t>(rng.uniform_int(-1, 1));
  std::vector<std::uint8_t> packed(packed_row_bytes(d));
  for (auto _ : state) {
    pack_row(row, packed);
    benchmark::DoNotOptimize(packed.data());
  }
  state.SetBytesProcessed(state.iterations() * packed.size());
}
BENCHMARK(BM_PackRow)->Arg(1433);

void BM_RandomizedResponse(benchmark::State& state) {
  Rng rng(4);
  std::int32_t y = 3;
  for (auto _ : state) {
    y = randomized_response(y, 1.0, 7, rng);
    benchmark::DoNotOptimize(y);
  }
}
BENCHMARK(BM_RandomizedResponse);

}  // namespace
