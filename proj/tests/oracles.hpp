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
//
// Test-only oracles, kept independent of the library code paths they check:
// exact output-distribution enumeration for the multi-bit encoder, dense
// matrix-power propagation, and central finite differences.

#ifndef LPG_TESTS_ORACLES_HPP_
#define LPG_TESTS_ORACLES_HPP_

#include <cmath>
#include <functional>
#include <vector>

#include "lpg/graph.hpp"
#include "lpg/mechanisms.hpp"
#include "lpg/propagate.hpp"
#include "lpg/types.hpp"

namespace lpg::oracles {

// All vectors over {-1, 0, +1}^d.
inline std::vector<std::vector<std::int8_t>> all_encoder_outputs(int d) {
  std::vector<std::vector<std::int8_t>> outputs(1);
  for (int i = 0; i < d; ++i) {
    std::vector<std::vector<std::int8_t>> next;
    for (const auto& prefix : outputs) {
      for (const std::int8_t e : {-1, 0, 1}) {
        auto row = prefix;
        row.push_back(e);
        next.push_back(std::move(row));
      }
    }
    outputs = std::move(next);
  }
  return outputs;
}

// Exact probability that the encoder maps x to `out`, from the mechanism's
// definition: the support must be a uniformly-chosen m-subset, and each
// sampled coordinate is an independent biased coin.
inline double encoder_output_probability(const std::vector<std::int8_t>& out,
                                         const std::vector<double>& x,
                                         const MechanismParams& params) {
  const int d = params.d;
  int support = 0;
  for (const auto e : out) support += e != 0;
  if (support != params.m) return 0.0;

  // 1 / C(d, m)
  double inv_choose = 1.0;
  for (int i = 0; i < params.m; ++i) {
    inv_choose *= static_cast<double>(i + 1) / static_cast<double>(d - i);
  }

  const double z = params.epsilon / params.m;
  const double gain = std::tanh(0.5 * z);
  const double base = 0.5 * (1.0 - gain);
  double prob = inv_choose;
  for (int i = 0; i < d; ++i) {
    if (out[i] == 0) continue;
    const double pos = (x[i] - params.alpha) / (params.beta - params.alpha);
    const double p_plus = base + pos * gain;
    prob *= out[i] == 1 ? p_plus : 1.0 - p_plus;
  }
  return prob;
}

// Dense propagation oracle: materializes the normalized adjacency matrix and
// multiplies K times. Only usable on small graphs.
inline Matrix dense_kprop(const Graph& graph, const Matrix& x, int steps,
                          AggregatorKind kind) {
  const NodeId n = graph.num_nodes();
  Matrix a = Matrix::Zero(n, n);
  for (NodeId v = 0; v < n; ++v) {
    for (const NodeId u : graph.neighbors(v)) {
      if (kind == AggregatorKind::kGcn) {
        a(v, u) = 1.0 / std::sqrt(static_cast<double>(graph.degree(v)) *
                                  static_cast<double>(graph.degree(u)));
      } else {
        a(v, u) = 1.0 / static_cast<double>(graph.degree(v));
      }
    }
  }
  Matrix out = x;
  for (int k = 0; k < steps; ++k) out = a * out;
  return out;
}

// Central finite difference of a scalar function of a flat parameter vector.
inline double central_difference(const std::function<double(const Vector&)>& f,
                                 Vector at, Eigen::Index coordinate, double step) {
  const double original = at[coordinate];
  at[coordinate] = original + step;
  const double up = f(at);
  at[coordinate] = original - step;
  const double down = f(at);
  return (up - down) / (2.0 * step);
}

}  // namespace lpg::oracles

#endif  // LPG_TESTS_ORACLES_HPP_
