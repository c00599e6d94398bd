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

#ifndef LPG_MECHANISMS_HPP_
#define LPG_MECHANISMS_HPP_

#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lpg/rng.hpp"
#include "lpg/types.hpp"
#include "lpg/wire.hpp"

namespace lpg {

// Parameters of the multi-bit encoder: privacy budget epsilon, sampling
// parameter m (how many of the d dimensions are perturbed), and the value
// range [alpha, beta] every input coordinate must lie in.
struct MechanismParams {
  double epsilon = 1.0;
  int m = 1;
  double alpha = 0.0;
  double beta = 1.0;
  int d = 1;

  void validate() const;
  bool operator==(const MechanismParams&) const = default;
};

// Encoded node rows over {-1, 0, +1}, stored in the packed 2-bit wire form
// together with the parameters that produced them.
class EncodedMatrix {
 public:
  EncodedMatrix(NodeId num_nodes, const MechanismParams& params);

  NodeId num_nodes() const { return num_nodes_; }
  const MechanismParams& params() const { return params_; }
  std::size_t row_bytes() const { return row_bytes_; }

  void set_row(NodeId v, std::span<const std::int8_t> row);
  void set_packed_row(NodeId v, std::span<const std::uint8_t> bytes);
  std::vector<std::int8_t> row(NodeId v) const;
  std::span<const std::uint8_t> packed_row(NodeId v) const;
  const std::vector<std::uint8_t>& packed() const { return bytes_; }

 private:
  NodeId num_nodes_;
  MechanismParams params_;
  std::size_t row_bytes_;
  std::vector<std::uint8_t> bytes_;
};

// Row-stochastic c x c label-flip matrix of generalized randomized response:
// diagonal e^eps / (e^eps + c - 1), off-diagonal 1 / (e^eps + c - 1).
struct TransitionMatrix {
  Matrix probs;

  int num_classes() const { return static_cast<int>(probs.rows()); }
  bool is_identity() const;
  void validate() const;
};

// Sampling parameter minimizing the rectifier's worst-case variance:
// max(1, min(d, floor(epsilon / 2.18))).
int optimal_m(double epsilon, int d);

// User-side encoder. Samples m of d dimensions without replacement; each
// sampled coordinate becomes +1 with probability
//   1/(e^{eps/m}+1) + (x_i - alpha)/(beta - alpha) * (e^{eps/m}-1)/(e^{eps/m}+1)
// and -1 otherwise; unsampled coordinates are 0.
// Throws DomainError if any x_i lies outside [alpha, beta].
std::vector<std::int8_t> multibit_encode(std::span<const double> x,
                                         const MechanismParams& params, Rng& rng);

// Server-side affine rectifier making the encoder's output unbiased:
//   x' = d(beta-alpha)/(2m) * (e^{eps/m}+1)/(e^{eps/m}-1) * x* + (alpha+beta)/2
Vector multibit_rectify(std::span<const std::int8_t> x_star,
                        const MechanismParams& params);
Matrix multibit_rectify(const EncodedMatrix& encoded);

// Variance of one rectified coordinate at private value x_i.
double rectifier_variance(double x_i, const MechanismParams& params);

// Baseline: per-dimension budget eps/d, zero-mean Laplace noise with
// scale d*(beta-alpha)/eps added to every coordinate.
Vector laplace_perturb(std::span<const double> x, double epsilon, double alpha,
                       double beta, Rng& rng);

// Smallest sigma satisfying the analytic (eps, delta) Gaussian condition
//   Phi(s/(2*sigma) - eps*sigma/s) - e^eps * Phi(-s/(2*sigma) - eps*sigma/s) <= delta
// for L2 sensitivity s, found by bisection to 1e-9 relative tolerance.
// Throws NumericError if the bracket search fails to converge.
double gaussian_sigma(double epsilon, double delta, double sensitivity);

// Left side of the analytic Gaussian condition (exposed for residual checks).
double gaussian_dp_condition(double sigma, double epsilon, double sensitivity);

// Baseline: adds N(0, sigma^2) per coordinate, sigma calibrated with
// L2 sensitivity sqrt(d)*(beta-alpha).
Vector gaussian_perturb(std::span<const double> x, double sigma, Rng& rng);

// Generalized randomized response: keeps y with probability
// e^eps/(e^eps + c - 1), otherwise flips to a uniformly random other class.
std::int32_t randomized_response(std::int32_t y, double epsilon, int num_classes,
                                 Rng& rng);

// The matrix form of randomized response; identity when epsilon is infinite.
TransitionMatrix rr_transition(double epsilon, int num_classes);

// Per-node invocation counts and spent budget per mechanism. Used to assert
// the end-to-end guarantee: each randomizer runs at most once per node and
// the total budget is the sum of the per-mechanism budgets.
class PrivacyLedger {
 public:
  explicit PrivacyLedger(NodeId num_nodes);

  // Records one invocation of `mechanism` on node v with budget eps.
  // Throws BudgetError if the same mechanism was recorded with a different
  // budget earlier in the run.
  void record(NodeId v, std::string_view mechanism, double epsilon);

  int invocations(NodeId v, std::string_view mechanism) const;
  int max_invocations(std::string_view mechanism) const;
  // Sum over mechanisms that ran at least once.
  double total_epsilon() const;
  double node_epsilon(NodeId v) const;

 private:
  struct Entry {
    double epsilon = 0.0;
    std::vector<std::int32_t> counts;
  };
  NodeId num_nodes_;
  std::map<std::string, Entry, std::less<>> entries_;
};

// Node-side cache backing encode_once: the first call encodes, every later
// call returns the recorded row so repeated server queries cannot spend
// extra budget. Safe under concurrent first calls (one winner is persisted;
// per-node streams make racers compute identical rows anyway).
class EncodeStore {
 public:
  EncodeStore(NodeId num_nodes, std::uint64_t run_seed,
              std::string tag = "mb-features");

  // Returns the packed encoded row for node v, encoding on first use.
  // Throws BudgetError if params differ from the recorded call.
  std::vector<std::uint8_t> encode_once(NodeId v, std::span<const double> x,
                                        const MechanismParams& params);

  NodeId num_nodes() const { return num_nodes_; }
  const std::string& tag() const { return tag_; }

 private:
  struct Slot {
    MechanismParams params;
    std::vector<std::uint8_t> packed;
  };
  NodeId num_nodes_;
  std::uint64_t run_seed_;
  std::string tag_;
  std::vector<std::optional<Slot>> slots_;
  mutable std::mutex mutex_;
};

// Free-function form of the caching contract.
std::vector<std::uint8_t> encode_once(NodeId v, std::span<const double> x,
                                      const MechanismParams& params,
                                      EncodeStore& store);

}  // namespace lpg

#endif  // LPG_MECHANISMS_HPP_
