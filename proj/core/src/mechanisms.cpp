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

#include "lpg/mechanisms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "lpg/errors.hpp"

namespace lpg {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// (e^z - 1) / (e^z + 1), overflow-safe.
double tanh_half(double z) { return std::tanh(0.5 * z); }

// (e^z + 1) / (e^z - 1), overflow-safe.
double coth_half(double z) { return 1.0 / std::tanh(0.5 * z); }

double standard_normal_cdf(double t) { return 0.5 * std::erfc(-t / std::sqrt(2.0)); }

}  // namespace

void MechanismParams::validate() const {
  if (!(epsilon > 0.0)) throw ArgumentError("privacy budget epsilon must be positive");
  if (d < 1) throw ArgumentError("dimension d must be at least 1");
  if (m < 1 || m > d) throw ArgumentError("sampling parameter m must lie in [1, d]");
  if (!(alpha < beta)) throw ArgumentError("range parameters must satisfy alpha < beta");
}

EncodedMatrix::EncodedMatrix(NodeId num_nodes, const MechanismParams& params)
    : num_nodes_(num_nodes),
      params_(params),
      row_bytes_(packed_row_bytes(params.d)),
      bytes_(static_cast<std::size_t>(num_nodes) * row_bytes_, 0) {
  params_.validate();
}

void EncodedMatrix::set_row(NodeId v, std::span<const std::int8_t> row) {
  if (static_cast<int>(row.size()) != params_.d) {
    throw ShapeError("encoded row has wrong dimension");
  }
  int nonzero = 0;
  for (const auto e : row) nonzero += e != 0;
  if (nonzero != params_.m) {
    throw StructuralError("encoded row must have exactly m nonzero entries");
  }
  pack_row(row, {bytes_.data() + static_cast<std::size_t>(v) * row_bytes_, row_bytes_});
}

void EncodedMatrix::set_packed_row(NodeId v, std::span<const std::uint8_t> bytes) {
  if (bytes.size() != row_bytes_) throw ShapeError("packed row has wrong byte count");
  std::copy(bytes.begin(), bytes.end(),
            bytes_.begin() + static_cast<std::ptrdiff_t>(static_cast<std::size_t>(v) * row_bytes_));
}

std::vector<std::int8_t> EncodedMatrix::row(NodeId v) const {
  std::vector<std::int8_t> out(params_.d);
  unpack_row(packed_row(v), params_.d, out);
  return out;
}

std::span<const std::uint8_t> EncodedMatrix::packed_row(NodeId v) const {
  return {bytes_.data() + static_cast<std::size_t>(v) * row_bytes_, row_bytes_};
}

bool TransitionMatrix::is_identity() const {
  return probs.isIdentity(0.0);
}

void TransitionMatrix::validate() const {
  if (probs.rows() != probs.cols() || probs.rows() < 2) {
    throw ShapeError("transition matrix must be square with c >= 2");
  }
  for (Eigen::Index i = 0; i < probs.rows(); ++i) {
    if (std::abs(probs.row(i).sum() - 1.0) > 1e-12) {
      throw StructuralError("transition row " + std::to_string(i) + " does not sum to 1");
    }
  }
}

int optimal_m(double epsilon, int d) {
  if (!(epsilon > 0.0)) throw ArgumentError("epsilon must be positive");
  if (d < 1) throw ArgumentError("d must be at least 1");
  if (std::isinf(epsilon)) return d;
  const double raw = std::floor(epsilon / 2.18);
  const int clamped = raw >= static_cast<double>(d)
                          ? d
                          : std::max(1, static_cast<int>(raw));
  return clamped;
}

std::vector<std::int8_t> multibit_encode(std::span<const double> x,
                                         const MechanismParams& params, Rng& rng) {
  params.validate();
  if (static_cast<int>(x.size()) != params.d) {
    throw ShapeError("input vector has wrong dimension");
  }
  const double width = params.beta - params.alpha;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] < params.alpha - 1e-12 || x[i] > params.beta + 1e-12) {
      throw DomainError("feature " + std::to_string(i) + " = " + std::to_string(x[i]) +
                        " outside declared range [" + std::to_string(params.alpha) +
                        ", " + std::to_string(params.beta) + "]");
    }
  }

  // Floyd's sampling: m distinct dimensions, uniform without replacement.
  std::vector<std::int32_t> sampled;
  sampled.reserve(params.m);
  for (int j = params.d - params.m; j < params.d; ++j) {
    const auto t = static_cast<std::int32_t>(rng.uniform_int(0, j));
    if (std::find(sampled.begin(), sampled.end(), t) != sampled.end()) {
      sampled.push_back(j);
    } else {
      sampled.push_back(t);
    }
  }
  std::sort(sampled.begin(), sampled.end());

  const double z = params.epsilon / params.m;
  const double gain = tanh_half(z);          // (e^z - 1) / (e^z + 1)
  const double base = 0.5 * (1.0 - gain);    // 1 / (e^z + 1)

  std::vector<std::int8_t> out(params.d, 0);
  for (const auto i : sampled) {
    const double pos = std::clamp((x[i] - params.alpha) / width, 0.0, 1.0);
    const double t_prob = base + pos * gain;
    out[i] = rng.bernoulli(t_prob) ? 1 : -1;
  }
  return out;
}

Vector multibit_rectify(std::span<const std::int8_t> x_star,
                        const MechanismParams& params) {
  params.validate();
  if (static_cast<int>(x_star.size()) != params.d) {
    throw ShapeError("encoded vector has wrong dimension");
  }
  const double factor = params.d * (params.beta - params.alpha) / (2.0 * params.m) *
                        coth_half(params.epsilon / params.m);
  const double center = 0.5 * (params.alpha + params.beta);
  Vector out(params.d);
  for (int i = 0; i < params.d; ++i) {
    out[i] = factor * static_cast<double>(x_star[i]) + center;
  }
  return out;
}

Matrix multibit_rectify(const EncodedMatrix& encoded) {
  const auto& params = encoded.params();
  Matrix out(encoded.num_nodes(), params.d);
  std::vector<std::int8_t> row(params.d);
  for (NodeId v = 0; v < encoded.num_nodes(); ++v) {
    unpack_row(encoded.packed_row(v), params.d, row);
    out.row(v) = multibit_rectify(row, params).transpose();
  }
  return out;
}

double rectifier_variance(double x_i, const MechanismParams& params) {
  params.validate();
  const double spread = 0.5 * (params.beta - params.alpha) *
                        coth_half(params.epsilon / params.m);
  const double centered = x_i - 0.5 * (params.alpha + params.beta);
  return static_cast<double>(params.d) / params.m * spread * spread -
         centered * centered;
}

Vector laplace_perturb(std::span<const double> x, double epsilon, double alpha,
                       double beta, Rng& rng) {
  if (!(epsilon > 0.0)) throw ArgumentError("epsilon must be positive");
  const double scale = std::isinf(epsilon)
                           ? 0.0
                           : static_cast<double>(x.size()) * (beta - alpha) / epsilon;
  Vector out(static_cast<Eigen::Index>(x.size()));
  for (std::size_t i = 0; i < x.size(); ++i) {
    out[static_cast<Eigen::Index>(i)] = x[i] + (scale > 0.0 ? rng.laplace(scale) : 0.0);
  }
  return out;
}

double gaussian_dp_condition(double sigma, double epsilon, double sensitivity) {
  const double a = sensitivity / (2.0 * sigma);
  const double b = epsilon * sigma / sensitivity;
  return standard_normal_cdf(a - b) - std::exp(epsilon) * standard_normal_cdf(-a - b);
}

double gaussian_sigma(double epsilon, double delta, double sensitivity) {
  if (!(epsilon > 0.0)) throw ArgumentError("epsilon must be positive");
  if (!(delta > 0.0 && delta < 1.0)) throw ArgumentError("delta must lie in (0, 1)");
  if (!(sensitivity > 0.0)) throw ArgumentError("sensitivity must be positive");

  // gaussian_dp_condition is strictly decreasing in sigma; bracket the root.
  double hi = sensitivity;
  int iter = 0;
  while (gaussian_dp_condition(hi, epsilon, sensitivity) > delta) {
    hi *= 2.0;
    if (++iter > 200) throw NumericError("gaussian_sigma: bracket expansion failed");
  }
  double lo = hi / 2.0;
  iter = 0;
  while (gaussian_dp_condition(lo, epsilon, sensitivity) <= delta) {
    hi = lo;
    lo /= 2.0;
    if (++iter > 200) throw NumericError("gaussian_sigma: bracket shrink failed");
  }

  for (iter = 0; iter < 500 && (hi - lo) > 1e-10 * hi; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (gaussian_dp_condition(mid, epsilon, sensitivity) <= delta) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  if ((hi - lo) > 1e-9 * hi) {
    throw NumericError("gaussian_sigma: bisection did not converge");
  }
  return hi;
}

Vector gaussian_perturb(std::span<const double> x, double sigma, Rng& rng) {
  Vector out(static_cast<Eigen::Index>(x.size()));
  for (std::size_t i = 0; i < x.size(); ++i) {
    out[static_cast<Eigen::Index>(i)] = x[i] + rng.normal(sigma);
  }
  return out;
}

std::int32_t randomized_response(std::int32_t y, double epsilon, int num_classes,
                                 Rng& rng) {
  if (num_classes < 2) throw ArgumentError("randomized response needs c >= 2");
  if (y < 0 || y >= num_classes) throw DomainError("label out of range");
  if (!(epsilon > 0.0)) throw ArgumentError("epsilon must be positive");
  if (std::isinf(epsilon)) return y;
  const double keep = 1.0 / (1.0 + (num_classes - 1) * std::exp(-epsilon));
  if (rng.bernoulli(keep)) return y;
  const auto other = static_cast<std::int32_t>(rng.uniform_int(0, num_classes - 2));
  return other >= y ? other + 1 : other;
}

TransitionMatrix rr_transition(double epsilon, int num_classes) {
  if (num_classes < 2) throw ArgumentError("randomized response needs c >= 2");
  if (!(epsilon > 0.0)) throw ArgumentError("epsilon must be positive");
  TransitionMatrix t;
  if (std::isinf(epsilon)) {
    t.probs = Matrix::Identity(num_classes, num_classes);
    return t;
  }
  const double keep = 1.0 / (1.0 + (num_classes - 1) * std::exp(-epsilon));
  const double flip = std::exp(-epsilon) / (1.0 + (num_classes - 1) * std::exp(-epsilon));
  t.probs = Matrix::Constant(num_classes, num_classes, flip);
  t.probs.diagonal().setConstant(keep);
  return t;
}

PrivacyLedger::PrivacyLedger(NodeId num_nodes) : num_nodes_(num_nodes) {}

void PrivacyLedger::record(NodeId v, std::string_view mechanism, double epsilon) {
  if (v < 0 || v >= num_nodes_) throw ArgumentError("ledger: node id out of range");
  auto it = entries_.find(mechanism);
  if (it == entries_.end()) {
    Entry entry;
    entry.epsilon = epsilon;
    entry.counts.assign(num_nodes_, 0);
    it = entries_.emplace(std::string(mechanism), std::move(entry)).first;
  } else if (it->second.epsilon != epsilon) {
    throw BudgetError("ledger: mechanism '" + std::string(mechanism) +
                      "' re-used with a different budget");
  }
  it->second.counts[v]++;
}

int PrivacyLedger::invocations(NodeId v, std::string_view mechanism) const {
  const auto it = entries_.find(mechanism);
  return it == entries_.end() ? 0 : it->second.counts[v];
}

int PrivacyLedger::max_invocations(std::string_view mechanism) const {
  const auto it = entries_.find(mechanism);
  if (it == entries_.end()) return 0;
  return *std::max_element(it->second.counts.begin(), it->second.counts.end());
}

double PrivacyLedger::total_epsilon() const {
  double total = 0.0;
  for (const auto& [name, entry] : entries_) total += entry.epsilon;
  return total;
}

double PrivacyLedger::node_epsilon(NodeId v) const {
  double total = 0.0;
  for (const auto& [name, entry] : entries_) {
    if (entry.counts[v] > 0) total += entry.epsilon;
  }
  return total;
}

EncodeStore::EncodeStore(NodeId num_nodes, std::uint64_t run_seed, std::string tag)
    : num_nodes_(num_nodes), run_seed_(run_seed), tag_(std::move(tag)),
      slots_(num_nodes) {}

std::vector<std::uint8_t> EncodeStore::encode_once(NodeId v, std::span<const double> x,
                                                   const MechanismParams& params) {
  if (v < 0 || v >= num_nodes_) throw ArgumentError("encode_once: node id out of range");
  std::lock_guard<std::mutex> lock(mutex_);
  auto& slot = slots_[v];
  if (slot.has_value()) {
    if (!(slot->params == params)) {
      throw BudgetError("encode_once: node " + std::to_string(v) +
                        " was already encoded with different parameters");
    }
    return slot->packed;
  }
  Rng rng = node_stream(run_seed_, static_cast<std::uint64_t>(v), tag_);
  const auto row = multibit_encode(x, params, rng);
  std::vector<std::uint8_t> packed(packed_row_bytes(params.d));
  pack_row(row, packed);
  slot = Slot{params, packed};
  return packed;
}

std::vector<std::uint8_t> encode_once(NodeId v, std::span<const double> x,
                                      const MechanismParams& params,
                                      EncodeStore& store) {
  return store.encode_once(v, x, params);
}

}  // namespace lpg
