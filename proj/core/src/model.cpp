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

#include "lpg/model.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include "lpg/errors.hpp"
#include "lpg/propagate.hpp"

namespace lpg {
namespace {

void check_finite(const Matrix& m, const char* layer) {
  if (!m.allFinite()) {
    throw NumericError(std::string("non-finite activations in ") + layer);
  }
}

}  // namespace

void GnnConfig::validate() const {
  if (hidden_dim < 1) throw ArgumentError("hidden dimension must be at least 1");
  if (num_classes < 2) throw ArgumentError("model needs at least 2 classes");
  if (dropout_rate < 0.0 || dropout_rate >= 1.0) {
    throw ArgumentError("dropout rate must lie in [0, 1)");
  }
}

ModelWeights ModelWeights::glorot(int feature_dim, const GnnConfig& config, Rng& rng) {
  config.validate();
  ModelWeights w = zeros(feature_dim, config);
  const auto fill = [&rng](Matrix& m) {
    const double limit = std::sqrt(6.0 / static_cast<double>(m.rows() + m.cols()));
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = rng.uniform(-limit, limit);
    }
  };
  fill(w.w1);
  fill(w.w2);
  return w;
}

ModelWeights ModelWeights::zeros(int feature_dim, const GnnConfig& config) {
  config.validate();
  ModelWeights w;
  w.w1 = Matrix::Zero(config.layer1_in(feature_dim), config.hidden_dim);
  w.b1 = RowVector::Zero(config.hidden_dim);
  w.w2 = Matrix::Zero(config.layer2_in(), config.num_classes);
  w.b2 = RowVector::Zero(config.num_classes);
  return w;
}

Eigen::Index ModelWeights::num_params() const {
  return w1.size() + b1.size() + w2.size() + b2.size();
}

Vector ModelWeights::flat() const {
  Vector out(num_params());
  Eigen::Index at = 0;
  const auto put = [&](const double* data, Eigen::Index size) {
    std::copy(data, data + size, out.data() + at);
    at += size;
  };
  put(w1.data(), w1.size());
  put(b1.data(), b1.size());
  put(w2.data(), w2.size());
  put(b2.data(), b2.size());
  return out;
}

void ModelWeights::set_flat(const Vector& values) {
  if (values.size() != num_params()) throw ShapeError("flat weight vector has wrong size");
  Eigen::Index at = 0;
  const auto take = [&](double* data, Eigen::Index size) {
    std::copy(values.data() + at, values.data() + at + size, data);
    at += size;
  };
  take(w1.data(), w1.size());
  take(b1.data(), b1.size());
  take(w2.data(), w2.size());
  take(b2.data(), b2.size());
}

GnnModel::GnnModel(const Graph& graph, const Matrix& h0, const GnnConfig& config)
    : graph_(graph), config_(config), feature_dim_(static_cast<int>(h0.cols())) {
  config_.validate();
  if (h0.rows() != graph.num_nodes()) {
    throw ShapeError("input matrix rows do not match graph nodes");
  }
  if (config_.backbone == Backbone::kSage) {
    input1_.resize(h0.rows(), 2 * h0.cols());
    input1_.leftCols(h0.cols()) = aggregate(graph_, h0, AggregatorKind::kMean);
    input1_.rightCols(h0.cols()) = h0;
  } else {
    input1_ = aggregate(graph_, h0, AggregatorKind::kGcn);
  }
}

Matrix GnnModel::layer2_input(const Matrix& hidden) const {
  if (config_.backbone == Backbone::kSage) {
    Matrix out(hidden.rows(), 2 * hidden.cols());
    out.leftCols(hidden.cols()) = aggregate(graph_, hidden, AggregatorKind::kMean);
    out.rightCols(hidden.cols()) = hidden;
    return out;
  }
  return aggregate(graph_, hidden, AggregatorKind::kGcn);
}

Matrix GnnModel::forward(const ModelWeights& weights, Mode mode, Rng* rng) {
  if (weights.w1.rows() != input1_.cols() || weights.w1.cols() != config_.hidden_dim ||
      weights.w2.rows() != config_.layer2_in() ||
      weights.w2.cols() != config_.num_classes) {
    throw ShapeError("weight shapes do not match model configuration");
  }
  Matrix z1;
  z1.noalias() = input1_ * weights.w1;
  z1.rowwise() += weights.b1;
  check_finite(z1, "layer 1 (pre-activation)");
  Matrix a1 = z1.unaryExpr([](double z) { return selu(z); });

  const bool train = mode == Mode::kTrain;
  Matrix mask;
  if (train && config_.dropout_rate > 0.0) {
    if (rng == nullptr) throw ArgumentError("train-mode dropout needs a random source");
    const double keep = 1.0 - config_.dropout_rate;
    mask.resize(a1.rows(), a1.cols());
    for (Eigen::Index i = 0; i < mask.rows(); ++i) {
      for (Eigen::Index j = 0; j < mask.cols(); ++j) {
        mask(i, j) = rng->bernoulli(keep) ? 1.0 / keep : 0.0;  // inverted scaling
      }
    }
    a1 = a1.cwiseProduct(mask);
  }

  Matrix z2_input = layer2_input(a1);
  Matrix logits;
  logits.noalias() = z2_input * weights.w2;
  logits.rowwise() += weights.b2;
  check_finite(logits, "layer 2 (logits)");
  Matrix probs = softmax_rows(logits);

  if (train) {
    tape_.z1 = std::move(z1);
    tape_.dropped = std::move(a1);
    tape_.mask = std::move(mask);
    tape_.z2_input = std::move(z2_input);
    tape_.valid = true;
  }
  return probs;
}

GnnModel::EpochOutput GnnModel::forward_epoch(const ModelWeights& weights, Rng& rng) {
  if (weights.w1.rows() != input1_.cols() || weights.w1.cols() != config_.hidden_dim ||
      weights.w2.rows() != config_.layer2_in() ||
      weights.w2.cols() != config_.num_classes) {
    throw ShapeError("weight shapes do not match model configuration");
  }
  Matrix z1;
  z1.noalias() = input1_ * weights.w1;  // the expensive product, shared by both paths
  z1.rowwise() += weights.b1;
  check_finite(z1, "layer 1 (pre-activation)");
  Matrix a1 = z1.unaryExpr([](double z) { return selu(z); });

  EpochOutput out;
  {
    Matrix z2_input = layer2_input(a1);
    Matrix logits;
    logits.noalias() = z2_input * weights.w2;
    logits.rowwise() += weights.b2;
    check_finite(logits, "layer 2 (logits)");
    out.eval_probs = softmax_rows(logits);
  }

  Matrix mask;
  Matrix dropped;
  if (config_.dropout_rate > 0.0) {
    const double keep = 1.0 - config_.dropout_rate;
    mask.resize(a1.rows(), a1.cols());
    for (Eigen::Index i = 0; i < mask.rows(); ++i) {
      for (Eigen::Index j = 0; j < mask.cols(); ++j) {
        mask(i, j) = rng.bernoulli(keep) ? 1.0 / keep : 0.0;
      }
    }
    dropped = a1.cwiseProduct(mask);
  } else {
    dropped = a1;
  }

  Matrix z2_input = layer2_input(dropped);
  Matrix logits;
  logits.noalias() = z2_input * weights.w2;
  logits.rowwise() += weights.b2;
  check_finite(logits, "layer 2 (logits)");
  out.train_probs = softmax_rows(logits);

  tape_.z1 = std::move(z1);
  tape_.dropped = std::move(dropped);
  tape_.mask = std::move(mask);
  tape_.z2_input = std::move(z2_input);
  tape_.valid = true;
  return out;
}

Vector GnnModel::backward(const ModelWeights& weights, const Matrix& dlogits) const {
  if (!tape_.valid) {
    throw ArgumentError("backward requires a preceding train-mode forward pass");
  }
  ModelWeights grads = ModelWeights::zeros(feature_dim_, config_);

  grads.w2.noalias() = tape_.z2_input.transpose() * dlogits;
  grads.b2 = dlogits.colwise().sum();

  Matrix dz2_input;
  dz2_input.noalias() = dlogits * weights.w2.transpose();

  Matrix d_dropped;
  if (config_.backbone == Backbone::kSage) {
    const int h = config_.hidden_dim;
    d_dropped = aggregate_transpose(graph_, dz2_input.leftCols(h), AggregatorKind::kMean);
    d_dropped += dz2_input.rightCols(h);
  } else {
    d_dropped = aggregate_transpose(graph_, dz2_input, AggregatorKind::kGcn);
  }

  if (tape_.mask.size() > 0) d_dropped = d_dropped.cwiseProduct(tape_.mask);
  const Matrix dz1 =
      d_dropped.cwiseProduct(tape_.z1.unaryExpr([](double z) { return selu_deriv(z); }));

  grads.w1.noalias() = input1_.transpose() * dz1;
  grads.b1 = dz1.colwise().sum();
  return grads.flat();
}

Matrix gnn_forward(const Graph& graph, const Matrix& h0, const ModelWeights& weights,
                   const GnnConfig& config, Mode mode, Rng* rng) {
  GnnModel model(graph, h0, config);
  return model.forward(weights, mode, rng);
}

namespace {

constexpr char kMagic[4] = {'L', 'P', 'G', 'W'};
constexpr std::uint32_t kVersion = 1;

void write_u32(std::ofstream& out, std::uint32_t v) {
  static_assert(std::endian::native == std::endian::little,
                "checkpoint writer assumes a little-endian host");
  out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

std::uint32_t read_u32(std::ifstream& in) {
  std::uint32_t v = 0;
  in.read(reinterpret_cast<char*>(&v), sizeof(v));
  return v;
}

void write_matrix(std::ofstream& out, const Matrix& m) {
  write_u32(out, static_cast<std::uint32_t>(m.rows()));
  write_u32(out, static_cast<std::uint32_t>(m.cols()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      const float f = static_cast<float>(m(i, j));
      out.write(reinterpret_cast<const char*>(&f), sizeof(f));
    }
  }
}

Matrix read_matrix(std::ifstream& in) {
  const auto rows = read_u32(in);
  const auto cols = read_u32(in);
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      float f = 0;
      in.read(reinterpret_cast<char*>(&f), sizeof(f));
      m(i, j) = static_cast<double>(f);
    }
  }
  return m;
}

}  // namespace

void save_weights(const std::filesystem::path& path, const ModelWeights& weights,
                  Backbone backbone) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(kMagic, sizeof(kMagic));
  write_u32(out, kVersion);
  write_u32(out, backbone == Backbone::kSage ? 1u : 0u);
  write_matrix(out, weights.w1);
  write_matrix(out, Matrix(weights.b1));
  write_matrix(out, weights.w2);
  write_matrix(out, Matrix(weights.b2));
  if (!out) throw IoError("short write to " + path.string());
}

std::pair<ModelWeights, Backbone> load_weights(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  char magic[4];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw ParseError("not a weight checkpoint: " + path.string());
  }
  const auto version = read_u32(in);
  if (version != kVersion) {
    throw ParseError("unsupported checkpoint version " + std::to_string(version));
  }
  const auto backbone_tag = read_u32(in);
  if (backbone_tag > 1) throw ParseError("unknown backbone tag in checkpoint");
  ModelWeights w;
  w.w1 = read_matrix(in);
  w.b1 = RowVector(read_matrix(in));
  w.w2 = read_matrix(in);
  w.b2 = RowVector(read_matrix(in));
  if (!in) throw ParseError("checkpoint truncated: " + path.string());
  return {std::move(w), backbone_tag == 1 ? Backbone::kSage : Backbone::kGcn};
}

}  // namespace lpg
