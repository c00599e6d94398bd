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

#include "lpg/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include "lpg/errors.hpp"
#include "lpg/propagate.hpp"
#include "lpg/wire.hpp"

namespace lpg {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

std::string format_fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

std::vector<std::string> split_csv_line(const std::string& line, char sep = ',') {
  std::vector<std::string> out;
  std::string cur;
  for (const char ch : line) {
    if (ch == sep) {
      out.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur.push_back(ch);
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

std::string to_string(MechanismKind kind) {
  switch (kind) {
    case MechanismKind::kMultiBit: return "mb";
    case MechanismKind::kOneBit: return "1b";
    case MechanismKind::kLaplace: return "lp";
    case MechanismKind::kGaussian: return "ag";
  }
  return "?";
}

std::string to_string(FeatureKind kind) {
  switch (kind) {
    case FeatureKind::kPrivate: return "private";
    case FeatureKind::kOnes: return "ones";
    case FeatureKind::kOhd: return "ohd";
    case FeatureKind::kRnd: return "rnd";
  }
  return "?";
}

std::string to_string(LossKind kind) {
  switch (kind) {
    case LossKind::kCrossEntropy: return "ce";
    case LossKind::kForwardCorrection: return "fc";
    case LossKind::kDrop: return "drop";
  }
  return "?";
}

std::string to_string(Backbone backbone) {
  return backbone == Backbone::kSage ? "sage" : "gcn";
}

MechanismKind parse_mechanism(const std::string& tag) {
  if (tag == "mb") return MechanismKind::kMultiBit;
  if (tag == "1b") return MechanismKind::kOneBit;
  if (tag == "lp") return MechanismKind::kLaplace;
  if (tag == "ag") return MechanismKind::kGaussian;
  throw ConfigError("unknown mechanism '" + tag + "' (expected mb|1b|lp|ag)");
}

FeatureKind parse_feature_kind(const std::string& tag) {
  if (tag == "private") return FeatureKind::kPrivate;
  if (tag == "ones") return FeatureKind::kOnes;
  if (tag == "ohd") return FeatureKind::kOhd;
  if (tag == "rnd") return FeatureKind::kRnd;
  throw ConfigError("unknown feature kind '" + tag + "' (expected private|ones|ohd|rnd)");
}

LossKind parse_loss(const std::string& tag) {
  if (tag == "drop") return LossKind::kDrop;
  if (tag == "ce") return LossKind::kCrossEntropy;
  if (tag == "fc") return LossKind::kForwardCorrection;
  throw ConfigError("unknown loss '" + tag + "' (expected drop|ce|fc)");
}

Backbone parse_backbone(const std::string& tag) {
  if (tag == "sage") return Backbone::kSage;
  if (tag == "gcn") return Backbone::kGcn;
  throw ConfigError("unknown backbone '" + tag + "' (expected gcn|sage)");
}

double parse_epsilon(const std::string& text) {
  std::string lower = text;
  std::transform(lower.begin(), lower.end(), lower.begin(), ::tolower);
  if (lower == "inf" || lower == "infinity") return kInf;
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size() || !(value > 0.0)) {
    throw ConfigError("invalid privacy budget '" + text + "'");
  }
  return value;
}

std::string format_epsilon(double eps) {
  return std::isinf(eps) ? "inf" : format_double(eps);
}

Dataset resolve_dataset(const std::string& spec) {
  Dataset ds;
  if (spec.rfind("sbm:", 0) == 0) {
    SbmParams params;
    params.num_nodes = 1000;
    params.num_classes = 4;
    params.feature_dim = 50;
    params.p_in = 0.02;
    params.p_out = 0.002;
    params.feature_signal = 0.8;
    for (const auto& kv : split_csv_line(spec.substr(4))) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw ConfigError("bad sbm spec item '" + kv + "'");
      const std::string key = kv.substr(0, eq);
      const std::string value = kv.substr(eq + 1);
      try {
        if (key == "n") params.num_nodes = static_cast<NodeId>(std::stol(value));
        else if (key == "c") params.num_classes = std::stoi(value);
        else if (key == "d") params.feature_dim = std::stoi(value);
        else if (key == "pin") params.p_in = std::stod(value);
        else if (key == "pout") params.p_out = std::stod(value);
        else if (key == "signal") params.feature_signal = std::stod(value);
        else if (key == "seed") params.seed = std::stoull(value);
        else throw ConfigError("unknown sbm spec key '" + key + "'");
      } catch (const std::invalid_argument&) {
        throw ConfigError("bad sbm spec value '" + kv + "'");
      }
    }
    ds = generate_sbm(params);
  } else {
    const std::filesystem::path dir(spec);
    ds = load_graph(dir / "edges.tsv", dir / "nodes.tsv");
  }
  ds.features = normalize_features(ds.features);
  return ds;
}

std::optional<StepPreset> dataset_step_preset(std::string_view dataset_name) {
  if (dataset_name == "cora") return StepPreset{16, 8};
  if (dataset_name == "pubmed") return StepPreset{16, 2};
  if (dataset_name == "facebook") return StepPreset{4, 2};
  if (dataset_name == "lastfm") return StepPreset{8, 2};
  return std::nullopt;
}

FeatureMatrix baseline_features(FeatureKind kind, const Graph& graph, int d,
                                std::uint64_t seed) {
  if (d < 1) throw ArgumentError("baseline features need d >= 1");
  const NodeId n = graph.num_nodes();
  FeatureMatrix out;
  out.alpha = 0.0;
  out.beta = 1.0;
  switch (kind) {
    case FeatureKind::kOnes:
      out.values = Matrix::Ones(n, d);
      return out;
    case FeatureKind::kOhd: {
      out.values = Matrix::Zero(n, d);
      for (NodeId v = 0; v < n; ++v) {
        const auto idx = std::min<std::int64_t>(graph.degree(v), d - 1);
        out.values(v, static_cast<Eigen::Index>(idx)) = 1.0;
      }
      return out;
    }
    case FeatureKind::kRnd: {
      out.values.resize(n, d);
      for (NodeId v = 0; v < n; ++v) {
        Rng rng = node_stream(seed, static_cast<std::uint64_t>(v), "rnd-features");
        for (int j = 0; j < d; ++j) out.values(v, j) = rng.uniform();
      }
      return out;
    }
    case FeatureKind::kPrivate:
      break;
  }
  throw ArgumentError("baseline_features called with kind=private");
}

std::pair<double, double> bootstrap_ci(std::span<const double> samples, int resamples,
                                       std::uint64_t seed) {
  if (samples.empty()) throw ArgumentError("bootstrap_ci needs at least one sample");
  const auto n = static_cast<Eigen::Index>(samples.size());
  double mean = 0.0;
  for (const double s : samples) mean += s;
  mean /= static_cast<double>(n);
  if (samples.size() == 1) {
    std::cerr << "warning: bootstrap_ci over a single sample; interval collapses to 0\n";
    return {mean, 0.0};
  }

  Rng rng(hash_combine(seed, fnv1a("bootstrap")));
  std::vector<double> means(resamples);
  for (int b = 0; b < resamples; ++b) {
    double total = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      total += samples[static_cast<std::size_t>(rng.uniform_int(0, n - 1))];
    }
    means[b] = total / static_cast<double>(n);
  }
  std::sort(means.begin(), means.end());
  const auto percentile = [&](double q) {
    const double pos = q * static_cast<double>(resamples - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min<std::size_t>(lo + 1, resamples - 1);
    const double frac = pos - std::floor(pos);
    return means[lo] * (1.0 - frac) + means[hi] * frac;
  };
  const double half = 0.5 * (percentile(0.975) - percentile(0.025));
  return {mean, half};
}

namespace {

constexpr std::string_view kFeatureTag = "multi-bit";
constexpr std::string_view kLaplaceTag = "laplace";
constexpr std::string_view kGaussianTag = "analytic-gaussian";
constexpr std::string_view kLabelTag = "randomized-response";

std::vector<std::int32_t> perturb_labels(const Dataset& ds, const DataSplit& split,
                                         double eps_y, std::uint64_t run_seed,
                                         PrivacyLedger* ledger) {
  const int c = ds.labels.num_classes();
  std::vector<std::int32_t> y_prime(ds.graph.num_nodes(), kUnlabeled);
  const auto perturb = [&](const std::vector<NodeId>& ids) {
    for (const NodeId v : ids) {
      if (!ds.labels.is_labeled(v)) continue;
      if (std::isinf(eps_y)) {
        y_prime[v] = ds.labels.clean(v);
      } else {
        Rng rng = node_stream(run_seed, static_cast<std::uint64_t>(v), "rr-labels");
        y_prime[v] = randomized_response(ds.labels.clean(v), eps_y, c, rng);
        if (ledger != nullptr) ledger->record(v, kLabelTag, eps_y);
      }
    }
  };
  // Only training and validation labels are collected; test labels stay clean
  // and hidden from the training path.
  perturb(split.train_ids);
  perturb(split.val_ids);
  return y_prime;
}

Matrix prepare_features(const Dataset& ds, const RunSpec& spec, std::uint64_t run_seed,
                        PrivacyLedger* ledger, EncodedMatrix* encoded_out) {
  const Graph& g = ds.graph;
  const NodeId n = g.num_nodes();
  const int d = static_cast<int>(ds.features.dim());
  const double eps_x = spec.plan.eps_x;

  if (spec.feature_kind != FeatureKind::kPrivate) {
    return baseline_features(spec.feature_kind, g, d,
                             hash_combine(run_seed, fnv1a("baseline-features")))
        .values;
  }
  if (std::isinf(eps_x)) return ds.features.values;  // mechanism bypass

  switch (spec.mechanism) {
    case MechanismKind::kMultiBit:
    case MechanismKind::kOneBit: {
      MechanismParams params;
      params.epsilon = eps_x;
      params.alpha = ds.features.alpha;
      params.beta = ds.features.beta;
      params.d = d;
      params.m = spec.mechanism == MechanismKind::kOneBit
                     ? d
                     : spec.m_override.value_or(optimal_m(eps_x, d));
      EncodeStore store(n, run_seed);
      EncodedMatrix encoded(n, params);
      for (NodeId v = 0; v < n; ++v) {
        const std::span<const double> row(ds.features.values.row(v).data(),
                                          static_cast<std::size_t>(d));
        encoded.set_packed_row(v, store.encode_once(v, row, params));
        if (ledger != nullptr) ledger->record(v, kFeatureTag, eps_x);
      }
      if (encoded_out != nullptr) *encoded_out = encoded;
      return multibit_rectify(encoded);
    }
    case MechanismKind::kLaplace: {
      Matrix out(n, d);
      for (NodeId v = 0; v < n; ++v) {
        Rng rng = node_stream(run_seed, static_cast<std::uint64_t>(v), "laplace");
        const std::span<const double> row(ds.features.values.row(v).data(),
                                          static_cast<std::size_t>(d));
        out.row(v) =
            laplace_perturb(row, eps_x, ds.features.alpha, ds.features.beta, rng)
                .transpose();
        if (ledger != nullptr) ledger->record(v, kLaplaceTag, eps_x);
      }
      return out;
    }
    case MechanismKind::kGaussian: {
      const double sensitivity =
          std::sqrt(static_cast<double>(d)) * (ds.features.beta - ds.features.alpha);
      const double sigma = gaussian_sigma(eps_x, spec.gaussian_delta, sensitivity);
      Matrix out(n, d);
      for (NodeId v = 0; v < n; ++v) {
        Rng rng = node_stream(run_seed, static_cast<std::uint64_t>(v), "gaussian");
        const std::span<const double> row(ds.features.values.row(v).data(),
                                          static_cast<std::size_t>(d));
        out.row(v) = gaussian_perturb(row, sigma, rng).transpose();
        if (ledger != nullptr) ledger->record(v, kGaussianTag, eps_x);
      }
      return out;
    }
  }
  throw ConfigError("unknown mechanism");
}

void audit_ledger(const PrivacyLedger& ledger, const Dataset& ds, const RunSpec& spec,
                  const DataSplit& split) {
  const bool features_private =
      spec.feature_kind == FeatureKind::kPrivate && !std::isinf(spec.plan.eps_x);
  const bool labels_private = !std::isinf(spec.plan.eps_y);

  const double expected = (features_private ? spec.plan.eps_x : 0.0) +
                          (labels_private ? spec.plan.eps_y : 0.0);
  if (std::abs(ledger.total_epsilon() - expected) > 1e-12) {
    throw BudgetError("ledger total " + std::to_string(ledger.total_epsilon()) +
                      " does not equal the declared budget " + std::to_string(expected));
  }

  std::string_view feature_tag = kFeatureTag;
  if (spec.mechanism == MechanismKind::kLaplace) feature_tag = kLaplaceTag;
  if (spec.mechanism == MechanismKind::kGaussian) feature_tag = kGaussianTag;
  for (NodeId v = 0; v < ds.graph.num_nodes(); ++v) {
    const int feature_calls = ledger.invocations(v, feature_tag);
    if (features_private ? feature_calls != 1 : feature_calls != 0) {
      throw BudgetError("feature randomizer ran " + std::to_string(feature_calls) +
                        " times on node " + std::to_string(v));
    }
    if (ledger.invocations(v, kLabelTag) > 1) {
      throw BudgetError("label randomizer ran more than once on node " +
                        std::to_string(v));
    }
  }
  if (labels_private) {
    for (const auto* ids : {&split.train_ids, &split.val_ids}) {
      for (const NodeId v : *ids) {
        if (ds.labels.is_labeled(v) && ledger.invocations(v, kLabelTag) != 1) {
          throw BudgetError("labeled node " + std::to_string(v) +
                            " missing its randomized-response invocation");
        }
      }
    }
  }
}

}  // namespace

RunOutcome run_one(const Dataset& dataset, const RunSpec& spec) {
  spec.plan.validate();
  if (dataset.labels.num_classes() < 2) {
    throw ConfigError("dataset needs at least 2 classes");
  }
  const std::uint64_t run_seed = spec.plan.seed;
  const std::uint64_t split_seed = hash_combine(run_seed, fnv1a("split"));
  const DataSplit split = split_nodes(dataset.graph, {0.5, 0.25, 0.25}, split_seed);

  PrivacyLedger ledger(dataset.graph.num_nodes());
  const auto y_prime = perturb_labels(dataset, split, spec.plan.eps_y, run_seed, &ledger);
  const Matrix x_prime = prepare_features(dataset, spec, run_seed, &ledger, nullptr);
  audit_ledger(ledger, dataset, spec, split);

  GnnConfig config;
  config.backbone = spec.backbone;
  config.hidden_dim = spec.hidden_dim;
  config.num_classes = dataset.labels.num_classes();
  config.dropout_rate = spec.plan.dropout;

  const TrainResult trained =
      spec.loss == LossKind::kDrop
          ? train_drop(dataset.graph, x_prime, y_prime, dataset.labels, split,
                       spec.plan, config)
          : train_baseline(spec.loss, dataset.graph, x_prime, y_prime, dataset.labels,
                           split, spec.plan, config);

  RunOutcome outcome;
  outcome.test_accuracy = trained.test_accuracy;
  outcome.guard_infeasible = trained.guard_infeasible;
  outcome.selected_epoch = trained.selected_epoch;
  outcome.ledger_epsilon = ledger.total_epsilon();
  outcome.split_seed = split_seed;
  return outcome;
}

namespace {

const char* kCsvComment =
    "# lpgraph results v1; acc_ci95 = percentile bootstrap of the mean (1000 resamples)";
const char* kCsvHeader =
    "dataset,backbone,mechanism,feature_kind,loss,eps_x,eps_y,kx,ky,lr,wd,dropout,"
    "repeats,acc_mean,acc_ci95,guard_infeasible,runtime_s";

std::string sanitize_field(std::string s) {
  for (char& ch : s) {
    if (ch == ',' || ch == '\n' || ch == '\t') ch = ';';
  }
  return s;
}

// The coordinate part of a CSV row; doubles as the idempotency key.
std::string cell_key(const ResultRow& row) {
  std::ostringstream out;
  out << sanitize_field(row.dataset) << ',' << to_string(row.backbone) << ','
      << to_string(row.mechanism) << ',' << to_string(row.feature_kind) << ','
      << to_string(row.loss) << ',' << format_epsilon(row.eps_x) << ','
      << format_epsilon(row.eps_y) << ',' << row.k_x << ',' << row.k_y << ','
      << format_double(row.learning_rate) << ',' << format_double(row.weight_decay)
      << ',' << format_double(row.dropout);
  return std::move(out).str();
}

std::string csv_line(const ResultRow& row) {
  std::ostringstream out;
  out << cell_key(row) << ',' << row.repeats << ',' << format_fixed(row.acc_mean, 6)
      << ',' << format_fixed(row.acc_ci95, 6) << ',' << row.guard_infeasible << ','
      << format_fixed(row.runtime_s, 3);
  return std::move(out).str();
}

ResultRow parse_result_row(const std::vector<std::string>& fields) {
  if (fields.size() != 17) {
    throw SchemaError("results row has " + std::to_string(fields.size()) +
                      " columns, expected 17");
  }
  ResultRow row;
  row.dataset = fields[0];
  row.backbone = parse_backbone(fields[1]);
  row.mechanism = parse_mechanism(fields[2]);
  row.feature_kind = parse_feature_kind(fields[3]);
  row.loss = parse_loss(fields[4]);
  row.eps_x = parse_epsilon(fields[5]);
  row.eps_y = parse_epsilon(fields[6]);
  row.k_x = std::stoi(fields[7]);
  row.k_y = std::stoi(fields[8]);
  row.learning_rate = std::stod(fields[9]);
  row.weight_decay = std::stod(fields[10]);
  row.dropout = std::stod(fields[11]);
  row.repeats = std::stoi(fields[12]);
  row.acc_mean = std::stod(fields[13]);
  row.acc_ci95 = std::stod(fields[14]);
  row.guard_infeasible = std::stoi(fields[15]);
  row.runtime_s = std::stod(fields[16]);
  return row;
}

std::string sanitize_filename(const std::string& key) {
  std::string out;
  for (const char ch : key) {
    out.push_back(std::isalnum(static_cast<unsigned char>(ch)) || ch == '.' ||
                          ch == '-' || ch == '_' || ch == '='
                      ? ch
                      : '-');
  }
  char hash[32];
  std::snprintf(hash, sizeof(hash), "-%016llx",
                static_cast<unsigned long long>(fnv1a(key)));
  if (out.size() > 120) out.resize(120);
  return out + hash;
}

void write_manifest(const std::filesystem::path& dir, const ExperimentConfig& config,
                    const Dataset& ds, const ResultRow& row, std::uint64_t cell_seed,
                    const std::vector<RunOutcome>& outcomes,
                    const std::vector<std::uint64_t>& run_seeds) {
  std::filesystem::create_directories(dir);
  const std::string key = cell_key(row);
  std::ofstream out(dir / (sanitize_filename(key) + ".manifest"));
  if (!out) throw IoError("cannot write manifest for cell " + key);
  out << "schema=lpgraph-manifest-v1\n";
  out << "cell.key=" << key << "\n";
  out << "dataset=" << sanitize_field(row.dataset) << "\n";
  out << "dataset.hash=" << std::hex << ds.content_hash << std::dec << "\n";
  out << "backbone=" << to_string(row.backbone) << "\n";
  out << "mechanism=" << to_string(row.mechanism) << "\n";
  out << "feature_kind=" << to_string(row.feature_kind) << "\n";
  out << "loss=" << to_string(row.loss) << "\n";
  out << "eps_x=" << format_epsilon(row.eps_x) << "\n";
  out << "eps_y=" << format_epsilon(row.eps_y) << "\n";
  out << "kx=" << row.k_x << "\n";
  out << "ky=" << row.k_y << "\n";
  out << "lr=" << format_double(row.learning_rate) << "\n";
  out << "wd=" << format_double(row.weight_decay) << "\n";
  out << "dropout=" << format_double(row.dropout) << "\n";
  out << "hidden=" << config.hidden_dim << "\n";
  out << "max_epochs=" << config.max_epochs << "\n";
  if (config.m_override) out << "m_override=" << *config.m_override << "\n";
  out << "gaussian_delta=" << format_double(config.gaussian_delta) << "\n";
  out << "repeats=" << row.repeats << "\n";
  out << "master_seed=" << config.seed << "\n";
  out << "cell.seed=" << cell_seed << "\n";
  out << "bootstrap.resamples=1000\n";
  for (std::size_t r = 0; r < outcomes.size(); ++r) {
    out << "rep" << r << ".seed=" << run_seeds[r] << "\n";
    out << "rep" << r << ".split_seed=" << outcomes[r].split_seed << "\n";
    out << "rep" << r << ".acc=" << format_fixed(outcomes[r].test_accuracy, 6) << "\n";
    out << "rep" << r << ".guard_infeasible=" << (outcomes[r].guard_infeasible ? 1 : 0)
        << "\n";
    out << "rep" << r << ".selected_epoch=" << outcomes[r].selected_epoch << "\n";
    out << "rep" << r << ".ledger_eps=" << format_epsilon(outcomes[r].ledger_epsilon)
        << "\n";
  }
  out << "acc_mean=" << format_fixed(row.acc_mean, 6) << "\n";
  out << "acc_ci95=" << format_fixed(row.acc_ci95, 6) << "\n";
}

// Wire-format dumps of the first repeat's perturbed data, for auditability.
void write_artifacts(const std::filesystem::path& dir, const Dataset& ds,
                     const RunSpec& spec, const std::string& key) {
  const std::uint64_t run_seed = spec.plan.seed;
  const DataSplit split = split_nodes(ds.graph, {0.5, 0.25, 0.25},
                                      hash_combine(run_seed, fnv1a("split")));
  std::filesystem::create_directories(dir);
  const std::string base = sanitize_filename(key);

  if (!std::isinf(spec.plan.eps_y)) {
    const auto y_prime = perturb_labels(ds, split, spec.plan.eps_y, run_seed, nullptr);
    const auto bytes = pack_labels(y_prime, ds.labels.num_classes());
    std::ofstream out(dir / (base + ".rep0.labels.bin"), std::ios::binary);
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
  }
  if (spec.feature_kind == FeatureKind::kPrivate && !std::isinf(spec.plan.eps_x) &&
      (spec.mechanism == MechanismKind::kMultiBit ||
       spec.mechanism == MechanismKind::kOneBit)) {
    EncodedMatrix encoded(0, MechanismParams{});
    prepare_features(ds, spec, run_seed, nullptr, &encoded);
    std::ofstream out(dir / (base + ".rep0.xstar.bin"), std::ios::binary);
    const std::uint32_t n = static_cast<std::uint32_t>(encoded.num_nodes());
    const std::uint32_t d = static_cast<std::uint32_t>(encoded.params().d);
    out.write(reinterpret_cast<const char*>(&n), sizeof(n));
    out.write(reinterpret_cast<const char*>(&d), sizeof(d));
    out.write(reinterpret_cast<const char*>(encoded.packed().data()),
              static_cast<std::streamsize>(encoded.packed().size()));
  }
}

}  // namespace

std::vector<ResultRow> run_experiment(const ExperimentConfig& config) {
  if (config.repeats < 1) throw ConfigError("repeats must be at least 1");
  if (config.out_csv.empty()) throw ConfigError("output CSV path is required");

  const Dataset dataset = resolve_dataset(config.dataset);

  // Load already-completed cells so re-runs are idempotent.
  std::set<std::string> done;
  std::map<std::string, ResultRow> existing;
  bool have_file = std::filesystem::exists(config.out_csv);
  if (have_file) {
    std::ifstream in(config.out_csv);
    std::string line;
    bool saw_header = false;
    while (std::getline(in, line)) {
      if (line.empty() || line[0] == '#') continue;
      if (!saw_header) {
        if (line != kCsvHeader) {
          throw SchemaError("existing results file has an incompatible header");
        }
        saw_header = true;
        continue;
      }
      const auto row = parse_result_row(split_csv_line(line));
      const auto key = cell_key(row);
      done.insert(key);
      existing.emplace(key, row);
    }
  }

  if (!have_file) {
    if (config.out_csv.has_parent_path()) {
      std::filesystem::create_directories(config.out_csv.parent_path());
    }
    std::ofstream out(config.out_csv);
    if (!out) throw IoError("cannot write " + config.out_csv.string());
    out << kCsvComment << "\n" << kCsvHeader << "\n";
  }

  const std::filesystem::path manifest_dir =
      config.out_csv.parent_path() / "manifests";

  std::vector<ResultRow> results;
  for (const double eps_x : config.grid.eps_x) {
    for (const double eps_y : config.grid.eps_y) {
      for (const int k_x : config.grid.k_x) {
        for (const int k_y : config.grid.k_y) {
          for (const double lr : config.grid.learning_rate) {
            for (const double wd : config.grid.weight_decay) {
              for (const double dropout : config.grid.dropout) {
                ResultRow row;
                row.dataset = dataset.name;
                row.backbone = config.backbone;
                row.mechanism = config.mechanism;
                row.feature_kind = config.feature_kind;
                row.loss = config.loss;
                row.eps_x = eps_x;
                row.eps_y = eps_y;
                row.k_x = k_x;
                row.k_y = k_y;
                row.learning_rate = lr;
                row.weight_decay = wd;
                row.dropout = dropout;
                row.repeats = config.repeats;

                const std::string key = cell_key(row);
                if (done.count(key) > 0) {
                  results.push_back(existing.at(key));
                  continue;
                }

                const std::uint64_t cell_seed = hash_combine(config.seed, fnv1a(key));
                RunSpec spec;
                spec.backbone = config.backbone;
                spec.mechanism = config.mechanism;
                spec.feature_kind = config.feature_kind;
                spec.loss = config.loss;
                spec.hidden_dim = config.hidden_dim;
                spec.m_override = config.m_override;
                spec.gaussian_delta = config.gaussian_delta;
                spec.plan.eps_x = eps_x;
                spec.plan.eps_y = eps_y;
                spec.plan.k_x = k_x;
                spec.plan.k_y = k_y;
                spec.plan.max_epochs = config.max_epochs;
                spec.plan.learning_rate = lr;
                spec.plan.weight_decay = wd;
                spec.plan.dropout = dropout;

                const auto t0 = std::chrono::steady_clock::now();
                std::vector<RunOutcome> outcomes;
                std::vector<std::uint64_t> run_seeds;
                std::vector<double> accs;
                for (int rep = 0; rep < config.repeats; ++rep) {
                  spec.plan.seed = hash_combine(cell_seed, static_cast<std::uint64_t>(rep));
                  run_seeds.push_back(spec.plan.seed);
                  outcomes.push_back(run_one(dataset, spec));
                  accs.push_back(outcomes.back().test_accuracy);
                  row.guard_infeasible += outcomes.back().guard_infeasible ? 1 : 0;
                }
                const auto [mean, half] =
                    bootstrap_ci(accs, 1000, hash_combine(cell_seed, fnv1a("ci")));
                row.acc_mean = mean;
                row.acc_ci95 = half;
                row.runtime_s = std::chrono::duration<double>(
                                    std::chrono::steady_clock::now() - t0)
                                    .count();

                {
                  std::ofstream out(config.out_csv, std::ios::app);
                  if (!out) throw IoError("cannot append to " + config.out_csv.string());
                  out << csv_line(row) << "\n";  // flush per completed cell
                }
                write_manifest(manifest_dir, config, dataset, row, cell_seed, outcomes,
                               run_seeds);
                if (config.write_artifacts) {
                  spec.plan.seed = run_seeds.front();
                  write_artifacts(manifest_dir, dataset, spec, key);
                }
                done.insert(key);
                results.push_back(row);
              }
            }
          }
        }
      }
    }
  }
  return results;
}

void emit_plotdata(const std::filesystem::path& results_csv, const std::string& x_column,
                   const std::string& series_column,
                   const std::vector<std::pair<std::string, std::string>>& filters,
                   const std::filesystem::path& out_tsv) {
  std::ifstream in(results_csv);
  if (!in) throw IoError("cannot read " + results_csv.string());

  std::string line;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (header.empty()) {
      header = split_csv_line(line);
      continue;
    }
    rows.push_back(split_csv_line(line));
  }
  if (header.empty()) throw SchemaError("results file has no header row");

  const auto column = [&](const std::string& name) {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) {
      throw SchemaError("results file lacks required column '" + name + "'");
    }
    return static_cast<std::size_t>(it - header.begin());
  };
  const std::size_t x_at = column(x_column);
  const std::size_t series_at = column(series_column);
  const std::size_t mean_at = column("acc_mean");
  const std::size_t ci_at = column("acc_ci95");
  std::vector<std::pair<std::size_t, std::string>> filter_cols;
  for (const auto& [name, value] : filters) filter_cols.emplace_back(column(name), value);

  struct PlotRow {
    std::string series;
    std::string x;
    std::string mean;
    std::string ci;
  };
  std::vector<PlotRow> plot;
  for (const auto& fields : rows) {
    if (fields.size() != header.size()) {
      throw SchemaError("results row column count does not match header");
    }
    bool keep = true;
    for (const auto& [at, value] : filter_cols) keep = keep && fields[at] == value;
    if (!keep) continue;
    plot.push_back({fields[series_at], fields[x_at], fields[mean_at], fields[ci_at]});
  }

  // Numeric sort where the values parse as numbers ("inf" sorts last).
  const auto numeric = [](const std::string& s, double& out) {
    try {
      out = parse_epsilon(s);
      return true;
    } catch (const ConfigError&) {
      try {
        out = std::stod(s);
        return true;
      } catch (...) {
        return false;
      }
    }
  };
  std::stable_sort(plot.begin(), plot.end(), [&](const PlotRow& a, const PlotRow& b) {
    if (a.series != b.series) {
      double x = 0, y = 0;
      if (numeric(a.series, x) && numeric(b.series, y) && x != y) return x < y;
      return a.series < b.series;
    }
    double x = 0, y = 0;
    if (numeric(a.x, x) && numeric(b.x, y) && x != y) return x < y;
    return a.x < b.x;
  });

  if (out_tsv.has_parent_path()) std::filesystem::create_directories(out_tsv.parent_path());
  std::ofstream out(out_tsv);
  if (!out) throw IoError("cannot write " + out_tsv.string());
  out << series_column << "\t" << x_column << "\tacc_mean\tacc_ci95\n";
  for (const auto& r : plot) {
    out << r.series << "\t" << r.x << "\t" << r.mean << "\t" << r.ci << "\n";
  }
}

}  // namespace lpg
