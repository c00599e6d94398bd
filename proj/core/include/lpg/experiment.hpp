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

#ifndef LPG_EXPERIMENT_HPP_
#define LPG_EXPERIMENT_HPP_

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "lpg/dataset.hpp"
#include "lpg/train.hpp"

namespace lpg {

enum class MechanismKind { kMultiBit, kOneBit, kLaplace, kGaussian };
enum class FeatureKind { kPrivate, kOnes, kOhd, kRnd };

std::string to_string(MechanismKind kind);
std::string to_string(FeatureKind kind);
std::string to_string(LossKind kind);
std::string to_string(Backbone backbone);
MechanismKind parse_mechanism(const std::string& tag);    // mb | 1b | lp | ag
FeatureKind parse_feature_kind(const std::string& tag);   // private | ones | ohd | rnd
LossKind parse_loss(const std::string& tag);              // drop | ce | fc
Backbone parse_backbone(const std::string& tag);          // gcn | sage

// "inf" round-trips through config files and CSV columns.
double parse_epsilon(const std::string& text);
std::string format_epsilon(double eps);

// Resolves a dataset argument: either a directory holding edges.tsv and
// nodes.tsv, or an inline synthetic spec
//   sbm:n=<nodes>,c=<classes>,d=<dim>,pin=<p>,pout=<p>,signal=<s>,seed=<k>
// Features are min-max normalized to [0, 1] either way.
Dataset resolve_dataset(const std::string& spec);

// Shipped propagation-step presets per dataset name.
struct StepPreset {
  int k_x;
  int k_y;
};
std::optional<StepPreset> dataset_step_preset(std::string_view dataset_name);

// Ad-hoc feature baselines, dimension-matched to the private features:
// all-ones, one-hot degree (clipped to d-1), seeded uniform [0, 1].
FeatureMatrix baseline_features(FeatureKind kind, const Graph& graph, int d,
                                std::uint64_t seed);

// Percentile bootstrap over the mean: returns (mean, half-width of the
// [2.5%, 97.5%] interval of resampled means).
std::pair<double, double> bootstrap_ci(std::span<const double> samples,
                                       int resamples = 1000, std::uint64_t seed = 0);

// One end-to-end private training run: split, perturb, train, audit the
// privacy ledger. Everything derives deterministically from plan.seed.
struct RunSpec {
  Backbone backbone = Backbone::kSage;
  MechanismKind mechanism = MechanismKind::kMultiBit;
  FeatureKind feature_kind = FeatureKind::kPrivate;
  LossKind loss = LossKind::kDrop;
  TrainPlan plan;
  int hidden_dim = 16;
  std::optional<int> m_override;  // forces the multi-bit sampling parameter
  double gaussian_delta = 1e-10;
};

struct RunOutcome {
  double test_accuracy = 0.0;
  bool guard_infeasible = false;
  int selected_epoch = 0;
  double ledger_epsilon = 0.0;  // audited total spent budget
  std::uint64_t split_seed = 0;
};

RunOutcome run_one(const Dataset& dataset, const RunSpec& spec);

// Sweep configuration: the cross product of the grid lists, `repeats` runs
// per cell, one CSV row per cell.
struct SweepGrid {
  std::vector<double> eps_x = {std::numeric_limits<double>::infinity()};
  std::vector<double> eps_y = {std::numeric_limits<double>::infinity()};
  std::vector<int> k_x = {0};
  std::vector<int> k_y = {0};
  std::vector<double> learning_rate = {1e-2};
  std::vector<double> weight_decay = {1e-3};
  std::vector<double> dropout = {0.0};
};

struct ExperimentConfig {
  std::string dataset;  // directory or sbm: spec
  Backbone backbone = Backbone::kSage;
  MechanismKind mechanism = MechanismKind::kMultiBit;
  FeatureKind feature_kind = FeatureKind::kPrivate;
  LossKind loss = LossKind::kDrop;
  SweepGrid grid;
  int repeats = 10;
  std::uint64_t seed = 0;
  std::filesystem::path out_csv;
  int hidden_dim = 16;
  int max_epochs = 500;
  std::optional<int> m_override;
  double gaussian_delta = 1e-10;
  bool write_artifacts = false;  // dump wire-format perturbed data per cell
};

struct ResultRow {
  std::string dataset;
  Backbone backbone = Backbone::kSage;
  MechanismKind mechanism = MechanismKind::kMultiBit;
  FeatureKind feature_kind = FeatureKind::kPrivate;
  LossKind loss = LossKind::kDrop;
  double eps_x = 0.0;
  double eps_y = 0.0;
  int k_x = 0;
  int k_y = 0;
  double learning_rate = 0.0;
  double weight_decay = 0.0;
  double dropout = 0.0;
  int repeats = 0;
  double acc_mean = 0.0;
  double acc_ci95 = 0.0;
  int guard_infeasible = 0;  // count of flagged repeats
  double runtime_s = 0.0;
};

// Runs every grid cell not already present in the output CSV (cell keys are
// idempotent), flushing each completed row. Per-cell seeds derive from
// (seed, cell key), so scheduling order can never change results. Writes a
// per-cell manifest with every plan field, per-repeat seeds/accuracies, the
// dataset hash, and the audited budget.
std::vector<ResultRow> run_experiment(const ExperimentConfig& config);

// Long-form TSV for external plotting: one row per (series value, x value),
// columns series, x, acc_mean, acc_ci95. Throws SchemaError if the CSV lacks
// a requested column.
void emit_plotdata(const std::filesystem::path& results_csv, const std::string& x_column,
                   const std::string& series_column,
                   const std::vector<std::pair<std::string, std::string>>& filters,
                   const std::filesystem::path& out_tsv);

}  // namespace lpg

#endif  // LPG_EXPERIMENT_HPP_
