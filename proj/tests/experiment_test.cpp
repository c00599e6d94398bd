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

#include <fstream>
#include <regex>
#include <sstream>

#include "lpg/errors.hpp"
#include "lpg/experiment.hpp"
#include "testutil.hpp"

using namespace lpg;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr const char* kTinySbm = "sbm:n=90,c=3,d=8,pin=0.2,pout=0.01,signal=0.9,seed=2";

std::string read_all(const std::filesystem::path& path) {
  std::ifstream in(path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return std::move(buf).str();
}

// Zeroes the wall-clock column so deterministic outputs can be compared.
std::string strip_runtime(const std::string& csv) {
  return std::regex_replace(csv, std::regex(R"(,[0-9.]+\n)"), ",0\n");
}

ExperimentConfig tiny_config(const std::filesystem::path& out) {
  ExperimentConfig config;
  config.dataset = kTinySbm;
  config.repeats = 2;
  config.max_epochs = 30;
  config.hidden_dim = 8;
  config.seed = 5;
  config.out_csv = out;
  config.grid.eps_x = {1.0};
  config.grid.eps_y = {1.0};
  config.grid.k_x = {2};
  config.grid.k_y = {2};
  return config;
}

}  // namespace

TEST_SUITE_BEGIN("experiment");

TEST_CASE("tag parsing round-trips and rejects junk") {
  CHECK(parse_mechanism("mb") == MechanismKind::kMultiBit);
  CHECK(parse_mechanism("1b") == MechanismKind::kOneBit);
  CHECK(parse_feature_kind("ohd") == FeatureKind::kOhd);
  CHECK(parse_loss("fc") == LossKind::kForwardCorrection);
  CHECK(parse_backbone("gcn") == Backbone::kGcn);
  CHECK_THROWS_AS(parse_mechanism("rr"), ConfigError);
  CHECK_THROWS_AS(parse_feature_kind("none"), ConfigError);
  CHECK_THROWS_AS(parse_loss("mse"), ConfigError);

  CHECK(parse_epsilon("inf") == kInf);
  CHECK(format_epsilon(kInf) == "inf");
  CHECK(parse_epsilon(format_epsilon(0.01)) == doctest::Approx(0.01));
  CHECK_THROWS_AS(parse_epsilon("-1"), ConfigError);
  CHECK_THROWS_AS(parse_epsilon("zero"), ConfigError);
}

TEST_CASE("baseline features: ones, degree one-hot with clipping, seeded uniform") {
  const Graph g = testutil::star_graph(5);  // center degree 5, leaves degree 1

  const FeatureMatrix ones = baseline_features(FeatureKind::kOnes, g, 4, 0);
  for (Eigen::Index v = 0; v < ones.values.rows(); ++v) {
    CHECK(ones.values.row(v).sum() == doctest::Approx(4.0));
  }

  const FeatureMatrix ohd = baseline_features(FeatureKind::kOhd, g, 10, 0);
  CHECK(ohd.values(0, 5) == 1.0);  // degree 5
  CHECK(ohd.values.row(0).sum() == doctest::Approx(1.0));
  CHECK(ohd.values(1, 1) == 1.0);  // leaves have degree 1

  const FeatureMatrix clipped = baseline_features(FeatureKind::kOhd, g, 3, 0);
  CHECK(clipped.values(0, 2) == 1.0);  // degree 5 clips to d-1

  const FeatureMatrix rnd_a = baseline_features(FeatureKind::kRnd, g, 6, 42);
  const FeatureMatrix rnd_b = baseline_features(FeatureKind::kRnd, g, 6, 42);
  CHECK(rnd_a.values == rnd_b.values);
  CHECK(rnd_a.values.minCoeff() >= 0.0);
  CHECK(rnd_a.values.maxCoeff() <= 1.0);
}

TEST_CASE("bootstrap_ci: degenerate, reproducible, and near-normal behavior") {
  const std::vector<double> equal(8, 0.75);
  const auto [mean_eq, half_eq] = bootstrap_ci(equal, 1000, 3);
  CHECK(mean_eq == doctest::Approx(0.75));
  CHECK(half_eq == 0.0);

  std::vector<double> bimodal;
  for (int i = 0; i < 5; ++i) {
    bimodal.push_back(0.0);
    bimodal.push_back(1.0);
  }
  const auto [m1, h1] = bootstrap_ci(bimodal, 1000, 9);
  const auto [m2, h2] = bootstrap_ci(bimodal, 1000, 9);
  CHECK(m1 == m2);
  CHECK(h1 == h2);
  CHECK(h1 > 0.0);

  // For ~normal samples the percentile interval approximates 1.96 sd/sqrt(n).
  Rng rng(17);
  std::vector<double> normals;
  double sum = 0;
  for (int i = 0; i < 200; ++i) {
    normals.push_back(0.5 + rng.normal(0.08));
    sum += normals.back();
  }
  const double mean = sum / 200;
  double var = 0;
  for (const double s : normals) var += (s - mean) * (s - mean);
  var /= 199;
  const double expected_half = 1.96 * std::sqrt(var / 200);
  const auto [m3, h3] = bootstrap_ci(normals, 1000, 21);
  CHECK(h3 == doctest::Approx(expected_half).epsilon(0.15));

  const std::vector<double> single = {0.4};
  const auto [m4, h4] = bootstrap_ci(single, 1000, 2);
  CHECK(m4 == doctest::Approx(0.4));
  CHECK(h4 == 0.0);
}

TEST_CASE("resolve_dataset parses synthetic specs and rejects bad keys") {
  const Dataset ds = resolve_dataset("sbm:n=50,c=2,d=4,pin=0.3,pout=0.02,seed=1");
  CHECK(ds.graph.num_nodes() == 50);
  CHECK(ds.labels.num_classes() == 2);
  CHECK_THROWS_AS(resolve_dataset("sbm:bogus=1"), ConfigError);
}

TEST_CASE("dataset presets cover the four shipped names") {
  REQUIRE(dataset_step_preset("cora").has_value());
  CHECK(dataset_step_preset("cora")->k_x == 16);
  CHECK(dataset_step_preset("cora")->k_y == 8);
  CHECK(dataset_step_preset("pubmed")->k_x == 16);
  CHECK(dataset_step_preset("pubmed")->k_y == 2);
  CHECK(dataset_step_preset("facebook")->k_x == 4);
  CHECK(dataset_step_preset("lastfm")->k_x == 8);
  CHECK_FALSE(dataset_step_preset("unknown").has_value());
}

TEST_CASE("run_one audits the spent budget") {
  const Dataset ds = resolve_dataset(kTinySbm);
  RunSpec spec;
  spec.plan.eps_x = 1.0;
  spec.plan.eps_y = 2.0;
  spec.plan.k_x = 2;
  spec.plan.k_y = 2;
  spec.plan.max_epochs = 10;
  spec.plan.seed = 7;
  spec.hidden_dim = 8;
  const RunOutcome outcome = run_one(ds, spec);
  CHECK(outcome.ledger_epsilon == doctest::Approx(3.0));
  CHECK(outcome.test_accuracy >= 0.0);
  CHECK(outcome.test_accuracy <= 1.0);
}

TEST_CASE("feature bypass at infinite budget matches across mechanisms") {
  const Dataset ds = resolve_dataset(kTinySbm);
  RunSpec spec;
  spec.plan.eps_x = kInf;
  spec.plan.eps_y = 1.0;
  spec.plan.k_x = 2;
  spec.plan.k_y = 2;
  spec.plan.max_epochs = 20;
  spec.plan.seed = 11;
  spec.hidden_dim = 8;

  spec.mechanism = MechanismKind::kMultiBit;
  const RunOutcome mb = run_one(ds, spec);
  spec.mechanism = MechanismKind::kLaplace;
  const RunOutcome lp = run_one(ds, spec);
  // Both bypass the randomizer entirely, so the runs are identical.
  CHECK(mb.test_accuracy == lp.test_accuracy);
  CHECK(mb.ledger_epsilon == doctest::Approx(1.0));  // only the label budget
}

TEST_CASE("the 1-bit mechanism is the multi-bit mechanism at m = d") {
  const Dataset ds = resolve_dataset(kTinySbm);
  RunSpec spec;
  spec.plan.eps_x = 4.0;
  spec.plan.eps_y = kInf;
  spec.plan.k_x = 2;
  spec.plan.k_y = 0;
  spec.plan.max_epochs = 15;
  spec.plan.seed = 13;
  spec.hidden_dim = 8;

  spec.mechanism = MechanismKind::kOneBit;
  const RunOutcome one_bit = run_one(ds, spec);
  spec.mechanism = MechanismKind::kMultiBit;
  spec.m_override = 8;  // = d
  const RunOutcome forced = run_one(ds, spec);
  CHECK(one_bit.test_accuracy == forced.test_accuracy);
}

TEST_CASE("run_experiment: determinism, idempotency, schema") {
  testutil::TempDir tmp;
  const auto out_a = tmp.path() / "a.csv";
  const auto out_b = tmp.path() / "b.csv";

  auto config = tiny_config(out_a);
  const auto rows_a = run_experiment(config);
  REQUIRE(rows_a.size() == 1);
  CHECK(rows_a[0].repeats == 2);
  CHECK(rows_a[0].acc_mean >= 0.0);
  CHECK(rows_a[0].acc_mean <= 1.0);

  config.out_csv = out_b;
  run_experiment(config);
  // Identical configs produce identical bytes modulo the wall-clock column.
  CHECK(strip_runtime(read_all(out_a)) == strip_runtime(read_all(out_b)));

  // Re-running over the same file appends nothing.
  const std::string before = read_all(out_a);
  config.out_csv = out_a;
  const auto rows_again = run_experiment(config);
  CHECK(read_all(out_a) == before);
  REQUIRE(rows_again.size() == 1);
  // cached rows come back through the CSV's 6-decimal formatting
  CHECK(rows_again[0].acc_mean == doctest::Approx(rows_a[0].acc_mean).epsilon(1e-6));

  const std::string csv = read_all(out_a);
  CHECK(csv.find("dataset,backbone,mechanism,feature_kind,loss,eps_x,eps_y") !=
        std::string::npos);
  CHECK(csv.find("# lpgraph results v1") != std::string::npos);
}

TEST_CASE("manifest records per-repeat accuracies that average to the row mean") {
  testutil::TempDir tmp;
  auto config = tiny_config(tmp.path() / "r.csv");
  const auto rows = run_experiment(config);
  REQUIRE(rows.size() == 1);

  const auto manifest_dir = tmp.path() / "manifests";
  REQUIRE(std::filesystem::exists(manifest_dir));
  double sum = 0;
  int count = 0;
  double recorded_mean = -1;
  for (const auto& entry : std::filesystem::directory_iterator(manifest_dir)) {
    std::ifstream in(entry.path());
    std::string line;
    while (std::getline(in, line)) {
      if (line.rfind("rep", 0) == 0 && line.find(".acc=") != std::string::npos) {
        sum += std::stod(line.substr(line.find('=') + 1));
        ++count;
      }
      if (line.rfind("acc_mean=", 0) == 0) {
        recorded_mean = std::stod(line.substr(line.find('=') + 1));
      }
    }
  }
  REQUIRE(count == 2);
  CHECK(sum / count == doctest::Approx(rows[0].acc_mean).epsilon(1e-6));
  CHECK(recorded_mean == doctest::Approx(rows[0].acc_mean).epsilon(1e-6));
}

TEST_CASE("emit_plotdata produces long-form series and validates columns") {
  testutil::TempDir tmp;
  const auto csv = tmp.path() / "results.csv";
  auto config = tiny_config(csv);
  config.grid.eps_x = {0.5, 1.0};
  config.grid.eps_y = {1.0, kInf};
  config.repeats = 1;
  config.max_epochs = 10;
  run_experiment(config);

  const auto tsv = tmp.path() / "plot.tsv";
  emit_plotdata(csv, "eps_x", "eps_y", {}, tsv);
  std::ifstream in(tsv);
  std::string header;
  std::getline(in, header);
  CHECK(header == "eps_y\teps_x\tacc_mean\tacc_ci95");
  int data_lines = 0;
  std::string line;
  std::vector<std::string> first_col;
  while (std::getline(in, line)) {
    ++data_lines;
    first_col.push_back(line.substr(0, line.find('\t')));
  }
  CHECK(data_lines == 4);
  CHECK(first_col.front() == "1");   // numeric series sort
  CHECK(first_col.back() == "inf");  // inf sorts last

  CHECK_THROWS_AS(emit_plotdata(csv, "no_such_column", "eps_y", {}, tsv), SchemaError);

  // filters keep only matching rows
  const auto tsv2 = tmp.path() / "filtered.tsv";
  emit_plotdata(csv, "eps_x", "eps_y", {{"eps_y", "inf"}}, tsv2);
  std::ifstream in2(tsv2);
  std::getline(in2, line);
  int filtered = 0;
  while (std::getline(in2, line)) ++filtered;
  CHECK(filtered == 2);
}

TEST_CASE("emit_plotdata on an empty results file is header-only") {
  testutil::TempDir tmp;
  const auto csv = testutil::write_file(
      tmp.path() / "empty.csv",
      "# lpgraph results v1\n"
      "dataset,backbone,mechanism,feature_kind,loss,eps_x,eps_y,kx,ky,lr,wd,dropout,"
      "repeats,acc_mean,acc_ci95,guard_infeasible,runtime_s\n");
  const auto tsv = tmp.path() / "plot.tsv";
  emit_plotdata(csv, "eps_x", "eps_y", {}, tsv);
  const std::string content = read_all(tsv);
  CHECK(content == "eps_y\teps_x\tacc_mean\tacc_ci95\n");
}

TEST_SUITE_END();
