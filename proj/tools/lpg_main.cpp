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
// Experiment harness for locally-private graph learning: dataset
// preparation, single runs, grid sweeps, and plot-data export.

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "lpg/errors.hpp"
#include "lpg/experiment.hpp"

namespace {

namespace fs = std::filesystem;

std::vector<double> parse_eps_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(lpg::parse_epsilon(item));
  if (out.empty()) throw lpg::ConfigError("empty list: '" + text + "'");
  return out;
}

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
  if (out.empty()) throw lpg::ConfigError("empty list: '" + text + "'");
  return out;
}

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(std::stoi(item));
  if (out.empty()) throw lpg::ConfigError("empty list: '" + text + "'");
  return out;
}

void write_dataset_files(const lpg::Dataset& ds, const fs::path& dir) {
  fs::create_directories(dir);
  {
    std::ofstream edges(dir / "edges.tsv");
    if (!edges) throw lpg::IoError("cannot write " + (dir / "edges.tsv").string());
    edges << "# u<TAB>v, one undirected edge per line, 0-based ids\n";
    for (lpg::NodeId v = 0; v < ds.graph.num_nodes(); ++v) {
      for (const lpg::NodeId u : ds.graph.neighbors(v)) {
        if (u > v) edges << v << '\t' << u << '\n';
      }
    }
  }
  {
    std::ofstream nodes(dir / "nodes.tsv");
    if (!nodes) throw lpg::IoError("cannot write " + (dir / "nodes.tsv").string());
    nodes << "id\tlabel\t";
    for (Eigen::Index j = 0; j < ds.features.dim(); ++j) {
      nodes << (j > 0 ? "," : "") << "f" << j;
    }
    nodes << '\n';
    char buf[64];
    for (lpg::NodeId v = 0; v < ds.graph.num_nodes(); ++v) {
      nodes << v << '\t';
      if (ds.labels.is_labeled(v)) {
        nodes << ds.labels.clean(v);
      } else {
        nodes << '-';
      }
      nodes << '\t';
      for (Eigen::Index j = 0; j < ds.features.dim(); ++j) {
        std::snprintf(buf, sizeof(buf), "%g", ds.features.values(v, j));
        nodes << (j > 0 ? "," : "") << buf;
      }
      nodes << '\n';
    }
  }
}

void print_summary(const lpg::Dataset& ds) {
  long labeled = 0;
  for (lpg::NodeId v = 0; v < ds.graph.num_nodes(); ++v) labeled += ds.labels.is_labeled(v);
  std::cout << "dataset:  " << ds.name << "\n"
            << "nodes:    " << ds.graph.num_nodes() << "\n"
            << "edges:    " << ds.graph.num_edges() << " (undirected)\n"
            << "features: " << ds.features.dim() << "\n"
            << "classes:  " << ds.labels.num_classes() << "\n"
            << "labeled:  " << labeled << "\n"
            << "avg deg:  "
            << 2.0 * static_cast<double>(ds.graph.num_edges()) / ds.graph.num_nodes()
            << "\n";
}

struct SweepCli {
  std::string dataset;
  std::string backbone = "sage";
  std::string mechanism = "mb";
  std::string features = "private";
  std::string loss = "drop";
  std::string eps_x = "inf";
  std::string eps_y = "inf";
  std::string kx;  // empty = dataset preset (or 0)
  std::string ky;
  std::string lr = "0.01";
  std::string wd = "0.001";
  std::string dropout = "0";
  int repeats = 0;
  int epochs = 500;
  int hidden = 16;
  int m_override = 0;
  std::uint64_t seed = 0;
  double delta = 1e-10;
  std::string out = "results.csv";
  bool artifacts = false;
};

void add_sweep_flags(CLI::App* cmd, SweepCli& opt) {
  cmd->add_option("--dataset", opt.dataset,
                  "dataset directory (edges.tsv + nodes.tsv) or sbm:<spec>")
      ->required();
  cmd->add_option("--backbone", opt.backbone, "gcn|sage");
  cmd->add_option("--mechanism", opt.mechanism, "mb|1b|lp|ag");
  cmd->add_option("--features", opt.features, "private|ones|ohd|rnd");
  cmd->add_option("--loss", opt.loss, "drop|ce|fc");
  cmd->add_option("--eps-x", opt.eps_x, "feature budget(s), e.g. '1' or '0.01,0.1,1,inf'");
  cmd->add_option("--eps-y", opt.eps_y, "label budget(s)");
  cmd->add_option("--kx", opt.kx, "feature propagation steps (default: dataset preset)");
  cmd->add_option("--ky", opt.ky, "label propagation steps (default: dataset preset)");
  cmd->add_option("--lr", opt.lr, "learning rate(s)");
  cmd->add_option("--wd", opt.wd, "weight decay(s)");
  cmd->add_option("--dropout", opt.dropout, "dropout rate(s)");
  cmd->add_option("--repeats", opt.repeats, "runs per grid cell");
  cmd->add_option("--epochs", opt.epochs, "max training epochs");
  cmd->add_option("--hidden", opt.hidden, "hidden dimension");
  cmd->add_option("--m", opt.m_override, "force the multi-bit sampling parameter");
  cmd->add_option("--seed", opt.seed, "master seed");
  cmd->add_option("--delta", opt.delta, "analytic Gaussian delta");
  cmd->add_option("--out", opt.out, "results CSV path");
  cmd->add_flag("--artifacts", opt.artifacts, "dump wire-format perturbed data");
}

int run_sweep(const SweepCli& opt, bool single_run) {
  lpg::ExperimentConfig config;
  config.dataset = opt.dataset;
  config.backbone = lpg::parse_backbone(opt.backbone);
  config.mechanism = lpg::parse_mechanism(opt.mechanism);
  config.feature_kind = lpg::parse_feature_kind(opt.features);
  config.loss = lpg::parse_loss(opt.loss);
  config.repeats = opt.repeats > 0 ? opt.repeats : (single_run ? 1 : 10);
  config.seed = opt.seed;
  config.out_csv = opt.out;
  config.hidden_dim = opt.hidden;
  config.max_epochs = opt.epochs;
  config.gaussian_delta = opt.delta;
  config.write_artifacts = opt.artifacts;
  if (opt.m_override > 0) config.m_override = opt.m_override;

  config.grid.eps_x = parse_eps_list(opt.eps_x);
  config.grid.eps_y = parse_eps_list(opt.eps_y);
  config.grid.learning_rate = parse_double_list(opt.lr);
  config.grid.weight_decay = parse_double_list(opt.wd);
  config.grid.dropout = parse_double_list(opt.dropout);

  if (!opt.kx.empty() || !opt.ky.empty()) {
    config.grid.k_x = opt.kx.empty() ? std::vector<int>{0} : parse_int_list(opt.kx);
    config.grid.k_y = opt.ky.empty() ? std::vector<int>{0} : parse_int_list(opt.ky);
  } else {
    // No explicit steps: fall back to the shipped per-dataset presets.
    const fs::path path(opt.dataset);
    const auto preset = lpg::dataset_step_preset(path.filename().string());
    config.grid.k_x = {preset ? preset->k_x : 0};
    config.grid.k_y = {preset ? preset->k_y : 0};
  }

  const auto rows = lpg::run_experiment(config);
  for (const auto& row : rows) {
    std::cout << row.dataset << " " << lpg::to_string(row.mechanism) << "/"
              << lpg::to_string(row.feature_kind) << "/" << lpg::to_string(row.loss)
              << " eps_x=" << lpg::format_epsilon(row.eps_x)
              << " eps_y=" << lpg::format_epsilon(row.eps_y) << " kx=" << row.k_x
              << " ky=" << row.k_y << "  acc=" << row.acc_mean << " +- " << row.acc_ci95
              << (row.guard_infeasible > 0
                      ? " (guard infeasible x" + std::to_string(row.guard_infeasible) + ")"
                      : "")
              << "\n";
  }
  std::cout << "results written to " << opt.out << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"locally-private graph learning experiment harness"};
  app.require_subcommand(1);

  // ingest
  std::string in_edges;
  std::string in_nodes;
  std::string ingest_out;
  auto* ingest = app.add_subcommand("ingest", "validate (and optionally re-emit) a dataset");
  ingest->add_option("--edges", in_edges, "edges file")->required();
  ingest->add_option("--nodes", in_nodes, "nodes file")->required();
  ingest->add_option("--out", ingest_out, "write the canonical copy to this directory");

  // synth
  lpg::SbmParams sbm;
  sbm.num_nodes = 1000;
  sbm.num_classes = 4;
  sbm.feature_dim = 50;
  sbm.p_in = 0.02;
  sbm.p_out = 0.002;
  sbm.feature_signal = 0.8;
  std::string synth_out;
  auto* synth = app.add_subcommand("synth", "generate a planted-partition dataset");
  synth->add_option("--nodes", sbm.num_nodes, "node count");
  synth->add_option("--classes", sbm.num_classes, "class count");
  synth->add_option("--dim", sbm.feature_dim, "feature dimension");
  synth->add_option("--p-in", sbm.p_in, "intra-block edge probability");
  synth->add_option("--p-out", sbm.p_out, "inter-block edge probability");
  synth->add_option("--signal", sbm.feature_signal, "feature separation in [0,1]");
  synth->add_option("--seed", sbm.seed, "generator seed");
  synth->add_option("--out", synth_out, "output directory")->required();

  // train / sweep
  SweepCli train_opt;
  auto* train = app.add_subcommand("train", "single training run");
  add_sweep_flags(train, train_opt);
  SweepCli sweep_opt;
  auto* sweep = app.add_subcommand("sweep", "grid sweep");
  add_sweep_flags(sweep, sweep_opt);

  // report
  std::string rep_results;
  std::string rep_x = "eps_x";
  std::string rep_series = "eps_y";
  std::vector<std::string> rep_filters;
  std::string rep_out = "plot.tsv";
  auto* report = app.add_subcommand("report", "export long-form plot data from results");
  report->add_option("--results", rep_results, "results CSV")->required();
  report->add_option("--x", rep_x, "column for the x axis");
  report->add_option("--series", rep_series, "column defining one series per value");
  report->add_option("--filter", rep_filters, "column=value filters")->take_all();
  report->add_option("--out", rep_out, "output TSV");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*ingest) {
      const auto ds = lpg::load_graph(in_edges, in_nodes);
      ds.graph.validate();
      print_summary(ds);
      if (!ingest_out.empty()) {
        write_dataset_files(ds, ingest_out);
        std::cout << "canonical copy written to " << ingest_out << "\n";
      }
      return 0;
    }
    if (*synth) {
      const auto ds = lpg::generate_sbm(sbm);
      ds.graph.validate();
      write_dataset_files(ds, synth_out);
      print_summary(ds);
      std::cout << "dataset written to " << synth_out << "\n";
      return 0;
    }
    if (*train) return run_sweep(train_opt, true);
    if (*sweep) return run_sweep(sweep_opt, false);
    if (*report) {
      std::vector<std::pair<std::string, std::string>> filters;
      for (const auto& f : rep_filters) {
        const auto eq = f.find('=');
        if (eq == std::string::npos) {
          throw lpg::ConfigError("filter must look like column=value: '" + f + "'");
        }
        filters.emplace_back(f.substr(0, eq), f.substr(eq + 1));
      }
      lpg::emit_plotdata(rep_results, rep_x, rep_series, filters, rep_out);
      std::cout << "plot data written to " << rep_out << "\n";
      return 0;
    }
  } catch (const lpg::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
