/*
 * Copyright (c) 2026, The redunda authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cli/commands.hpp"
#include "redunda/error.hpp"

namespace {

using redunda::DatasetFormat;
using redunda::Error;
using redunda::ErrorCode;

std::optional<DatasetFormat> to_format(const std::string& name) {
  if (name.empty()) return std::nullopt;
  auto f = redunda::parse_format(name);
  if (!f) throw Error(ErrorCode::invalid_argument, "unknown format '" + name + "' (binary|csv)");
  return f;
}

redunda::OverallMode to_mode(const std::string& name) {
  if (name == "cluster") return redunda::OverallMode::cluster_weighted;
  if (name == "class") return redunda::OverallMode::class_mean;
  throw Error(ErrorCode::invalid_argument, "unknown --overall-mode '" + name + "' (cluster|class)");
}

struct ReportSwitches {
  bool histogram = false;
  bool dissimilarity = false;
  bool nearest = false;
  bool none = false;

  void attach(CLI::App* cmd) {
    cmd->add_flag("--histogram", histogram, "Emit cluster-size histograms");
    cmd->add_flag("--dissimilarity", dissimilarity, "Emit average dissimilarity to the retained sample");
    cmd->add_flag("--nearest-excluded", nearest, "Emit nearest excluded neighbors");
    cmd->add_flag("--no-reports", none, "Skip all reports");
  }

  // No explicit selection means every report.
  redunda::ReportFlags flags() const {
    if (none) return {false, false, false};
    if (!histogram && !dissimilarity && !nearest) return {};
    return {histogram, dissimilarity, nearest};
  }
};

std::string join_args(int argc, char** argv) {
  std::string out;
  for (int i = 0; i < argc; ++i) {
    if (i) out += ' ';
    out += argv[i];
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"redunda: redundancy-aware subset selection over labeled embeddings"};
  app.require_subcommand(1);

  std::string input, format, out_dir, method = "cluster-medoid", mode = "cluster";
  double fraction = 1.0;
  std::optional<std::uint64_t> seed;
  std::size_t jobs = 1;
  std::size_t memory_cap = redunda::kDefaultMemoryCapBytes;
  bool dump = false;
  ReportSwitches reports;

  auto* select = app.add_subcommand("select", "Cluster each class and keep one medoid per redundant group");
  select->add_option("--input", input, "Dataset file")->required();
  select->add_option("--format", format, "binary|csv (default: from extension)");
  select->add_option("--fraction", fraction, "Retention fraction in (0, 1]")->required();
  select->add_option("--method", method, "cluster-medoid|uniform-random");
  select->add_option("--seed", seed, "Seed for uniform-random");
  select->add_option("--out", out_dir, "Output directory")->required();
  select->add_option("--jobs", jobs, "Concurrent class jobs");
  select->add_option("--memory-cap", memory_cap, "Distance-matrix byte cap per class");
  select->add_option("--overall-mode", mode, "cluster|class averaging for the overall dissimilarity");
  select->add_flag("--dump-dendrograms", dump, "Write dendrograms/class_<id>.txt");
  reports.attach(select);

  std::uint64_t baseline_seed = 0;
  auto* baseline = app.add_subcommand("baseline", "Stratified uniform random subset");
  baseline->add_option("--input", input, "Dataset file")->required();
  baseline->add_option("--format", format, "binary|csv (default: from extension)");
  baseline->add_option("--fraction", fraction, "Retention fraction in (0, 1]")->required();
  baseline->add_option("--seed", baseline_seed, "Seed")->required();
  baseline->add_option("--out", out_dir, "Output directory")->required();

  std::string manifest;
  auto* stats = app.add_subcommand("stats", "Redundancy reports for an existing cluster-medoid manifest");
  stats->add_option("--input", input, "Dataset file")->required();
  stats->add_option("--format", format, "binary|csv (default: from extension)");
  stats->add_option("--manifest", manifest, "manifest.json")->required();
  stats->add_option("--out", out_dir, "Output directory")->required();
  stats->add_option("--jobs", jobs, "Concurrent class jobs");
  stats->add_option("--memory-cap", memory_cap, "Distance-matrix byte cap per class");
  stats->add_option("--overall-mode", mode, "cluster|class");
  reports.attach(stats);

  redunda::cli::SynthConfig synth_cfg;
  std::string synth_out, truth;
  bool no_certify = false;
  auto* synth = app.add_subcommand("synth", "Generate a dataset with planted redundant groups");
  synth->add_option("--out", synth_out, "Dataset file to write")->required();
  synth->add_option("--format", format, "binary|csv (default: from extension)");
  synth->add_option("--truth", truth, "Ground-truth JSON to write");
  synth->add_option("--classes", synth_cfg.spec.classes, "Number of classes");
  synth->add_option("--groups", synth_cfg.spec.groups_per_class, "Groups per class");
  synth->add_option("--sizes", synth_cfg.spec.group_sizes, "Explicit group sizes, one per group")->delimiter(',');
  synth->add_option("--size-min", synth_cfg.spec.size_min, "Smallest group size");
  synth->add_option("--size-max", synth_cfg.spec.size_max, "Largest group size");
  synth->add_option("--dim", synth_cfg.spec.dim, "Dimension");
  synth->add_option("--spread", synth_cfg.spec.spread, "Within-group spread");
  synth->add_option("--margin", synth_cfg.spec.margin, "Between-group anchor margin");
  synth->add_option("--seed", synth_cfg.spec.seed, "Seed");
  synth->add_flag("--no-certify", no_certify, "Skip the O(n^2) separation measurement");

  std::optional<std::size_t> dimension;
  auto* validate = app.add_subcommand("validate", "Check a dataset file and optionally a manifest");
  validate->add_option("--input", input, "Dataset file")->required();
  validate->add_option("--format", format, "binary|csv (default: from extension)");
  validate->add_option("--dimension", dimension, "Expected dimension");
  validate->add_option("--manifest", manifest, "manifest.json to check against the dataset");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "invalid_argument: " << e.what() << "\n";
    return 1;
  }

  const std::string command_line = join_args(argc, argv);
  return redunda::cli::guarded(
      [&] {
        if (select->parsed() || baseline->parsed()) {
          redunda::cli::RunConfig cfg;
          cfg.input_path = input;
          cfg.input_format = to_format(format);
          cfg.fraction = fraction;
          cfg.output_dir = out_dir;
          cfg.command_line = command_line;
          if (baseline->parsed()) {
            cfg.method = redunda::SelectionMethod::uniform_random;
            cfg.seed = baseline_seed;
          } else {
            auto m = redunda::parse_method(method);
            if (!m) throw Error(ErrorCode::invalid_argument, "unknown --method '" + method + "'");
            cfg.method = *m;
            cfg.seed = seed;
            cfg.jobs = jobs;
            cfg.memory_cap_bytes = memory_cap;
            cfg.reports = reports.flags();
            cfg.overall_mode = to_mode(mode);
            cfg.dump_dendrograms = dump;
          }
          redunda::cli::run_select(cfg, std::cout);
        } else if (stats->parsed()) {
          redunda::cli::StatsConfig cfg;
          cfg.input_path = input;
          cfg.input_format = to_format(format);
          cfg.manifest_path = manifest;
          cfg.output_dir = out_dir;
          cfg.jobs = jobs;
          cfg.memory_cap_bytes = memory_cap;
          cfg.reports = reports.flags();
          cfg.overall_mode = to_mode(mode);
          cfg.command_line = command_line;
          redunda::cli::run_stats(cfg, std::cout);
        } else if (synth->parsed()) {
          synth_cfg.output_path = synth_out;
          synth_cfg.format = to_format(format);
          synth_cfg.truth_path = truth;
          synth_cfg.spec.certify = !no_certify;
          redunda::cli::run_synth(synth_cfg, std::cout);
        } else if (validate->parsed()) {
          redunda::cli::ValidateConfig cfg;
          cfg.input_path = input;
          cfg.input_format = to_format(format);
          cfg.dimension = dimension;
          cfg.manifest_path = manifest;
          redunda::cli::run_validate(cfg, std::cout);
        }
      },
      std::cerr);
}
