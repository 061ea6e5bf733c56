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

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <ostream>
#include <string>

#include "redunda/analysis.hpp"
#include "redunda/clustering.hpp"
#include "redunda/dataset.hpp"
#include "redunda/selection.hpp"
#include "redunda/synth.hpp"

namespace redunda::cli {

inline constexpr const char* kMemoryCapEnv = "REDUNDA_MEMORY_CAP";

struct RunConfig {
  std::filesystem::path input_path;
  std::optional<DatasetFormat> input_format;  // from the extension when unset
  double fraction = 1.0;
  SelectionMethod method = SelectionMethod::cluster_medoid;
  std::optional<std::uint64_t> seed;
  std::filesystem::path output_dir;
  std::size_t jobs = 1;
  std::size_t memory_cap_bytes = kDefaultMemoryCapBytes;
  ReportFlags reports;
  OverallMode overall_mode = OverallMode::cluster_weighted;
  bool dump_dendrograms = false;
  std::string command_line;  // recorded in run.json only
};

/// Throws invalid_argument unless the seed is given exactly for
/// uniform-random, the fraction is in (0, 1] and jobs >= 1.
void validate(const RunConfig& config);

/// REDUNDA_MEMORY_CAP, when set, replaces `fallback`.
std::size_t effective_memory_cap(std::size_t fallback);

/// select / baseline: writes manifest.json, manifest.txt and, for
/// cluster-medoid, the requested reports (report.json, report.txt,
/// histogram.csv) plus dendrograms/class_<id>.txt when asked. run.json holds
/// the timestamped metadata. Nothing is left behind on failure.
void run_select(const RunConfig& config, std::ostream& out);

struct StatsConfig {
  std::filesystem::path input_path;
  std::optional<DatasetFormat> input_format;
  std::filesystem::path manifest_path;
  std::filesystem::path output_dir;
  std::size_t jobs = 1;
  std::size_t memory_cap_bytes = kDefaultMemoryCapBytes;
  ReportFlags reports;
  OverallMode overall_mode = OverallMode::cluster_weighted;
  std::string command_line;
};

/// Recomputes the partitions behind a cluster-medoid manifest and writes the
/// reports for them.
void run_stats(const StatsConfig& config, std::ostream& out);

struct SynthConfig {
  PlantedSpec spec;
  std::filesystem::path output_path;
  std::optional<DatasetFormat> format;
  std::filesystem::path truth_path;  // ground truth JSON; skipped when empty
};

void run_synth(const SynthConfig& config, std::ostream& out);

struct ValidateConfig {
  std::filesystem::path input_path;
  std::optional<DatasetFormat> input_format;
  std::optional<std::size_t> dimension;
  std::filesystem::path manifest_path;  // optional
};

void run_validate(const ValidateConfig& config, std::ostream& out);

/// Runs `body`; on failure prints one `error_code: message` line to `err`
/// and returns 1, else returns 0.
int guarded(const std::function<void()>& body, std::ostream& err);

}  // namespace redunda::cli
