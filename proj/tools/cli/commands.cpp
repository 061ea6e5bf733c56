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

#include "commands.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <iterator>
#include <map>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "redunda/digest.hpp"
#include "redunda/error.hpp"

namespace redunda::cli {

namespace fs = std::filesystem;

namespace {

// Collects output files in a hidden staging directory and moves them into
// place on commit(). Without a commit every staged file is removed, along with
// the output directory when this run created it.
class OutputStage {
 public:
  explicit OutputStage(fs::path dir) : dir_(std::move(dir)) {
    if (dir_.empty()) throw Error(ErrorCode::invalid_argument, "output directory not set");
    std::error_code ec;
    created_dir_ = !fs::exists(dir_, ec);
    fs::create_directories(dir_, ec);
    if (ec) throw Error(ErrorCode::io_error, "cannot create " + dir_.string());
    staging_ = dir_ / ".redunda-staging";
    fs::remove_all(staging_, ec);
    fs::create_directories(staging_, ec);
    if (ec) throw Error(ErrorCode::io_error, "cannot create " + staging_.string());
  }

  OutputStage(const OutputStage&) = delete;
  OutputStage& operator=(const OutputStage&) = delete;

  ~OutputStage() {
    std::error_code ec;
    fs::remove_all(staging_, ec);
    if (!committed_ && created_dir_) fs::remove_all(dir_, ec);
  }

  void add(const fs::path& relative, std::string_view bytes) {
    const auto target = staging_ / relative;
    std::error_code ec;
    fs::create_directories(target.parent_path(), ec);
    write_file(target, bytes);
    files_.push_back(relative);
  }

  void commit() {
    std::vector<fs::path> moved;
    for (const auto& rel : files_) {
      std::error_code ec;
      const auto target = dir_ / rel;
      fs::create_directories(target.parent_path(), ec);
      fs::rename(staging_ / rel, target, ec);
      if (ec) {
        for (const auto& m : moved) fs::remove(dir_ / m, ec);
        throw Error(ErrorCode::io_error, "cannot move " + rel.string() + " into " + dir_.string());
      }
      moved.push_back(rel);
    }
    committed_ = true;
  }

 private:
  fs::path dir_;
  fs::path staging_;
  std::vector<fs::path> files_;
  bool created_dir_ = false;
  bool committed_ = false;
};

DatasetFormat resolve_format(const fs::path& path, std::optional<DatasetFormat> format) {
  return format ? *format : format_from_path(path);
}

std::string iso8601_now() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm utc{};
  gmtime_r(&now, &utc);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &utc);
  return buf;
}

std::string run_metadata(std::string_view command, const std::string& command_line,
                         const EmbeddingDataset& ds) {
  nlohmann::ordered_json j;
  j["command"] = command;
  j["command_line"] = command_line;
  j["timestamp"] = iso8601_now();
  j["source_digest"] = ds.source_digest();
  j["records"] = ds.size();
  j["dimension"] = ds.dimension();
  j["classes"] = ds.class_index().size();
  return j.dump(2) + "\n";
}

// Mass conservation for every histogram and one report line per class.
void check_report(const AnalysisReport& report, const std::map<ClassId, ClassAnalysisInput>& inputs) {
  for (const auto& [c, hist] : report.histograms) {
    const auto& p = *inputs.at(c).partition;
    std::size_t mass = 0, groups = 0;
    for (const auto& [size, count] : hist.counts) {
      mass += size * count;
      groups += count;
    }
    if (mass != p.n_points() || groups != p.k()) {
      throw Error(ErrorCode::out_of_range, "histogram of class " + std::to_string(c) + " does not conserve mass");
    }
  }
}

void stage_reports(OutputStage& stage, const AnalysisReport& report) {
  stage.add("report.json", report_to_json(report));
  stage.add("report.txt", report_to_text(report));
  if (report.flags.histogram) stage.add("histogram.csv", histogram_to_csv(report));
}

bool any_report(const ReportFlags& f) { return f.histogram || f.dissimilarity || f.nearest_excluded; }

}  // namespace

void validate(const RunConfig& config) {
  if (!(config.fraction > 0.0 && config.fraction <= 1.0)) {
    throw Error(ErrorCode::invalid_argument, "--fraction must lie in (0, 1]");
  }
  if (config.jobs < 1) throw Error(ErrorCode::invalid_argument, "--jobs must be >= 1");
  const bool random = config.method == SelectionMethod::uniform_random;
  if (random && !config.seed) throw Error(ErrorCode::invalid_argument, "uniform-random needs --seed");
  if (!random && config.seed) throw Error(ErrorCode::invalid_argument, "--seed only applies to uniform-random");
}

std::size_t effective_memory_cap(std::size_t fallback) {
  const char* env = std::getenv(kMemoryCapEnv);
  if (env == nullptr || *env == '\0') return fallback;
  std::size_t value = 0;
  const std::string_view text(env);
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw Error(ErrorCode::invalid_argument, std::string(kMemoryCapEnv) + " is not a byte count: " + env);
  }
  return value;
}

void run_select(const RunConfig& config, std::ostream& out) {
  validate(config);
  const auto ds = load_dataset(config.input_path, resolve_format(config.input_path, config.input_format));
  OutputStage stage(config.output_dir);

  std::size_t total_n = 0, total_k = 0;
  if (config.method == SelectionMethod::uniform_random) {
    const auto manifest = build_random_subset(ds, config.fraction, *config.seed);
    validate_manifest(manifest, ds);
    stage.add("manifest.json", manifest_to_json(manifest));
    stage.add("manifest.txt", manifest_to_text(manifest));
    for (const auto& [c, ids] : ds.class_index()) {
      const std::size_t k = manifest.retained.at(c).size();
      out << "class=" << c << " n=" << ids.size() << " k=" << k << " largest=-\n";
      total_n += ids.size();
      total_k += k;
    }
  } else {
    SelectionOptions options;
    options.jobs = config.jobs;
    options.memory_cap_bytes = effective_memory_cap(config.memory_cap_bytes);
    const auto subset = build_cluster_subset(ds, config.fraction, options);
    validate_manifest(subset.manifest, ds);
    stage.add("manifest.json", manifest_to_json(subset.manifest));
    stage.add("manifest.txt", manifest_to_text(subset.manifest));

    std::map<ClassId, ClassAnalysisInput> inputs;
    for (const auto& [c, sel] : subset.classes) {
      inputs[c] = {&sel.clustering.partition, sel.representatives};
      if (config.dump_dendrograms) {
        stage.add(fs::path("dendrograms") / ("class_" + std::to_string(c) + ".txt"),
                  format_dendrogram(sel.clustering.dendrogram));
      }
    }
    if (any_report(config.reports)) {
      const auto report = analyze(ds, inputs, config.reports, config.overall_mode, config.jobs);
      check_report(report, inputs);
      stage_reports(stage, report);
    }
    for (const auto& [c, sel] : subset.classes) {
      const auto& p = sel.clustering.partition;
      std::size_t largest = 0;
      for (const auto& cluster : p.clusters) largest = std::max(largest, cluster.size());
      out << "class=" << c << " n=" << p.n_points() << " k=" << p.k() << " largest=" << largest << "\n";
      total_n += p.n_points();
      total_k += p.k();
    }
  }
  stage.add("run.json", run_metadata(config.method == SelectionMethod::uniform_random ? "baseline" : "select",
                                     config.command_line, ds));
  stage.commit();
  out << "total classes=" << ds.class_index().size() << " n=" << total_n << " k=" << total_k << "\n";
}

void run_stats(const StatsConfig& config, std::ostream& out) {
  const auto ds = load_dataset(config.input_path, resolve_format(config.input_path, config.input_format));
  const auto manifest = manifest_from_json(read_file(config.manifest_path));
  if (manifest.method != SelectionMethod::cluster_medoid) {
    throw Error(ErrorCode::manifest_mismatch, "stats needs a cluster-medoid manifest");
  }
  if (manifest.source_digest != ds.source_digest()) {
    throw Error(ErrorCode::manifest_mismatch, "manifest digest " + manifest.source_digest +
                                                  " does not match dataset digest " + ds.source_digest());
  }
  validate_manifest(manifest, ds);

  const auto class_ids = ds.classes();
  std::map<ClassId, Partition> partitions;
  std::map<ClassId, std::vector<SampleId>> reps;
  ClusteringOptions copts;
  copts.memory_cap_bytes = effective_memory_cap(config.memory_cap_bytes);
  for (ClassId c : class_ids) {
    const auto& kept = manifest.retained.at(c);
    copts.class_id = c;
    auto result = agglomerate_fast(class_view(ds, c), kept.size(), copts);
    auto& class_reps = reps[c];
    for (const auto& cluster : result.partition.clusters) {
      std::vector<SampleId> hits;
      std::set_intersection(cluster.begin(), cluster.end(), kept.begin(), kept.end(), std::back_inserter(hits));
      if (hits.size() != 1) {
        throw Error(ErrorCode::manifest_mismatch, "class " + std::to_string(c) + ": a cluster holds " +
                                                      std::to_string(hits.size()) + " retained samples");
      }
      class_reps.push_back(hits.front());
    }
    partitions.emplace(c, std::move(result.partition));
  }

  std::map<ClassId, ClassAnalysisInput> inputs;
  for (const auto& [c, p] : partitions) inputs[c] = {&p, reps.at(c)};
  ReportFlags flags = config.reports;
  if (!any_report(flags)) flags = ReportFlags{};
  const auto report = analyze(ds, inputs, flags, config.overall_mode, config.jobs);
  check_report(report, inputs);

  OutputStage stage(config.output_dir);
  stage_reports(stage, report);
  stage.add("run.json", run_metadata("stats", config.command_line, ds));
  stage.commit();
  if (report.dissimilarity && report.dissimilarity->overall) {
    out << "overall_dissimilarity=" << *report.dissimilarity->overall << "\n";
  }
  out << "total classes=" << class_ids.size() << " n=" << ds.size() << " k=" << manifest.total_retained() << "\n";
}

void run_synth(const SynthConfig& config, std::ostream& out) {
  if (config.output_path.empty()) throw Error(ErrorCode::invalid_argument, "--out not set");
  const auto planted = generate(config.spec);
  write_dataset(planted.dataset, config.output_path, resolve_format(config.output_path, config.format));
  if (!config.truth_path.empty()) {
    try {
      write_file(config.truth_path, ground_truth_to_json(planted.ground_truth));
    } catch (...) {
      std::error_code ec;
      fs::remove(config.output_path, ec);
      throw;
    }
  }
  const auto& cert = planted.certificate;
  out << "records=" << planted.dataset.size() << " classes=" << planted.dataset.class_index().size()
      << " dim=" << planted.dataset.dimension();
  if (cert.measured) {
    out << " max_within=" << cert.max_within << " min_between=" << cert.min_between;
  }
  out << "\n";
}

void run_validate(const ValidateConfig& config, std::ostream& out) {
  LoadOptions options;
  options.dimension = config.dimension;
  const auto ds =
      load_dataset(config.input_path, resolve_format(config.input_path, config.input_format), options);
  out << "dataset ok: records=" << ds.size() << " dim=" << ds.dimension()
      << " classes=" << ds.class_index().size() << " digest=" << ds.source_digest() << "\n";
  if (!config.manifest_path.empty()) {
    const auto manifest = manifest_from_json(read_file(config.manifest_path));
    if (manifest.source_digest != ds.source_digest()) {
      throw Error(ErrorCode::manifest_mismatch, "manifest digest does not match dataset");
    }
    validate_manifest(manifest, ds);
    out << "manifest ok: method=" << to_string(manifest.method) << " retained=" << manifest.total_retained()
        << "\n";
  }
}

int guarded(const std::function<void()>& body, std::ostream& err) {
  auto one_line = [](std::string s) {
    std::replace(s.begin(), s.end(), '\n', ' ');
    return s;
  };
  try {
    body();
    return 0;
  } catch (const Error& e) {
    err << to_string(e.code()) << ": " << one_line(e.what()) << "\n";
  } catch (const std::exception& e) {
    err << "internal_error: " << one_line(e.what()) << "\n";
  }
  return 1;
}

}  // namespace redunda::cli
