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
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "redunda/clustering.hpp"
#include "redunda/dataset.hpp"
#include "redunda/metric.hpp"

namespace redunda {

struct SizeHistogram {
  ClassId class_id = 0;
  std::map<std::size_t, std::size_t> counts;  // cluster size -> number of clusters

  friend bool operator==(const SizeHistogram&, const SizeHistogram&) = default;
};

SizeHistogram size_histogram(const Partition& p);

// Contribution of one class to the average-dissimilarity statistic.
struct ClassDissimilarity {
  double mean = 0.0;               // mean of the cluster means
  double sum_of_cluster_means = 0.0;
  std::size_t groups_counted = 0;  // clusters of size >= 2
};

/// For every cluster of size >= 2: the mean dissimilarity of its
/// non-retained members to the representative. Empty when the class has no
/// such cluster. `representatives[i]` must be a member of `p.clusters[i]`.
std::optional<ClassDissimilarity> avg_dissimilarity(const Partition& p,
                                                    std::span<const SampleId> representatives,
                                                    const EmbeddingDataset& ds);

enum class OverallMode { cluster_weighted, class_mean };

struct DissimilarityReport {
  OverallMode mode = OverallMode::cluster_weighted;
  std::map<ClassId, double> per_class;  // classes without qualifying clusters are absent
  std::map<ClassId, std::size_t> groups_counted;
  std::optional<double> overall;
};

DissimilarityReport summarize_dissimilarity(
    const std::map<ClassId, std::optional<ClassDissimilarity>>& per_class, OverallMode mode);

struct NearestExcludedPair {
  SampleId retained_id = 0;
  SampleId neighbor_id = 0;
  Dissimilarity dissimilarity = 0.0;
  bool same_class = true;

  friend bool operator==(const NearestExcludedPair&, const NearestExcludedPair&) = default;
};

/// For each representative of a cluster of size >= 2, the closest same-class
/// sample outside its cluster (ties to the smallest sample id). Empty for a
/// single-cluster class.
std::vector<NearestExcludedPair> nearest_excluded(const Partition& p,
                                                  std::span<const SampleId> representatives,
                                                  std::span<const Point> class_points);

struct ReportFlags {
  bool histogram = true;
  bool dissimilarity = true;
  bool nearest_excluded = true;
};

struct ClassAnalysisInput {
  const Partition* partition = nullptr;
  std::span<const SampleId> representatives;
};

struct AnalysisReport {
  ReportFlags flags;
  std::map<ClassId, SizeHistogram> histograms;
  std::optional<DissimilarityReport> dissimilarity;
  std::map<ClassId, std::vector<NearestExcludedPair>> nearest;
};

AnalysisReport analyze(const EmbeddingDataset& ds, const std::map<ClassId, ClassAnalysisInput>& classes,
                       const ReportFlags& flags, OverallMode mode = OverallMode::cluster_weighted,
                       std::size_t jobs = 1);

std::string report_to_json(const AnalysisReport& r);
std::string report_to_text(const AnalysisReport& r);
// `class_id,size,count` with a header row.
std::string histogram_to_csv(const AnalysisReport& r);

}  // namespace redunda
