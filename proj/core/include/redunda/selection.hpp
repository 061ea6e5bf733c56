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
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "redunda/clustering.hpp"
#include "redunda/dataset.hpp"

namespace redunda {

enum class SelectionMethod { cluster_medoid, uniform_random };

std::string_view to_string(SelectionMethod m) noexcept;
std::optional<SelectionMethod> parse_method(std::string_view name);

struct SubsetManifest {
  SelectionMethod method = SelectionMethod::cluster_medoid;
  double retention_fraction = 1.0;
  std::optional<std::uint64_t> seed;
  std::string source_digest;
  std::map<ClassId, std::vector<SampleId>> retained;  // ascending ids

  std::size_t total_retained() const noexcept;

  friend bool operator==(const SubsetManifest&, const SubsetManifest&) = default;
};

/// Number of samples kept from a class of `class_size`:
/// clamp(round_half_up(fraction * class_size), 1, class_size).
/// Throws invalid_argument unless 0 < fraction <= 1 and class_size >= 1.
std::size_t per_class_k(std::size_t class_size, double fraction);

/// Member closest (cosine) to the arithmetic mean of the members; ties go to
/// the smallest sample id. Throws degenerate_centroid when the mean is a zero
/// vector.
SampleId select_representative(std::span<const Point> cluster);

struct ClassSelection {
  ClusteringResult clustering;
  // representatives[i] belongs to clustering.partition.clusters[i]
  std::vector<SampleId> representatives;
};

struct ClusterSubset {
  SubsetManifest manifest;
  std::map<ClassId, ClassSelection> classes;
};

struct SelectionOptions {
  std::size_t jobs = 1;
  std::size_t memory_cap_bytes = kDefaultMemoryCapBytes;
};

/// Clusters every class down to per_class_k groups and keeps one
/// representative per group. Class jobs run up to `jobs` wide; the result is
/// independent of scheduling. Errors are rethrown with the class id prefixed.
ClusterSubset build_cluster_subset(const EmbeddingDataset& ds, double fraction,
                                   const SelectionOptions& options = {});

/// Representatives for an existing partition of one class.
std::vector<SampleId> select_representatives(const EmbeddingDataset& ds, const Partition& p);

/// Stratified uniform sampling without replacement. Each class draws from its
/// own PhiloxStream substream keyed by (seed, class_id).
SubsetManifest build_random_subset(const EmbeddingDataset& ds, double fraction, std::uint64_t seed);

/// Positions (0-based, ascending) of a k-subset of [0, n) drawn uniformly.
std::vector<std::size_t> sample_positions(std::size_t n, std::size_t k, std::uint64_t seed,
                                          ClassId class_id);

/// Throws manifest_mismatch when the manifest does not fit the dataset: an
/// unknown or misfiled sample id, duplicates, unsorted lists, or counts that
/// disagree with per_class_k.
void validate_manifest(const SubsetManifest& m, const EmbeddingDataset& ds);

// Manifest files.
std::string manifest_to_json(const SubsetManifest& m);
SubsetManifest manifest_from_json(std::string_view text);
// `class_id sample_id` per line.
std::string manifest_to_text(const SubsetManifest& m);

}  // namespace redunda
