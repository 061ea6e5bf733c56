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
#include <span>
#include <string>
#include <vector>

#include "redunda/dataset.hpp"
#include "redunda/metric.hpp"

namespace redunda {

inline constexpr std::size_t kDefaultMemoryCapBytes = std::size_t{8} << 30;

// Cluster references: 0..n-1 are the input points in order, n + s is the
// cluster created by step s.
using ClusterRef = std::size_t;

struct MergeStep {
  ClusterRef left = 0;   // the cluster whose smallest input position is lower
  ClusterRef right = 0;
  Dissimilarity height = 0.0;
  ClusterRef new_id = 0;

  friend bool operator==(const MergeStep&, const MergeStep&) = default;
};

/// Merge history of one class. Steps are in canonical order: ascending by
/// (height, lower label, higher label), where a cluster's label is the
/// smallest input position among its members.
struct Dendrogram {
  ClassId class_id = 0;
  std::size_t n_points = 0;
  std::vector<SampleId> sample_ids;  // leaf ref i is sample_ids[i]
  std::vector<MergeStep> steps;

  friend bool operator==(const Dendrogram&, const Dendrogram&) = default;
};

/// Disjoint cover of a class's samples. Canonical form: members ascending,
/// clusters ordered by their smallest member.
struct Partition {
  ClassId class_id = 0;
  std::vector<std::vector<SampleId>> clusters;

  std::size_t k() const noexcept { return clusters.size(); }
  std::size_t n_points() const noexcept;

  friend bool operator==(const Partition&, const Partition&) = default;
};

struct ClusteringResult {
  Dendrogram dendrogram;
  Partition partition;
};

struct ClusteringOptions {
  ClassId class_id = 0;
  std::size_t memory_cap_bytes = kDefaultMemoryCapBytes;
};

/// Reference agglomeration: exhaustive closest-pair search, cluster
/// dissimilarities recomputed from member pairs after every merge. O(n^3).
ClusteringResult agglomerate_naive(std::span<const Point> points, std::size_t k,
                                   ClassId class_id = 0);

/// Nearest-neighbor-chain agglomeration over a condensed distance matrix with
/// the complete-linkage update D(i+j, m) = max(D(i, m), D(j, m)). Produces the
/// same dendrogram and partition as agglomerate_naive. O(n^2) after the
/// O(n^2 dim) distance matrix; throws memory_cap when the matrix would exceed
/// options.memory_cap_bytes.
ClusteringResult agglomerate_fast(std::span<const Point> points, std::size_t k,
                                  const ClusteringOptions& options = {});

/// Complete dendrogram (n - 1 steps) via the nearest-neighbor chain.
Dendrogram full_dendrogram(std::span<const Point> points, const ClusteringOptions& options = {});

/// Replays merges in non-decreasing height order (stable by step index) until
/// k clusters remain. Throws out_of_range when k is not reachable.
Partition cut_dendrogram(const Dendrogram& d, std::size_t k);

/// Throws format_error unless every ref is created before use and consumed at
/// most once.
void validate_dendrogram(const Dendrogram& d);

/// `left right height new_id` per line, height with 17 significant digits.
std::string format_dendrogram(const Dendrogram& d);

/// Sorts members and clusters into canonical order.
void canonicalize(Partition& p);

}  // namespace redunda
