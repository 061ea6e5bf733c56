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
#include <string>
#include <vector>

#include "redunda/dataset.hpp"

namespace redunda {

/// Recipe for a dataset with planted redundant groups.
///
/// Each group has a random unit anchor direction; members sit at cosine
/// dissimilarity at most `spread / 2` from it (spread 0 makes exact
/// duplicates). Anchors of one class are accepted only when their angular
/// separation certifies that every cross-group pair ends up above
/// `margin - 2 * spread`, while every within-group pair stays below
/// `2 * spread`. Requires margin > 4 * spread.
struct PlantedSpec {
  std::size_t classes = 1;
  std::size_t groups_per_class = 1;
  // Either one size per group, or empty to draw each size uniformly from
  // [size_min, size_max].
  std::vector<std::size_t> group_sizes;
  std::size_t size_min = 1;
  std::size_t size_max = 1;
  std::size_t dim = 8;
  double spread = 1e-3;  // within-group spread
  double margin = 0.5;   // minimum anchor-to-anchor dissimilarity
  std::uint64_t seed = 0;
  std::size_t max_anchor_attempts = 10000;
  // Measure the realized bounds over all pairs (O(n^2) per class).
  bool certify = true;
};

/// Realized bounds over all classes, measured on the stored (float32) data.
struct SeparationCertificate {
  double max_within = 0.0;    // largest within-group pairwise dissimilarity
  double min_between = 2.0;   // smallest cross-group dissimilarity, same class
  double min_anchor_margin = 2.0;
  bool measured = false;
};

using GroundTruth = std::map<ClassId, std::vector<std::vector<SampleId>>>;

struct PlantedDataset {
  EmbeddingDataset dataset;
  GroundTruth ground_truth;  // groups with ascending ids, ordered by first id
  SeparationCertificate certificate;
};

/// Deterministic in spec.seed. Throws invalid_argument for an inconsistent
/// spec and margin_unsatisfiable when anchors cannot be placed.
PlantedDataset generate(const PlantedSpec& spec);

/// {"class_id": [[ids], ...], ...}
std::string ground_truth_to_json(const GroundTruth& truth);

}  // namespace redunda
