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

#include "redunda/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <nlohmann/json.hpp>

#include "redunda/error.hpp"
#include "redunda/metric.hpp"
#include "redunda/random.hpp"

namespace redunda {

namespace {

// Float32 rounding moves a unit vector by ~1e-7 rad.
constexpr double kAngleSlack = 1e-5;

std::vector<double> random_unit(PhiloxStream& rng, std::size_t dim) {
  std::vector<double> v(dim);
  double sq = 0.0;
  do {
    for (double& x : v) x = rng.normal();
    sq = squared_norm(v);
  } while (sq < 1e-12);
  const double inv = 1.0 / std::sqrt(sq);
  for (double& x : v) x *= inv;
  return v;
}

double angle_between_units(std::span<const double> a, std::span<const double> b) {
  return std::acos(std::clamp(dot(a, b), -1.0, 1.0));
}

struct ClassDraft {
  std::vector<std::vector<double>> anchors;
  std::vector<std::vector<std::vector<float>>> members;  // per group
};

ClassDraft draft_class(const PlantedSpec& spec, PhiloxStream& rng, ClassId c) {
  const std::size_t groups = spec.groups_per_class;
  const double theta_max = std::acos(1.0 - spec.spread / 2.0);
  const double min_angle = std::max(std::acos(1.0 - spec.margin),
                                    std::acos(1.0 - (spec.margin - 2.0 * spec.spread)) + 2.0 * theta_max) +
                           kAngleSlack;

  ClassDraft draft;
  draft.anchors.reserve(groups);
  for (std::size_t g = 0; g < groups; ++g) {
    bool placed = false;
    for (std::size_t attempt = 0; attempt < spec.max_anchor_attempts && !placed; ++attempt) {
      auto candidate = random_unit(rng, spec.dim);
      placed = std::all_of(draft.anchors.begin(), draft.anchors.end(), [&](const auto& a) {
        return angle_between_units(candidate, a) >= min_angle;
      });
      if (placed) draft.anchors.push_back(std::move(candidate));
    }
    if (!placed) {
      throw Error(ErrorCode::margin_unsatisfiable,
                  "class " + std::to_string(c) + ": could not place anchor " + std::to_string(g + 1) + " of " +
                      std::to_string(groups) + " with margin " + std::to_string(spec.margin) + " in dimension " +
                      std::to_string(spec.dim) + " after " + std::to_string(spec.max_anchor_attempts) +
                      " attempts");
    }
  }

  draft.members.resize(groups);
  for (std::size_t g = 0; g < groups; ++g) {
    const std::size_t size = spec.group_sizes.empty()
                                 ? spec.size_min + rng.uniform_below(spec.size_max - spec.size_min + 1)
                                 : spec.group_sizes[g];
    const auto& anchor = draft.anchors[g];
    const double scale = 0.5 + 1.5 * rng.next_double();
    for (std::size_t m = 0; m < size; ++m) {
      // Rotate the anchor by theta inside the plane spanned with a random
      // tangent direction: dissimilarity to the anchor is 1 - cos(theta).
      // 0.9 keeps float32 rounding from pushing pairs onto the 2 * spread bound.
      const double target = 0.9 * spec.spread / 2.0 * rng.next_double();
      const double theta = std::acos(1.0 - target);
      auto tangent = random_unit(rng, spec.dim);
      const double along = dot(tangent, anchor);
      for (std::size_t j = 0; j < spec.dim; ++j) tangent[j] -= along * anchor[j];
      const double tn = std::sqrt(squared_norm(tangent));
      const double s = tn > 1e-9 ? std::sin(theta) / tn : 0.0;
      std::vector<float> x(spec.dim);
      for (std::size_t j = 0; j < spec.dim; ++j) {
        x[j] = static_cast<float>(scale * (std::cos(theta) * anchor[j] + s * tangent[j]));
      }
      draft.members[g].push_back(std::move(x));
    }
  }
  return draft;
}

}  // namespace

PlantedDataset generate(const PlantedSpec& spec) {
  auto bad = [](const std::string& msg) { throw Error(ErrorCode::invalid_argument, msg); };
  if (spec.classes < 1) bad("classes must be >= 1");
  if (spec.groups_per_class < 1) bad("groups_per_class must be >= 1");
  if (spec.dim < 2) bad("dim must be >= 2");
  if (!(spec.spread >= 0.0)) bad("spread must be >= 0");
  if (!(spec.margin > 4.0 * spec.spread)) bad("margin must exceed 4 * spread");
  if (spec.margin > 2.0) bad("margin cannot exceed 2");
  if (!spec.group_sizes.empty()) {
    if (spec.group_sizes.size() != spec.groups_per_class) bad("group_sizes needs one entry per group");
    if (std::find(spec.group_sizes.begin(), spec.group_sizes.end(), 0u) != spec.group_sizes.end()) {
      bad("group sizes must be >= 1");
    }
  } else if (spec.size_min < 1 || spec.size_max < spec.size_min) {
    bad("size range must satisfy 1 <= min <= max");
  }

  std::vector<EmbeddingRecord> records;
  GroundTruth truth;
  SeparationCertificate cert;
  cert.measured = spec.certify;

  for (std::size_t ci = 0; ci < spec.classes; ++ci) {
    const auto c = static_cast<ClassId>(ci);
    PhiloxStream rng(spec.seed, c, StreamPurpose::synthesis);
    ClassDraft draft = draft_class(spec, rng, c);

    struct Item {
      std::size_t group;
      std::vector<float>* vec;
    };
    std::vector<Item> items;
    for (std::size_t g = 0; g < draft.members.size(); ++g) {
      for (auto& v : draft.members[g]) items.push_back({g, &v});
    }
    // Interleave groups so file order carries no structure.
    for (std::size_t i = items.size(); i > 1; --i) {
      std::swap(items[i - 1], items[rng.uniform_below(i)]);
    }

    auto& groups = truth[c];
    groups.resize(draft.members.size());
    const std::size_t first_row = records.size();
    for (const auto& item : items) {
      EmbeddingRecord r;
      r.sample_id = records.size();
      r.class_id = c;
      r.vector.assign(item.vec->begin(), item.vec->end());
      groups[item.group].push_back(r.sample_id);
      records.push_back(std::move(r));
    }

    if (spec.certify) {
      for (std::size_t a = 0; a < draft.anchors.size(); ++a) {
        for (std::size_t b = a + 1; b < draft.anchors.size(); ++b) {
          cert.min_anchor_margin = std::min(cert.min_anchor_margin, 1.0 - dot(draft.anchors[a], draft.anchors[b]));
        }
      }
      std::vector<double> sq(items.size());
      for (std::size_t i = 0; i < items.size(); ++i) sq[i] = squared_norm(records[first_row + i].vector);
      for (std::size_t i = 0; i < items.size(); ++i) {
        for (std::size_t j = i + 1; j < items.size(); ++j) {
          const double d = cosine_dissimilarity_cached(records[first_row + i].vector, sq[i],
                                                       records[first_row + j].vector, sq[j]);
          if (items[i].group == items[j].group) {
            cert.max_within = std::max(cert.max_within, d);
          } else {
            cert.min_between = std::min(cert.min_between, d);
          }
        }
      }
    }
  }

  if (spec.certify) {
    const bool within_ok = spec.spread == 0.0 ? cert.max_within == 0.0 : cert.max_within < 2.0 * spec.spread;
    if (!within_ok || !(cert.min_between > spec.margin - 2.0 * spec.spread)) {
      throw Error(ErrorCode::margin_unsatisfiable,
                  "realized separation violated: max within " + std::to_string(cert.max_within) +
                      ", min between " + std::to_string(cert.min_between));
    }
  }

  for (auto& [c, groups] : truth) {
    for (auto& g : groups) std::sort(g.begin(), g.end());
    std::sort(groups.begin(), groups.end(), [](const auto& a, const auto& b) { return a.front() < b.front(); });
  }
  return PlantedDataset{EmbeddingDataset(spec.dim, std::move(records)), std::move(truth), cert};
}

std::string ground_truth_to_json(const GroundTruth& truth) {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (const auto& [c, groups] : truth) j[std::to_string(c)] = groups;
  return j.dump(2) + "\n";
}

}  // namespace redunda
