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

#include "redunda/selection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <nlohmann/json.hpp>

#include "parallel.hpp"
#include "redunda/error.hpp"
#include "redunda/metric.hpp"
#include "redunda/random.hpp"

namespace redunda {

std::string_view to_string(SelectionMethod m) noexcept {
  return m == SelectionMethod::cluster_medoid ? "cluster-medoid" : "uniform-random";
}

std::optional<SelectionMethod> parse_method(std::string_view name) {
  if (name == "cluster-medoid") return SelectionMethod::cluster_medoid;
  if (name == "uniform-random") return SelectionMethod::uniform_random;
  return std::nullopt;
}

std::size_t SubsetManifest::total_retained() const noexcept {
  std::size_t total = 0;
  for (const auto& [c, ids] : retained) total += ids.size();
  return total;
}

std::size_t per_class_k(std::size_t class_size, double fraction) {
  if (!(fraction > 0.0 && fraction <= 1.0)) {
    throw Error(ErrorCode::invalid_argument, "fraction must lie in (0, 1], got " + std::to_string(fraction));
  }
  if (class_size == 0) throw Error(ErrorCode::invalid_argument, "class size must be positive");
  // The 1e-9 slack keeps decimal halves (0.15 * 10) from rounding down after
  // binary representation error.
  const double scaled = fraction * static_cast<double>(class_size);
  const auto k = static_cast<std::size_t>(std::floor(scaled + 0.5 + 1e-9));
  return std::clamp<std::size_t>(k, 1, class_size);
}

SampleId select_representative(std::span<const Point> cluster) {
  if (cluster.empty()) throw Error(ErrorCode::invalid_argument, "representative of an empty cluster");
  const std::size_t dim = cluster.front().vector.size();
  std::vector<double> centroid(dim, 0.0);
  for (const auto& p : cluster) {
    if (p.vector.size() != dim) {
      throw Error(ErrorCode::dimension_mismatch, "cluster members differ in dimension");
    }
    for (std::size_t j = 0; j < dim; ++j) centroid[j] += p.vector[j];
  }
  for (double& v : centroid) v /= static_cast<double>(cluster.size());

  const double centroid_sq = squared_norm(centroid);
  if (centroid_sq < kMinSquaredNorm) {
    SampleId smallest = cluster.front().id;
    for (const auto& p : cluster) smallest = std::min(smallest, p.id);
    throw Error(ErrorCode::degenerate_centroid,
                "cluster containing sample " + std::to_string(smallest) + " of " +
                    std::to_string(cluster.size()) + " members has a zero centroid");
  }

  SampleId best_id = 0;
  double best = std::numeric_limits<double>::infinity();
  for (const auto& p : cluster) {
    const double d = cosine_dissimilarity_cached(p.vector, squared_norm(p.vector), centroid, centroid_sq);
    if (d < best || (d == best && p.id < best_id)) {
      best = d;
      best_id = p.id;
    }
  }
  return best_id;
}

std::vector<SampleId> select_representatives(const EmbeddingDataset& ds, const Partition& p) {
  std::vector<SampleId> reps;
  reps.reserve(p.clusters.size());
  std::vector<Point> members;
  for (const auto& cluster : p.clusters) {
    members.clear();
    for (SampleId id : cluster) {
      const auto row = ds.row_of(id);
      if (!row) throw Error(ErrorCode::manifest_mismatch, "sample " + std::to_string(id) + " not in dataset");
      members.push_back({id, ds.vector(*row)});
    }
    reps.push_back(select_representative(members));
  }
  return reps;
}

namespace {

Error tag_class(ClassId c, const Error& e) {
  return Error(e.code(), "class " + std::to_string(c) + ": " + e.what());
}

}  // namespace

ClusterSubset build_cluster_subset(const EmbeddingDataset& ds, double fraction,
                                   const SelectionOptions& options) {
  per_class_k(1, fraction);  // validates the fraction before any work
  const auto class_ids = ds.classes();
  std::vector<ClassSelection> results(class_ids.size());

  detail::run_jobs(class_ids.size(), options.jobs, [&](std::size_t i) {
    const ClassId c = class_ids[i];
    try {
      const auto points = class_view(ds, c);
      const std::size_t k = per_class_k(points.size(), fraction);
      ClusteringOptions copts;
      copts.class_id = c;
      copts.memory_cap_bytes = options.memory_cap_bytes;
      auto& out = results[i];
      out.clustering = agglomerate_fast(points, k, copts);
      out.representatives = select_representatives(ds, out.clustering.partition);
    } catch (const Error& e) {
      throw tag_class(c, e);
    }
  });

  ClusterSubset subset;
  subset.manifest.method = SelectionMethod::cluster_medoid;
  subset.manifest.retention_fraction = fraction;
  subset.manifest.source_digest = ds.source_digest();
  for (std::size_t i = 0; i < class_ids.size(); ++i) {
    auto ids = results[i].representatives;
    std::sort(ids.begin(), ids.end());
    subset.manifest.retained.emplace(class_ids[i], std::move(ids));
    subset.classes.emplace(class_ids[i], std::move(results[i]));
  }
  return subset;
}

std::vector<std::size_t> sample_positions(std::size_t n, std::size_t k, std::uint64_t seed,
                                          ClassId class_id) {
  if (k > n) throw Error(ErrorCode::out_of_range, "cannot draw " + std::to_string(k) + " of " + std::to_string(n));
  PhiloxStream rng(seed, class_id, StreamPurpose::subset_sampling);
  std::vector<std::size_t> pool(n);
  std::iota(pool.begin(), pool.end(), std::size_t{0});
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.uniform_below(n - i));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(k);
  std::sort(pool.begin(), pool.end());
  return pool;
}

SubsetManifest build_random_subset(const EmbeddingDataset& ds, double fraction, std::uint64_t seed) {
  per_class_k(1, fraction);
  SubsetManifest m;
  m.method = SelectionMethod::uniform_random;
  m.retention_fraction = fraction;
  m.seed = seed;
  m.source_digest = ds.source_digest();
  for (const auto& [c, ids] : ds.class_index()) {
    const auto picks = sample_positions(ids.size(), per_class_k(ids.size(), fraction), seed, c);
    std::vector<SampleId> kept;
    kept.reserve(picks.size());
    for (std::size_t pos : picks) kept.push_back(ids[pos]);
    std::sort(kept.begin(), kept.end());
    m.retained.emplace(c, std::move(kept));
  }
  return m;
}

void validate_manifest(const SubsetManifest& m, const EmbeddingDataset& ds) {
  auto fail = [](const std::string& msg) { throw Error(ErrorCode::manifest_mismatch, msg); };
  if (!(m.retention_fraction > 0.0 && m.retention_fraction <= 1.0)) fail("fraction outside (0, 1]");
  if (m.seed.has_value() != (m.method == SelectionMethod::uniform_random)) {
    fail("seed must be present exactly for uniform-random manifests");
  }
  if (m.retained.size() != ds.class_index().size()) fail("manifest and dataset list different classes");
  for (const auto& [c, ids] : ds.class_index()) {
    auto it = m.retained.find(c);
    if (it == m.retained.end()) fail("class " + std::to_string(c) + " missing from manifest");
    const auto& kept = it->second;
    const std::size_t expected = per_class_k(ids.size(), m.retention_fraction);
    if (kept.size() != expected) {
      fail("class " + std::to_string(c) + " retains " + std::to_string(kept.size()) + ", expected " +
           std::to_string(expected));
    }
    for (std::size_t i = 0; i < kept.size(); ++i) {
      if (i > 0 && kept[i] <= kept[i - 1]) fail("class " + std::to_string(c) + " ids not strictly ascending");
      const auto row = ds.row_of(kept[i]);
      if (!row) fail("sample " + std::to_string(kept[i]) + " not in dataset");
      if (ds.class_id(*row) != c) {
        fail("sample " + std::to_string(kept[i]) + " filed under class " + std::to_string(c) +
             " but belongs to class " + std::to_string(ds.class_id(*row)));
      }
    }
  }
}

std::string manifest_to_json(const SubsetManifest& m) {
  nlohmann::ordered_json j;
  j["method"] = to_string(m.method);
  j["fraction"] = m.retention_fraction;
  j["seed"] = m.seed ? nlohmann::ordered_json(*m.seed) : nlohmann::ordered_json(nullptr);
  j["source_digest"] = m.source_digest;
  auto& retained = j["retained"] = nlohmann::ordered_json::object();
  for (const auto& [c, ids] : m.retained) retained[std::to_string(c)] = ids;
  return j.dump(2) + "\n";
}

SubsetManifest manifest_from_json(std::string_view text) {
  try {
    const auto j = nlohmann::json::parse(text);
    SubsetManifest m;
    const auto method = parse_method(j.at("method").get<std::string>());
    if (!method) throw Error(ErrorCode::format_error, "unknown manifest method");
    m.method = *method;
    m.retention_fraction = j.at("fraction").get<double>();
    if (!j.at("seed").is_null()) m.seed = j.at("seed").get<std::uint64_t>();
    m.source_digest = j.at("source_digest").get<std::string>();
    for (const auto& [key, ids] : j.at("retained").items()) {
      ClassId c = 0;
      std::size_t used = 0;
      const unsigned long parsed = std::stoul(key, &used);
      if (used != key.size() || parsed > std::numeric_limits<ClassId>::max()) {
        throw Error(ErrorCode::format_error, "bad class key '" + key + "'");
      }
      c = static_cast<ClassId>(parsed);
      m.retained.emplace(c, ids.get<std::vector<SampleId>>());
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::format_error, std::string("manifest json: ") + e.what());
  } catch (const std::logic_error&) {
    throw Error(ErrorCode::format_error, "manifest json: bad class key");
  }
}

std::string manifest_to_text(const SubsetManifest& m) {
  std::string out;
  for (const auto& [c, ids] : m.retained) {
    for (SampleId id : ids) {
      out += std::to_string(c);
      out += ' ';
      out += std::to_string(id);
      out += '\n';
    }
  }
  return out;
}

}  // namespace redunda
