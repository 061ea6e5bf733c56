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

#include "redunda/clustering.hpp"

#include <algorithm>
#include <charconv>
#include <limits>
#include <numeric>

#include "redunda/error.hpp"

namespace redunda {

namespace {

void check_points(std::span<const Point> points) {
  if (points.empty()) throw Error(ErrorCode::invalid_argument, "clustering needs at least one point");
  const std::size_t dim = points.front().vector.size();
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (points[i].vector.size() != dim) {
      throw Error(ErrorCode::dimension_mismatch, "point " + std::to_string(i) + " has dimension " +
                                                     std::to_string(points[i].vector.size()) +
                                                     ", expected " + std::to_string(dim));
    }
    if (squared_norm(points[i].vector) < kMinSquaredNorm) {
      throw Error(ErrorCode::zero_norm, "point " + std::to_string(points[i].id) + " is a zero vector");
    }
  }
}

void check_k(std::size_t n, std::size_t k) {
  if (k < 1 || k > n) {
    throw Error(ErrorCode::out_of_range,
                "k=" + std::to_string(k) + " outside [1, " + std::to_string(n) + "]");
  }
}

std::vector<std::span<const double>> vectors_of(std::span<const Point> points) {
  std::vector<std::span<const double>> out;
  out.reserve(points.size());
  for (const auto& p : points) out.push_back(p.vector);
  return out;
}

std::vector<SampleId> ids_of(std::span<const Point> points) {
  std::vector<SampleId> out;
  out.reserve(points.size());
  for (const auto& p : points) out.push_back(p.id);
  return out;
}

struct SlotMerge {
  Dissimilarity height;
  std::size_t lo;
  std::size_t hi;
};

// Slot merges in greedy order -> canonical dendrogram. Slot s always holds the
// cluster whose smallest input position is s.
Dendrogram to_dendrogram(std::span<const SlotMerge> merges, std::vector<SampleId> ids,
                         ClassId class_id) {
  Dendrogram d;
  d.class_id = class_id;
  d.n_points = ids.size();
  d.sample_ids = std::move(ids);
  std::vector<ClusterRef> slot_ref(d.n_points);
  std::iota(slot_ref.begin(), slot_ref.end(), ClusterRef{0});
  d.steps.reserve(merges.size());
  for (const auto& m : merges) {
    const ClusterRef created = d.n_points + d.steps.size();
    d.steps.push_back({slot_ref[m.lo], slot_ref[m.hi], m.height, created});
    slot_ref[m.lo] = created;
  }
  return d;
}

}  // namespace

std::size_t Partition::n_points() const noexcept {
  std::size_t total = 0;
  for (const auto& c : clusters) total += c.size();
  return total;
}

void canonicalize(Partition& p) {
  for (auto& c : p.clusters) std::sort(c.begin(), c.end());
  std::sort(p.clusters.begin(), p.clusters.end(),
            [](const auto& a, const auto& b) { return a.front() < b.front(); });
}

ClusteringResult agglomerate_naive(std::span<const Point> points, std::size_t k, ClassId class_id) {
  check_points(points);
  const std::size_t n = points.size();
  check_k(n, k);

  const auto vectors = vectors_of(points);
  const CondensedMatrix point_d = pairwise_dissimilarities(vectors);

  // Full symmetric cluster-distance table over slots.
  std::vector<double> cluster_d(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) cluster_d[i * n + j] = cluster_d[j * n + i] = point_d(i, j);
  }
  std::vector<std::vector<std::size_t>> members(n);
  for (std::size_t i = 0; i < n; ++i) members[i] = {i};
  std::vector<char> active(n, 1);

  std::vector<SlotMerge> merges;
  merges.reserve(n - k);
  while (merges.size() < n - k) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t bi = 0, bj = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (!active[i]) continue;
      for (std::size_t j = i + 1; j < n; ++j) {
        if (active[j] && cluster_d[i * n + j] < best) {
          best = cluster_d[i * n + j];
          bi = i;
          bj = j;
        }
      }
    }
    merges.push_back({best, bi, bj});
    members[bi].insert(members[bi].end(), members[bj].begin(), members[bj].end());
    members[bj].clear();
    active[bj] = 0;
    // Complete linkage straight from the definition, not the max-update.
    for (std::size_t m = 0; m < n; ++m) {
      if (!active[m] || m == bi) continue;
      double worst = 0.0;
      for (std::size_t a : members[bi]) {
        for (std::size_t b : members[m]) worst = std::max(worst, point_d(a, b));
      }
      cluster_d[bi * n + m] = cluster_d[m * n + bi] = worst;
    }
  }

  ClusteringResult result;
  result.dendrogram = to_dendrogram(merges, ids_of(points), class_id);
  result.partition.class_id = class_id;
  for (std::size_t i = 0; i < n; ++i) {
    if (!active[i]) continue;
    auto& cluster = result.partition.clusters.emplace_back();
    for (std::size_t m : members[i]) cluster.push_back(points[m].id);
  }
  canonicalize(result.partition);
  return result;
}

namespace {

// Runs the nearest-neighbor chain to completion and returns the merges in
// greedy order. Pairs are totally ordered by (D, lower slot, higher slot);
// complete linkage stays reducible under that order, so the chain finds the
// greedy merge set.
std::vector<SlotMerge> nn_chain(std::span<const Point> points, const ClusteringOptions& options) {
  const std::size_t n = points.size();
  const std::size_t bytes = CondensedMatrix::bytes_for(n);
  if (bytes > options.memory_cap_bytes) {
    throw Error(ErrorCode::memory_cap,
                "class " + std::to_string(options.class_id) + " with " + std::to_string(n) +
                    " points needs " + std::to_string(bytes) + " bytes for its distance matrix; cap is " +
                    std::to_string(options.memory_cap_bytes));
  }
  const auto vectors = vectors_of(points);
  CondensedMatrix d = pairwise_dissimilarities(vectors);

  std::vector<std::size_t> active(n);
  std::iota(active.begin(), active.end(), std::size_t{0});
  std::vector<std::size_t> chain;
  chain.reserve(n);
  std::vector<SlotMerge> merges;
  merges.reserve(n > 0 ? n - 1 : 0);

  while (active.size() > 1) {
    if (chain.empty()) chain.push_back(active.front());
    while (true) {
      const std::size_t a = chain.back();
      // Ascending scan with strict < picks the smallest slot among ties,
      // which is the (D, min, max) order for a fixed a.
      double best = std::numeric_limits<double>::infinity();
      std::size_t nn = a;
      for (std::size_t y : active) {
        if (y == a) continue;
        const double dy = d(a, y);
        if (dy < best) {
          best = dy;
          nn = y;
        }
      }
      if (chain.size() >= 2 && nn == chain[chain.size() - 2]) {
        chain.resize(chain.size() - 2);
        const std::size_t lo = std::min(a, nn);
        const std::size_t hi = std::max(a, nn);
        merges.push_back({best, lo, hi});
        for (std::size_t y : active) {
          if (y == lo || y == hi) continue;
          double& target = d.at(lo, y);
          target = std::max(target, d(hi, y));
        }
        active.erase(std::lower_bound(active.begin(), active.end(), hi));
        break;
      }
      chain.push_back(nn);
    }
  }

  std::sort(merges.begin(), merges.end(), [](const SlotMerge& x, const SlotMerge& y) {
    if (x.height != y.height) return x.height < y.height;
    if (x.lo != y.lo) return x.lo < y.lo;
    return x.hi < y.hi;
  });
  return merges;
}

}  // namespace

Dendrogram full_dendrogram(std::span<const Point> points, const ClusteringOptions& options) {
  check_points(points);
  const auto merges = nn_chain(points, options);
  return to_dendrogram(merges, ids_of(points), options.class_id);
}

ClusteringResult agglomerate_fast(std::span<const Point> points, std::size_t k,
                                  const ClusteringOptions& options) {
  check_points(points);
  const std::size_t n = points.size();
  check_k(n, k);
  auto merges = nn_chain(points, options);
  merges.resize(n - k);
  ClusteringResult result;
  result.dendrogram = to_dendrogram(merges, ids_of(points), options.class_id);
  result.partition = cut_dendrogram(result.dendrogram, k);
  return result;
}

void validate_dendrogram(const Dendrogram& d) {
  if (d.sample_ids.size() != d.n_points) {
    throw Error(ErrorCode::format_error, "dendrogram leaf ids do not match n_points");
  }
  if (d.n_points == 0 ? !d.steps.empty() : d.steps.size() > d.n_points - 1) {
    throw Error(ErrorCode::format_error, "dendrogram has too many steps");
  }
  std::vector<char> consumed(d.n_points + d.steps.size(), 0);
  for (std::size_t s = 0; s < d.steps.size(); ++s) {
    const auto& step = d.steps[s];
    const ClusterRef limit = d.n_points + s;
    if (step.new_id != limit) {
      throw Error(ErrorCode::format_error, "step " + std::to_string(s) + " creates ref " +
                                               std::to_string(step.new_id) + ", expected " +
                                               std::to_string(limit));
    }
    for (ClusterRef r : {step.left, step.right}) {
      if (r >= limit || consumed[r]) {
        throw Error(ErrorCode::format_error,
                    "step " + std::to_string(s) + " uses ref " + std::to_string(r) + " invalidly");
      }
      consumed[r] = 1;
    }
    if (step.left == step.right || !(step.height >= 0.0)) {
      throw Error(ErrorCode::format_error, "step " + std::to_string(s) + " is malformed");
    }
  }
}

Partition cut_dendrogram(const Dendrogram& d, std::size_t k) {
  validate_dendrogram(d);
  const std::size_t n = d.n_points;
  if (n == 0 || k > n || k < n - d.steps.size()) {
    throw Error(ErrorCode::out_of_range, "k=" + std::to_string(k) + " not reachable from a dendrogram of " +
                                             std::to_string(n) + " points and " +
                                             std::to_string(d.steps.size()) + " steps");
  }
  std::vector<std::size_t> order(d.steps.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return d.steps[a].height < d.steps[b].height;
  });

  // Union-find over leaves; each ref resolves to some leaf of its cluster.
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  constexpr auto kUnset = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> leaf_of(n + d.steps.size(), kUnset);
  for (std::size_t i = 0; i < n; ++i) leaf_of[i] = i;

  for (std::size_t r = 0; r < n - k; ++r) {
    const auto& step = d.steps[order[r]];
    if (leaf_of[step.left] == kUnset || leaf_of[step.right] == kUnset) {
      throw Error(ErrorCode::format_error, "dendrogram steps are not replayable in height order");
    }
    const std::size_t a = find(leaf_of[step.left]);
    const std::size_t b = find(leaf_of[step.right]);
    parent[b] = a;
    leaf_of[step.new_id] = a;
  }

  std::vector<std::size_t> slot_of_root(n, kUnset);
  Partition p;
  p.class_id = d.class_id;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t root = find(i);
    if (slot_of_root[root] == kUnset) {
      slot_of_root[root] = p.clusters.size();
      p.clusters.emplace_back();
    }
    p.clusters[slot_of_root[root]].push_back(d.sample_ids[i]);
  }
  canonicalize(p);
  return p;
}

std::string format_dendrogram(const Dendrogram& d) {
  std::string out;
  char buf[64];
  for (const auto& s : d.steps) {
    out += std::to_string(s.left);
    out += ' ';
    out += std::to_string(s.right);
    out += ' ';
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, s.height, std::chars_format::general, 17);
    out.append(buf, ptr);
    out += ' ';
    out += std::to_string(s.new_id);
    out += '\n';
  }
  return out;
}

}  // namespace redunda
