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

#include "redunda/analysis.hpp"

#include <algorithm>
#include <cstdio>
#include <limits>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "parallel.hpp"
#include "redunda/error.hpp"

namespace redunda {

namespace {

void check_representatives(const Partition& p, std::span<const SampleId> reps) {
  if (reps.size() != p.clusters.size()) {
    throw Error(ErrorCode::invalid_argument, "need one representative per cluster");
  }
  for (std::size_t i = 0; i < reps.size(); ++i) {
    const auto& c = p.clusters[i];
    if (std::find(c.begin(), c.end(), reps[i]) == c.end()) {
      throw Error(ErrorCode::invalid_argument,
                  "representative " + std::to_string(reps[i]) + " is not a member of its cluster");
    }
  }
}

std::span<const double> vector_of(const EmbeddingDataset& ds, SampleId id) {
  const auto row = ds.row_of(id);
  if (!row) throw Error(ErrorCode::invalid_argument, "sample " + std::to_string(id) + " not in dataset");
  return ds.vector(*row);
}

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6e", v);
  return buf;
}

const char* mode_name(OverallMode m) {
  return m == OverallMode::cluster_weighted ? "cluster-weighted" : "class-mean";
}

}  // namespace

SizeHistogram size_histogram(const Partition& p) {
  SizeHistogram h;
  h.class_id = p.class_id;
  for (const auto& c : p.clusters) ++h.counts[c.size()];
  return h;
}

std::optional<ClassDissimilarity> avg_dissimilarity(const Partition& p,
                                                    std::span<const SampleId> representatives,
                                                    const EmbeddingDataset& ds) {
  check_representatives(p, representatives);
  ClassDissimilarity out;
  for (std::size_t i = 0; i < p.clusters.size(); ++i) {
    const auto& cluster = p.clusters[i];
    if (cluster.size() < 2) continue;
    const auto rep = vector_of(ds, representatives[i]);
    const double rep_sq = squared_norm(rep);
    double sum = 0.0;
    for (SampleId id : cluster) {
      if (id == representatives[i]) continue;
      const auto v = vector_of(ds, id);
      sum += cosine_dissimilarity_cached(v, squared_norm(v), rep, rep_sq);
    }
    out.sum_of_cluster_means += sum / static_cast<double>(cluster.size() - 1);
    ++out.groups_counted;
  }
  if (out.groups_counted == 0) return std::nullopt;
  out.mean = out.sum_of_cluster_means / static_cast<double>(out.groups_counted);
  return out;
}

DissimilarityReport summarize_dissimilarity(
    const std::map<ClassId, std::optional<ClassDissimilarity>>& per_class, OverallMode mode) {
  DissimilarityReport r;
  r.mode = mode;
  double cluster_sum = 0.0, class_sum = 0.0;
  std::size_t clusters = 0;
  for (const auto& [c, entry] : per_class) {
    if (!entry) continue;
    r.per_class[c] = entry->mean;
    r.groups_counted[c] = entry->groups_counted;
    cluster_sum += entry->sum_of_cluster_means;
    clusters += entry->groups_counted;
    class_sum += entry->mean;
  }
  if (!r.per_class.empty()) {
    r.overall = mode == OverallMode::cluster_weighted
                    ? cluster_sum / static_cast<double>(clusters)
                    : class_sum / static_cast<double>(r.per_class.size());
  }
  return r;
}

std::vector<NearestExcludedPair> nearest_excluded(const Partition& p,
                                                  std::span<const SampleId> representatives,
                                                  std::span<const Point> class_points) {
  check_representatives(p, representatives);
  std::vector<NearestExcludedPair> out;
  if (p.clusters.size() < 2) return out;

  std::vector<double> sq(class_points.size());
  for (std::size_t i = 0; i < class_points.size(); ++i) sq[i] = squared_norm(class_points[i].vector);
  auto index_of = [&](SampleId id) {
    for (std::size_t i = 0; i < class_points.size(); ++i) {
      if (class_points[i].id == id) return i;
    }
    throw Error(ErrorCode::invalid_argument, "representative " + std::to_string(id) + " not among class points");
  };

  for (std::size_t c = 0; c < p.clusters.size(); ++c) {
    const auto& cluster = p.clusters[c];
    if (cluster.size() < 2) continue;
    const std::unordered_set<SampleId> inside(cluster.begin(), cluster.end());
    const std::size_t r = index_of(representatives[c]);
    NearestExcludedPair best{representatives[c], 0, std::numeric_limits<double>::infinity(), true};
    bool found = false;
    for (std::size_t i = 0; i < class_points.size(); ++i) {
      const auto& q = class_points[i];
      if (inside.count(q.id)) continue;
      const double d = cosine_dissimilarity_cached(class_points[r].vector, sq[r], q.vector, sq[i]);
      if (!found || d < best.dissimilarity || (d == best.dissimilarity && q.id < best.neighbor_id)) {
        best.neighbor_id = q.id;
        best.dissimilarity = d;
        found = true;
      }
    }
    if (found) out.push_back(best);
  }
  return out;
}

AnalysisReport analyze(const EmbeddingDataset& ds, const std::map<ClassId, ClassAnalysisInput>& classes,
                       const ReportFlags& flags, OverallMode mode, std::size_t jobs) {
  struct ClassOut {
    SizeHistogram histogram;
    std::optional<ClassDissimilarity> dissimilarity;
    std::vector<NearestExcludedPair> nearest;
  };
  std::vector<ClassId> ids;
  for (const auto& [c, in] : classes) ids.push_back(c);
  std::vector<ClassOut> outs(ids.size());

  detail::run_jobs(ids.size(), jobs, [&](std::size_t i) {
    const auto& in = classes.at(ids[i]);
    if (in.partition == nullptr) throw Error(ErrorCode::invalid_argument, "missing partition");
    auto& out = outs[i];
    if (flags.histogram) out.histogram = size_histogram(*in.partition);
    if (flags.dissimilarity) out.dissimilarity = avg_dissimilarity(*in.partition, in.representatives, ds);
    if (flags.nearest_excluded) {
      out.nearest = nearest_excluded(*in.partition, in.representatives, class_view(ds, ids[i]));
    }
  });

  AnalysisReport report;
  report.flags = flags;
  std::map<ClassId, std::optional<ClassDissimilarity>> per_class;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (flags.histogram) report.histograms[ids[i]] = std::move(outs[i].histogram);
    if (flags.dissimilarity) per_class[ids[i]] = outs[i].dissimilarity;
    if (flags.nearest_excluded) report.nearest[ids[i]] = std::move(outs[i].nearest);
  }
  if (flags.dissimilarity) report.dissimilarity = summarize_dissimilarity(per_class, mode);
  return report;
}

std::string report_to_json(const AnalysisReport& r) {
  using nlohmann::ordered_json;
  ordered_json j = ordered_json::object();
  if (r.flags.histogram) {
    auto& h = j["histograms"] = ordered_json::object();
    for (const auto& [c, hist] : r.histograms) {
      auto& entry = h[std::to_string(c)] = ordered_json::object();
      for (const auto& [size, count] : hist.counts) entry[std::to_string(size)] = count;
    }
  }
  if (r.dissimilarity) {
    const auto& d = *r.dissimilarity;
    auto& out = j["dissimilarity"] = ordered_json::object();
    out["overall_mode"] = mode_name(d.mode);
    out["overall"] = d.overall ? ordered_json(*d.overall) : ordered_json(nullptr);
    auto& per = out["per_class"] = ordered_json::object();
    for (const auto& [c, v] : d.per_class) per[std::to_string(c)] = v;
    auto& groups = out["groups_counted"] = ordered_json::object();
    for (const auto& [c, n] : d.groups_counted) groups[std::to_string(c)] = n;
  }
  if (r.flags.nearest_excluded) {
    auto& ne = j["nearest_excluded"] = ordered_json::object();
    for (const auto& [c, pairs] : r.nearest) {
      auto& arr = ne[std::to_string(c)] = ordered_json::array();
      for (const auto& p : pairs) {
        arr.push_back({{"retained_id", p.retained_id},
                       {"neighbor_id", p.neighbor_id},
                       {"dissimilarity", p.dissimilarity},
                       {"same_class", p.same_class}});
      }
    }
  }
  return j.dump(2) + "\n";
}

std::string report_to_text(const AnalysisReport& r) {
  std::string out;
  char line[160];
  if (r.flags.histogram) {
    out += "Redundant group sizes\n";
    std::snprintf(line, sizeof line, "%10s %10s %10s\n", "class", "size", "groups");
    out += line;
    for (const auto& [c, hist] : r.histograms) {
      for (const auto& [size, count] : hist.counts) {
        std::snprintf(line, sizeof line, "%10u %10zu %10zu\n", c, size, count);
        out += line;
      }
    }
    out += '\n';
  }
  if (r.dissimilarity) {
    const auto& d = *r.dissimilarity;
    out += "Average dissimilarity to the retained sample (groups of size > 1)\n";
    std::snprintf(line, sizeof line, "%10s %14s %10s\n", "class", "mean", "groups");
    out += line;
    for (const auto& [c, v] : d.per_class) {
      std::snprintf(line, sizeof line, "%10u %14s %10zu\n", c, sci(v).c_str(), d.groups_counted.at(c));
      out += line;
    }
    std::snprintf(line, sizeof line, "%10s %14s  (%s)\n", "all", d.overall ? sci(*d.overall).c_str() : "n/a",
                  mode_name(d.mode));
    out += line;
    out += '\n';
  }
  if (r.flags.nearest_excluded) {
    out += "Nearest excluded neighbor of each retained sample\n";
    std::snprintf(line, sizeof line, "%10s %12s %12s %14s\n", "class", "retained", "neighbor", "dissimilarity");
    out += line;
    for (const auto& [c, pairs] : r.nearest) {
      for (const auto& p : pairs) {
        std::snprintf(line, sizeof line, "%10u %12llu %12llu %14s\n", c,
                      static_cast<unsigned long long>(p.retained_id),
                      static_cast<unsigned long long>(p.neighbor_id), sci(p.dissimilarity).c_str());
        out += line;
      }
    }
  }
  return out;
}

std::string histogram_to_csv(const AnalysisReport& r) {
  std::string out = "class_id,size,count\n";
  for (const auto& [c, hist] : r.histograms) {
    for (const auto& [size, count] : hist.counts) {
      out += std::to_string(c) + "," + std::to_string(size) + "," + std::to_string(count) + "\n";
    }
  }
  return out;
}

}  // namespace redunda
