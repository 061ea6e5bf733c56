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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <random>
#include <set>

#include "oracles.hpp"
#include "redunda/clustering.hpp"
#include "redunda/error.hpp"

using namespace redunda;
using redunda::testing::PointSet;
using redunda::testing::random_points;

namespace {

PointSet three_points() {
  // a, b nearly parallel; c orthogonal
  return PointSet{{{1, 0}, {1, 0.001}, {0, 1}}, {100, 101, 102}};
}

// Vectors drawn from a coarse integer grid produce many exact ties.
PointSet grid_points(std::mt19937_64& rng, std::size_t n, std::size_t dim) {
  std::uniform_int_distribution<int> coord(-1, 2);
  PointSet s;
  while (s.vectors.size() < n) {
    std::vector<double> v(dim);
    for (auto& x : v) x = coord(rng);
    if (std::all_of(v.begin(), v.end(), [](double x) { return x == 0; })) continue;
    s.vectors.push_back(v);
    s.ids.push_back(s.ids.size());
  }
  return s;
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an error";
  return ErrorCode::invalid_argument;
}

}  // namespace

TEST(Clustering, ThreePointExample) {
  const auto s = three_points();
  const auto pts = s.points();
  for (const auto& r : {agglomerate_naive(pts, 2), agglomerate_fast(pts, 2)}) {
    EXPECT_EQ(r.partition.clusters, (std::vector<std::vector<SampleId>>{{100, 101}, {102}}));
    ASSERT_EQ(r.dendrogram.steps.size(), 1u);
    // 1 - 1/sqrt(1.000001)
    EXPECT_NEAR(r.dendrogram.steps[0].height, 4.999996250365513e-07, 1e-15);
    EXPECT_EQ(r.dendrogram.steps[0], (MergeStep{0, 1, r.dendrogram.steps[0].height, 3}));
  }
}

TEST(Clustering, KEqualsNAndKEqualsOne) {
  std::mt19937_64 rng(1);
  const auto s = random_points(rng, 12, 4);
  const auto pts = s.points();
  for (auto algo : {&agglomerate_naive, +[](std::span<const Point> p, std::size_t k, ClassId) {
                      return agglomerate_fast(p, k);
                    }}) {
    const auto all = algo(pts, 12, 0);
    EXPECT_TRUE(all.dendrogram.steps.empty());
    EXPECT_EQ(all.partition.k(), 12u);
    const auto one = algo(pts, 1, 0);
    EXPECT_EQ(one.dendrogram.steps.size(), 11u);
    ASSERT_EQ(one.partition.k(), 1u);
    EXPECT_EQ(one.partition.clusters[0].size(), 12u);
  }
}

TEST(Clustering, Errors) {
  const auto s = three_points();
  const auto pts = s.points();
  EXPECT_EQ(code_of([&] { agglomerate_naive(pts, 0); }), ErrorCode::out_of_range);
  EXPECT_EQ(code_of([&] { agglomerate_fast(pts, 4); }), ErrorCode::out_of_range);
  EXPECT_EQ(code_of([&] { agglomerate_fast({}, 1); }), ErrorCode::invalid_argument);
  EXPECT_EQ(code_of([&] { agglomerate_naive({}, 1); }), ErrorCode::invalid_argument);
  std::vector<double> zero{0, 0}, one{1, 0}, three{1, 0, 0};
  std::vector<Point> with_zero{{0, one}, {1, zero}};
  EXPECT_EQ(code_of([&] { agglomerate_fast(with_zero, 1); }), ErrorCode::zero_norm);
  std::vector<Point> mixed{{0, one}, {1, three}};
  EXPECT_EQ(code_of([&] { agglomerate_fast(mixed, 1); }), ErrorCode::dimension_mismatch);
}

TEST(Clustering, SinglePointClass) {
  std::vector<double> v{0.3, 0.4};
  std::vector<Point> one{{9, v}};
  const auto r = agglomerate_fast(one, 1);
  EXPECT_EQ(r.partition.clusters, (std::vector<std::vector<SampleId>>{{9}}));
  EXPECT_EQ(code_of([&] { agglomerate_fast(one, 2); }), ErrorCode::out_of_range);
}

TEST(Clustering, MemoryCapNamesRequiredBytes) {
  std::mt19937_64 rng(2);
  const auto s = random_points(rng, 100, 3);
  ClusteringOptions opts;
  opts.class_id = 7;
  opts.memory_cap_bytes = 1000;
  try {
    agglomerate_fast(s.points(), 10, opts);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::memory_cap);
    EXPECT_NE(std::string(e.what()).find(std::to_string(CondensedMatrix::bytes_for(100))), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("class 7"), std::string::npos);
  }
  opts.memory_cap_bytes = CondensedMatrix::bytes_for(100);
  EXPECT_NO_THROW(agglomerate_fast(s.points(), 10, opts));
}

TEST(Clustering, FastMatchesNaiveOnRandomInputs) {
  std::mt19937_64 rng(1234);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t dim = std::vector<std::size_t>{2, 8, 64}[trial % 3];
    const std::size_t n = std::uniform_int_distribution<std::size_t>(2, 120)(rng);
    const std::size_t k = std::uniform_int_distribution<std::size_t>(1, n)(rng);
    const auto s = random_points(rng, n, dim);
    const auto naive = agglomerate_naive(s.points(), k);
    const auto fast = agglomerate_fast(s.points(), k);
    ASSERT_EQ(fast.partition, naive.partition) << "trial " << trial;
    ASSERT_EQ(fast.dendrogram, naive.dendrogram) << "trial " << trial;
  }
}

TEST(Clustering, FastMatchesNaiveUnderExactTies) {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t n = std::uniform_int_distribution<std::size_t>(2, 60)(rng);
    const auto s = grid_points(rng, n, 2 + trial % 3);
    for (std::size_t k : {std::size_t{1}, n / 2 + 1, n - 1 + (n == 1)}) {
      if (k < 1 || k > n) continue;
      const auto naive = agglomerate_naive(s.points(), k);
      const auto fast = agglomerate_fast(s.points(), k);
      ASSERT_EQ(fast.partition, naive.partition) << "trial " << trial << " k " << k;
      ASSERT_EQ(fast.dendrogram, naive.dendrogram) << "trial " << trial << " k " << k;
    }
  }
}

TEST(Clustering, TwoHundredUnitVectors) {
  std::mt19937_64 rng(200);
  auto s = random_points(rng, 200, 8);
  for (auto& v : s.vectors) {
    double norm = 0;
    for (double x : v) norm += x * x;
    for (double& x : v) x /= std::sqrt(norm);
  }
  const auto naive = agglomerate_naive(s.points(), 50);
  const auto fast = agglomerate_fast(s.points(), 50);
  EXPECT_EQ(fast.partition, naive.partition);
  EXPECT_EQ(fast.partition.k(), 50u);
}

TEST(Clustering, CutDendrogramExamples) {
  const auto s = three_points();
  const auto d = full_dendrogram(s.points());
  EXPECT_EQ(cut_dendrogram(d, 3).clusters, (std::vector<std::vector<SampleId>>{{100}, {101}, {102}}));
  EXPECT_EQ(cut_dendrogram(d, 2).clusters, (std::vector<std::vector<SampleId>>{{100, 101}, {102}}));
  EXPECT_EQ(cut_dendrogram(d, 1).k(), 1u);
  EXPECT_EQ(code_of([&] { cut_dendrogram(d, 4); }), ErrorCode::out_of_range);
  EXPECT_EQ(code_of([&] { cut_dendrogram(d, 0); }), ErrorCode::out_of_range);
  const auto truncated = agglomerate_fast(s.points(), 2).dendrogram;
  EXPECT_EQ(code_of([&] { cut_dendrogram(truncated, 1); }), ErrorCode::out_of_range);
}

TEST(Clustering, CutEveryKOfAFullDendrogram) {
  std::mt19937_64 rng(31);
  const auto s = random_points(rng, 200, 8);
  const auto d = full_dendrogram(s.points());
  ASSERT_EQ(d.steps.size(), 199u);
  for (std::size_t k = 1; k <= 200; ++k) {
    const auto p = cut_dendrogram(d, k);
    ASSERT_EQ(p.k(), k);
    ASSERT_EQ(p.n_points(), 200u);
  }
  // Spot-check against the reference at a few cut levels.
  for (std::size_t k : {1u, 7u, 64u, 150u}) {
    EXPECT_EQ(cut_dendrogram(d, k), agglomerate_naive(s.points(), k).partition);
  }
}

TEST(Clustering, CutAtClusteringKReproducesPartition) {
  std::mt19937_64 rng(32);
  const auto s = random_points(rng, 90, 5);
  const auto r = agglomerate_fast(s.points(), 30);
  EXPECT_EQ(cut_dendrogram(r.dendrogram, 30), r.partition);
}

TEST(Clustering, PartitionIsADisjointCover) {
  std::mt19937_64 rng(33);
  for (int t = 0; t < 30; ++t) {
    const std::size_t n = 1 + t * 5;
    const auto s = random_points(rng, n, 4);
    const std::size_t k = 1 + (t * 7) % n;
    const auto p = agglomerate_fast(s.points(), k).partition;
    EXPECT_EQ(p.k(), k);
    std::set<SampleId> seen;
    for (const auto& c : p.clusters) {
      EXPECT_FALSE(c.empty());
      for (SampleId id : c) EXPECT_TRUE(seen.insert(id).second);
    }
    EXPECT_EQ(seen, std::set<SampleId>(s.ids.begin(), s.ids.end()));
  }
}

TEST(Clustering, HeightsAreMonotoneAndForestIsValid) {
  std::mt19937_64 rng(34);
  const auto s = random_points(rng, 150, 6);
  const auto d = full_dendrogram(s.points());
  EXPECT_NO_THROW(validate_dendrogram(d));
  std::vector<double> height_of(d.n_points + d.steps.size(), 0.0);
  for (std::size_t i = 1; i < d.steps.size(); ++i) EXPECT_LE(d.steps[i - 1].height, d.steps[i].height);
  for (const auto& st : d.steps) {
    EXPECT_GE(st.height, height_of[st.left]);
    EXPECT_GE(st.height, height_of[st.right]);
    height_of[st.new_id] = st.height;
  }
}

TEST(Clustering, ValidateRejectsBrokenForest) {
  Dendrogram d;
  d.n_points = 3;
  d.sample_ids = {0, 1, 2};
  d.steps = {{0, 1, 0.1, 3}, {0, 2, 0.2, 4}};  // ref 0 consumed twice
  EXPECT_EQ(code_of([&] { validate_dendrogram(d); }), ErrorCode::format_error);
  d.steps = {{0, 1, 0.1, 3}, {3, 2, 0.2, 5}};  // wrong new id
  EXPECT_EQ(code_of([&] { validate_dendrogram(d); }), ErrorCode::format_error);
  d.steps = {{0, 4, 0.1, 3}};  // forward reference
  EXPECT_EQ(code_of([&] { validate_dendrogram(d); }), ErrorCode::format_error);
}

TEST(Clustering, PermutationRobustness) {
  std::mt19937_64 rng(35);
  auto s = random_points(rng, 80, 8);
  const auto base = agglomerate_fast(s.points(), 20).partition;
  for (int t = 0; t < 5; ++t) {
    std::vector<std::size_t> order(s.vectors.size());
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    PointSet shuffled;
    for (auto i : order) {
      shuffled.vectors.push_back(s.vectors[i]);
      shuffled.ids.push_back(s.ids[i]);
    }
    EXPECT_EQ(agglomerate_fast(shuffled.points(), 20).partition, base);
  }
}

TEST(Clustering, DuplicatesMergeFirstAtZeroHeight) {
  PointSet s{{{1, 0}, {0, 1}, {1, 0}, {0.6, 0.8}, {0, 1}}, {0, 1, 2, 3, 4}};
  const auto r = agglomerate_fast(s.points(), 3);
  EXPECT_EQ(r.partition.clusters, (std::vector<std::vector<SampleId>>{{0, 2}, {1, 4}, {3}}));
  EXPECT_EQ(r.dendrogram.steps[0].height, 0.0);
  EXPECT_EQ(r.dendrogram.steps[1].height, 0.0);
  EXPECT_EQ(r.partition, agglomerate_naive(s.points(), 3).partition);
}

TEST(Clustering, PlantedGroupsAreRecovered) {
  std::mt19937_64 rng(36);
  for (int t = 0; t < 20; ++t) {
    // anchors along distinct axes, members jittered by < 1e-3 in angle
    const std::size_t groups = 2 + t % 6, dim = 8;
    std::normal_distribution<double> jitter(0.0, 1e-4);
    PointSet s;
    std::vector<std::vector<SampleId>> truth(groups);
    for (std::size_t g = 0; g < groups; ++g) {
      for (std::size_t m = 0; m < 1 + (g + t) % 4; ++m) {
        std::vector<double> v(dim, 0.0);
        v[g] = 1.0;
        for (double& x : v) x += jitter(rng);
        truth[g].push_back(s.ids.size());
        s.ids.push_back(s.ids.size());
        s.vectors.push_back(v);
      }
    }
    EXPECT_EQ(agglomerate_fast(s.points(), groups).partition.clusters, truth);
  }
}

TEST(Clustering, DendrogramDumpFormat) {
  Dendrogram d;
  d.n_points = 3;
  d.sample_ids = {0, 1, 2};
  d.steps = {{0, 1, 0.1, 3}, {2, 3, 1.0, 4}};
  EXPECT_EQ(format_dendrogram(d), "0 1 0.10000000000000001 3\n2 3 1 4\n");
}
