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

#include <cmath>
#include <random>
#include <vector>

#include "oracles.hpp"
#include "redunda/error.hpp"
#include "redunda/metric.hpp"

using namespace redunda;
using redunda::testing::oracle_cosine;
using redunda::testing::random_vector;

using Vec = std::vector<double>;
using Cluster = std::vector<std::span<const double>>;

TEST(Metric, IdenticalVectorsAreExactlyZero) {
  const Vec x{3, 4};
  EXPECT_EQ(cosine_dissimilarity(x, x), 0.0);
}

TEST(Metric, OrthogonalIsOne) {
  EXPECT_DOUBLE_EQ(cosine_dissimilarity(Vec{1, 0}, Vec{0, 1}), 1.0);
}

TEST(Metric, FortyFiveDegrees) {
  // 1 - 1/sqrt(2), evaluated independently
  EXPECT_NEAR(cosine_dissimilarity(Vec{1, 0}, Vec{1, 1}), 0.29289321881345254, 1e-15);
}

TEST(Metric, OppositeIsTwo) {
  EXPECT_DOUBLE_EQ(cosine_dissimilarity(Vec{1, 2, 3}, Vec{-2, -4, -6}), 2.0);
}

TEST(Metric, Errors) {
  try {
    cosine_dissimilarity(Vec{1, 0}, Vec{1, 0, 0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::dimension_mismatch);
  }
  try {
    cosine_dissimilarity(Vec{0, 0}, Vec{1, 0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::zero_norm);
  }
  EXPECT_THROW(cluster_dissimilarity({}, Cluster{Vec{1, 0}}), Error);
}

TEST(Metric, ClusterDissimilarityExamples) {
  const Vec a{1, 0}, b{0, 1}, c{1, 1}, d{1, 0.1};
  EXPECT_EQ(cluster_dissimilarity(Cluster{a}, Cluster{a}), 0.0);
  EXPECT_DOUBLE_EQ(cluster_dissimilarity(Cluster{a}, Cluster{b, c}), 1.0);
  // d((1,0.1),(1,0)) = 1 - 1/sqrt(1.01)
  EXPECT_NEAR(cluster_dissimilarity(Cluster{a, d}, Cluster{a}), 0.004962809790010736, 1e-15);
}

TEST(Metric, SingletonClustersMatchPointDissimilarity) {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 200; ++t) {
    auto x = random_vector(rng, 5), y = random_vector(rng, 5);
    EXPECT_EQ(cluster_dissimilarity(Cluster{x}, Cluster{y}), cosine_dissimilarity(x, y));
  }
}

TEST(Metric, CachedAndDirectAgree) {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 1000; ++t) {
    const std::size_t dim = 1 + t % 70;
    auto x = random_vector(rng, dim), y = random_vector(rng, dim);
    const double cached = cosine_dissimilarity_cached(x, squared_norm(x), y, squared_norm(y));
    EXPECT_NEAR(cached, cosine_dissimilarity(x, y), 1e-12);
    EXPECT_NEAR(cached, oracle_cosine(x, y), 1e-12);
  }
}

TEST(Metric, SymmetryIsExact) {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 2000; ++t) {
    auto x = random_vector(rng, 1 + t % 17), y = random_vector(rng, 1 + t % 17);
    EXPECT_EQ(cosine_dissimilarity(x, y), cosine_dissimilarity(y, x));
  }
}

TEST(Metric, PositiveScaleInvariance) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> scale(1e-3, 1e3);
  for (int t = 0; t < 2000; ++t) {
    auto x = random_vector(rng, 8), y = random_vector(rng, 8);
    const double base = cosine_dissimilarity(x, y);
    const double alpha = scale(rng), beta = scale(rng);
    Vec xs = x, ys = y;
    for (auto& v : xs) v *= alpha;
    for (auto& v : ys) v *= beta;
    EXPECT_NEAR(cosine_dissimilarity(xs, ys), base, 1e-12);
    EXPECT_NEAR(cosine_dissimilarity(x, xs), 0.0, 1e-12);
  }
}

TEST(Metric, CondensedMatrixLayout) {
  CondensedMatrix m(5);
  std::size_t expected = 0;
  for (std::size_t i = 0; i < 5; ++i) {
    for (std::size_t j = i + 1; j < 5; ++j) {
      EXPECT_EQ(m.index(i, j), expected);
      EXPECT_EQ(m.index(j, i), expected);
      ++expected;
    }
  }
  EXPECT_EQ(m.values().size(), 10u);
  EXPECT_EQ(CondensedMatrix::bytes_for(5000), 5000u * 4999u / 2u * sizeof(double));
  EXPECT_EQ(CondensedMatrix::bytes_for(1), 0u);
}

TEST(Metric, PairwiseMatchesDirect) {
  std::mt19937_64 rng(21);
  std::vector<Vec> vs;
  for (int i = 0; i < 30; ++i) vs.push_back(random_vector(rng, 6));
  std::vector<std::span<const double>> spans(vs.begin(), vs.end());
  const auto m = pairwise_dissimilarities(spans);
  for (std::size_t i = 0; i < vs.size(); ++i)
    for (std::size_t j = i + 1; j < vs.size(); ++j) EXPECT_EQ(m(i, j), cosine_dissimilarity(vs[i], vs[j]));
}
