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

#include "redunda/metric.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "redunda/dataset.hpp"
#include "redunda/error.hpp"

namespace redunda {

double dot(std::span<const double> a, std::span<const double> b) noexcept {
  const std::size_t n = std::min(a.size(), b.size());
  double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    s0 += a[i] * b[i];
    s1 += a[i + 1] * b[i + 1];
    s2 += a[i + 2] * b[i + 2];
    s3 += a[i + 3] * b[i + 3];
  }
  for (; i < n; ++i) s0 += a[i] * b[i];
  return (s0 + s1) + (s2 + s3);
}

double squared_norm(std::span<const double> a) noexcept { return dot(a, a); }

Dissimilarity cosine_dissimilarity_cached(std::span<const double> x1, double sq_norm1,
                                          std::span<const double> x2, double sq_norm2) noexcept {
  // sqrt(s * s) == s exactly under IEEE rounding, so x1 == x2 yields 1 - 1.
  double denom = std::sqrt(sq_norm1 * sq_norm2);
  if (!std::isfinite(denom) || denom == 0.0) denom = std::sqrt(sq_norm1) * std::sqrt(sq_norm2);
  const double d = 1.0 - dot(x1, x2) / denom;
  return std::clamp(d, 0.0, 2.0);
}

Dissimilarity cosine_dissimilarity(std::span<const double> x1, std::span<const double> x2) {
  if (x1.size() != x2.size()) {
    throw Error(ErrorCode::dimension_mismatch, "cosine dissimilarity of vectors of length " +
                                                   std::to_string(x1.size()) + " and " +
                                                   std::to_string(x2.size()));
  }
  const double s1 = squared_norm(x1);
  const double s2 = squared_norm(x2);
  if (s1 < kMinSquaredNorm || s2 < kMinSquaredNorm) {
    throw Error(ErrorCode::zero_norm, "cosine dissimilarity of a zero-norm vector");
  }
  return cosine_dissimilarity_cached(x1, s1, x2, s2);
}

Dissimilarity cluster_dissimilarity(std::span<const std::span<const double>> c1,
                                    std::span<const std::span<const double>> c2) {
  if (c1.empty() || c2.empty()) {
    throw Error(ErrorCode::invalid_argument, "complete linkage of an empty cluster");
  }
  Dissimilarity worst = 0.0;
  for (auto x : c1) {
    for (auto y : c2) worst = std::max(worst, cosine_dissimilarity(x, y));
  }
  return worst;
}

CondensedMatrix pairwise_dissimilarities(std::span<const std::span<const double>> vectors) {
  const std::size_t n = vectors.size();
  CondensedMatrix m(n);
  std::vector<double> sq(n);
  for (std::size_t i = 0; i < n; ++i) sq[i] = squared_norm(vectors[i]);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      m.at(i, j) = cosine_dissimilarity_cached(vectors[i], sq[i], vectors[j], sq[j]);
    }
  }
  return m;
}

}  // namespace redunda
