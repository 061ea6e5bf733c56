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
#include <span>
#include <vector>

namespace redunda {

// Cosine dissimilarity, in [0, 2].
using Dissimilarity = double;

/// Inner product with a fixed four-lane summation order. Symmetric in its
/// arguments bit-for-bit, and dot(x, x) == squared_norm(x).
double dot(std::span<const double> a, std::span<const double> b) noexcept;
double squared_norm(std::span<const double> a) noexcept;

/// 1 - <x1, x2> / (|x1| |x2|) from precomputed squared norms, clamped to
/// [0, 2]. Identical vectors give exactly 0.
Dissimilarity cosine_dissimilarity_cached(std::span<const double> x1, double sq_norm1,
                                          std::span<const double> x2, double sq_norm2) noexcept;

/// Checked form: throws dimension_mismatch or zero_norm.
Dissimilarity cosine_dissimilarity(std::span<const double> x1, std::span<const double> x2);

/// Complete linkage: the largest dissimilarity over all cross pairs.
/// Throws invalid_argument when either cluster is empty.
Dissimilarity cluster_dissimilarity(std::span<const std::span<const double>> c1,
                                    std::span<const std::span<const double>> c2);

/// Upper-triangular pairwise dissimilarities without the diagonal, stored
/// row-major: (i, j), i < j, lives at i*(2n-i-1)/2 + (j-i-1).
class CondensedMatrix {
 public:
  CondensedMatrix() = default;
  explicit CondensedMatrix(std::size_t n) : n_(n), values_(n < 2 ? 0 : n * (n - 1) / 2, 0.0) {}

  static std::size_t bytes_for(std::size_t n) noexcept {
    return (n < 2 ? 0 : n * (n - 1) / 2) * sizeof(double);
  }

  std::size_t n() const noexcept { return n_; }

  std::size_t index(std::size_t i, std::size_t j) const noexcept {
    if (i > j) std::swap(i, j);
    return i * (2 * n_ - i - 1) / 2 + (j - i - 1);
  }
  double operator()(std::size_t i, std::size_t j) const noexcept { return values_[index(i, j)]; }
  double& at(std::size_t i, std::size_t j) noexcept { return values_[index(i, j)]; }

  std::span<const double> values() const noexcept { return values_; }

 private:
  std::size_t n_ = 0;
  std::vector<double> values_;
};

/// All pairwise cosine dissimilarities of `vectors`. Caller guarantees equal
/// dimensions and non-zero norms.
CondensedMatrix pairwise_dissimilarities(std::span<const std::span<const double>> vectors);

}  // namespace redunda
