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
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace redunda {

using SampleId = std::uint64_t;
using ClassId = std::uint32_t;

// Squared norms below this are treated as zero vectors (norm < 1e-30).
inline constexpr double kMinSquaredNorm = 1e-60;

struct EmbeddingRecord {
  SampleId sample_id = 0;
  ClassId class_id = 0;
  std::vector<double> vector;
};

// A borrowed view of one sample: its id and its coordinates inside the
// owning dataset. Valid as long as the dataset is alive.
struct Point {
  SampleId id = 0;
  std::span<const double> vector;
};

enum class DatasetFormat { binary, csv };

std::optional<DatasetFormat> parse_format(std::string_view name);
// ".csv" -> csv, anything else -> binary.
DatasetFormat format_from_path(const std::filesystem::path& path);

/// Labeled embedding vectors of a fixed dimension, immutable after
/// construction.
///
/// Vectors are held as row-major doubles regardless of the on-disk precision.
/// Construction validates every invariant: dimension >= 1, each vector has
/// exactly `dimension` finite components with non-zero norm, and sample ids
/// are unique. Throws redunda::Error on violation.
class EmbeddingDataset {
 public:
  /// `force_explicit_ids` keeps ids in the binary encoding even when they
  /// equal record ordinals. `source_digest` is the hex SHA-256 of the file the
  /// records came from; when empty, the digest of the canonical binary
  /// encoding is used instead.
  EmbeddingDataset(std::size_t dimension, std::vector<EmbeddingRecord> records,
                   bool force_explicit_ids = false, std::string source_digest = {});

  std::size_t dimension() const noexcept { return dimension_; }
  std::size_t size() const noexcept { return ids_.size(); }

  SampleId sample_id(std::size_t row) const { return ids_.at(row); }
  ClassId class_id(std::size_t row) const { return classes_.at(row); }
  std::span<const double> vector(std::size_t row) const {
    return {data_.data() + row * dimension_, dimension_};
  }

  std::optional<std::size_t> row_of(SampleId id) const;

  /// class_id -> sample ids in file order.
  const std::map<ClassId, std::vector<SampleId>>& class_index() const noexcept {
    return class_index_;
  }
  std::vector<ClassId> classes() const;
  bool has_class(ClassId c) const { return class_index_.count(c) != 0; }

  bool explicit_ids() const noexcept { return explicit_ids_; }
  const std::string& source_digest() const noexcept { return source_digest_; }

  friend bool operator==(const EmbeddingDataset& a, const EmbeddingDataset& b) {
    return a.dimension_ == b.dimension_ && a.ids_ == b.ids_ && a.classes_ == b.classes_ &&
           a.data_ == b.data_ && a.explicit_ids_ == b.explicit_ids_;
  }

 private:
  std::size_t dimension_;
  std::vector<SampleId> ids_;
  std::vector<ClassId> classes_;
  std::vector<double> data_;
  std::unordered_map<SampleId, std::size_t> row_by_id_;
  std::map<ClassId, std::vector<SampleId>> class_index_;
  bool explicit_ids_ = false;
  std::string source_digest_;
};

struct LoadOptions {
  // Required vector length; for csv the first record decides when unset.
  std::optional<std::size_t> dimension;
};

EmbeddingDataset load_dataset(const std::filesystem::path& path, DatasetFormat format,
                              const LoadOptions& options = {});
EmbeddingDataset decode_binary(std::string_view bytes, std::string source_digest = {});
EmbeddingDataset decode_csv(std::string_view text, const LoadOptions& options = {},
                            std::string source_digest = {});

/// Canonical little-endian "REDE" v1 encoding. Components are narrowed to
/// float32, so decode(encode(ds)) is exact only for float32-representable data.
std::string encode_binary(const EmbeddingDataset& ds);
/// `sample_id,class_id,v1,...` lines, components printed with 17 significant
/// digits, no header.
std::string encode_csv(const EmbeddingDataset& ds);

void write_dataset(const EmbeddingDataset& ds, const std::filesystem::path& path,
                   DatasetFormat format);

/// Records of one class in file order. Throws unknown_class.
std::vector<Point> class_view(const EmbeddingDataset& ds, ClassId class_id);

}  // namespace redunda
