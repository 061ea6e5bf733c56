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

#include "redunda/dataset.hpp"

#include <charconv>
#include <cmath>
#include <cstring>
#include <limits>

#include "redunda/digest.hpp"
#include "redunda/error.hpp"
#include "redunda/metric.hpp"

namespace redunda {

namespace {

constexpr char kMagic[4] = {'R', 'E', 'D', 'E'};
constexpr std::uint32_t kVersion = 1;
constexpr std::uint32_t kFlagExplicitIds = 1u;
constexpr std::size_t kHeaderBytes = 4 + 4 + 4 + 8 + 4;

template <typename T>
void put_le(std::string& out, T value) {
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    out.push_back(static_cast<char>((value >> (8 * i)) & 0xFF));
  }
}

template <typename T>
T get_le(const unsigned char* p) {
  T value = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) value |= static_cast<T>(p[i]) << (8 * i);
  return value;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

template <typename T>
bool parse_number(std::string_view field, T& out) {
  field = trim(field);
  if (field.empty()) return false;
  if constexpr (std::is_floating_point_v<T>) {
    if (field.front() == '+') field.remove_prefix(1);
  }
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), out);
  return ec == std::errc() && ptr == field.data() + field.size();
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    auto comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return fields;
}

}  // namespace

std::optional<DatasetFormat> parse_format(std::string_view name) {
  if (name == "binary" || name == "bin") return DatasetFormat::binary;
  if (name == "csv") return DatasetFormat::csv;
  return std::nullopt;
}

DatasetFormat format_from_path(const std::filesystem::path& path) {
  return path.extension() == ".csv" ? DatasetFormat::csv : DatasetFormat::binary;
}

EmbeddingDataset::EmbeddingDataset(std::size_t dimension, std::vector<EmbeddingRecord> records,
                                   bool force_explicit_ids, std::string source_digest)
    : dimension_(dimension) {
  if (dimension_ == 0) throw Error(ErrorCode::format_error, "dimension must be at least 1");
  ids_.reserve(records.size());
  classes_.reserve(records.size());
  data_.reserve(records.size() * dimension_);
  row_by_id_.reserve(records.size());

  bool ordinal_ids = true;
  for (std::size_t row = 0; row < records.size(); ++row) {
    const auto& r = records[row];
    if (r.vector.size() != dimension_) {
      throw Error(ErrorCode::dimension_mismatch,
                  "record " + std::to_string(row) + " has " + std::to_string(r.vector.size()) +
                      " components, expected " + std::to_string(dimension_));
    }
    for (double v : r.vector) {
      if (!std::isfinite(v)) {
        throw Error(ErrorCode::non_finite, "record " + std::to_string(row) + " has a non-finite component");
      }
    }
    if (squared_norm(r.vector) < kMinSquaredNorm) {
      throw Error(ErrorCode::zero_norm, "record " + std::to_string(row) + " is a zero vector");
    }
    if (!row_by_id_.emplace(r.sample_id, row).second) {
      throw Error(ErrorCode::duplicate_id, "duplicate sample_id " + std::to_string(r.sample_id) +
                                               " at record " + std::to_string(row));
    }
    ordinal_ids = ordinal_ids && r.sample_id == row;
    ids_.push_back(r.sample_id);
    classes_.push_back(r.class_id);
    data_.insert(data_.end(), r.vector.begin(), r.vector.end());
    class_index_[r.class_id].push_back(r.sample_id);
  }
  explicit_ids_ = force_explicit_ids || !ordinal_ids;
  source_digest_ = source_digest.empty() ? sha256_hex(encode_binary(*this)) : std::move(source_digest);
}

std::optional<std::size_t> EmbeddingDataset::row_of(SampleId id) const {
  auto it = row_by_id_.find(id);
  if (it == row_by_id_.end()) return std::nullopt;
  return it->second;
}

std::vector<ClassId> EmbeddingDataset::classes() const {
  std::vector<ClassId> out;
  out.reserve(class_index_.size());
  for (const auto& [c, ids] : class_index_) out.push_back(c);
  return out;
}

EmbeddingDataset decode_binary(std::string_view bytes, std::string source_digest) {
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
  if (bytes.size() < kHeaderBytes || std::memcmp(p, kMagic, 4) != 0) {
    throw Error(ErrorCode::format_error, "missing REDE magic");
  }
  const auto version = get_le<std::uint32_t>(p + 4);
  if (version != kVersion) {
    throw Error(ErrorCode::format_error, "unsupported version " + std::to_string(version));
  }
  const auto flags = get_le<std::uint32_t>(p + 8);
  if ((flags & ~kFlagExplicitIds) != 0) {
    throw Error(ErrorCode::format_error, "unknown header flags " + std::to_string(flags));
  }
  const bool explicit_ids = (flags & kFlagExplicitIds) != 0;
  const auto count = get_le<std::uint64_t>(p + 12);
  const auto dim = get_le<std::uint32_t>(p + 20);
  if (dim == 0) throw Error(ErrorCode::format_error, "header declares dimension 0");

  const std::size_t record_bytes = (explicit_ids ? 8 : 0) + 4 + 4 * static_cast<std::size_t>(dim);
  const std::size_t payload = bytes.size() - kHeaderBytes;
  if (count > payload / record_bytes || payload != count * record_bytes) {
    throw Error(ErrorCode::format_error, "payload of " + std::to_string(payload) +
                                             " bytes does not hold " + std::to_string(count) +
                                             " records of dimension " + std::to_string(dim));
  }

  std::vector<EmbeddingRecord> records(count);
  const unsigned char* cursor = p + kHeaderBytes;
  for (std::uint64_t i = 0; i < count; ++i) {
    auto& r = records[i];
    if (explicit_ids) {
      r.sample_id = get_le<std::uint64_t>(cursor);
      cursor += 8;
    } else {
      r.sample_id = i;
    }
    r.class_id = get_le<std::uint32_t>(cursor);
    cursor += 4;
    r.vector.resize(dim);
    for (std::uint32_t j = 0; j < dim; ++j) {
      const auto bits = get_le<std::uint32_t>(cursor);
      cursor += 4;
      float f;
      std::memcpy(&f, &bits, sizeof f);
      r.vector[j] = static_cast<double>(f);
    }
  }
  return EmbeddingDataset(dim, std::move(records), explicit_ids, std::move(source_digest));
}

EmbeddingDataset decode_csv(std::string_view text, const LoadOptions& options,
                            std::string source_digest) {
  std::vector<EmbeddingRecord> records;
  std::optional<std::size_t> dim = options.dimension;
  std::size_t line_no = 0;
  bool first_content_line = true;

  while (!text.empty()) {
    auto eol = text.find('\n');
    auto line = trim(text.substr(0, eol));
    text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
    ++line_no;
    if (line.empty()) continue;

    auto fields = split_fields(line);
    const std::string where = "line " + std::to_string(line_no);
    if (first_content_line) {
      first_content_line = false;
      double probe;
      if (!parse_number(fields[0], probe)) continue;  // header
    }
    if (fields.size() < 3) {
      throw Error(ErrorCode::format_error, where + ": expected sample_id,class_id,v1,...");
    }
    EmbeddingRecord r;
    if (!parse_number(fields[0], r.sample_id)) {
      throw Error(ErrorCode::format_error, where + ": bad sample_id");
    }
    if (!parse_number(fields[1], r.class_id)) {
      throw Error(ErrorCode::format_error, where + ": bad class_id");
    }
    const std::size_t n_values = fields.size() - 2;
    if (!dim) dim = n_values;
    if (n_values != *dim) {
      throw Error(ErrorCode::dimension_mismatch, where + ": " + std::to_string(n_values) +
                                                     " components, expected " + std::to_string(*dim));
    }
    r.vector.resize(n_values);
    for (std::size_t j = 0; j < n_values; ++j) {
      auto field = trim(fields[j + 2]);
      double v;
      if (!parse_number(field, v)) {
        // from_chars accepts "nan"/"inf"; anything else is malformed.
        throw Error(ErrorCode::format_error, where + ": bad component '" + std::string(field) + "'");
      }
      if (!std::isfinite(v)) {
        throw Error(ErrorCode::non_finite, where + " (record " + std::to_string(records.size()) +
                                               "): non-finite component");
      }
      r.vector[j] = v;
    }
    records.push_back(std::move(r));
  }
  if (!dim) throw Error(ErrorCode::format_error, "csv holds no records");
  return EmbeddingDataset(*dim, std::move(records), false, std::move(source_digest));
}

EmbeddingDataset load_dataset(const std::filesystem::path& path, DatasetFormat format,
                              const LoadOptions& options) {
  const std::string bytes = read_file(path);
  std::string digest = sha256_hex(bytes);
  if (format == DatasetFormat::binary) {
    auto ds = decode_binary(bytes, std::move(digest));
    if (options.dimension && *options.dimension != ds.dimension()) {
      throw Error(ErrorCode::dimension_mismatch,
                  "file dimension " + std::to_string(ds.dimension()) + ", expected " +
                      std::to_string(*options.dimension));
    }
    return ds;
  }
  return decode_csv(bytes, options, std::move(digest));
}

std::string encode_binary(const EmbeddingDataset& ds) {
  if (ds.dimension() > std::numeric_limits<std::uint32_t>::max()) {
    throw Error(ErrorCode::format_error, "dimension does not fit in u32");
  }
  const bool explicit_ids = ds.explicit_ids();
  std::string out;
  out.reserve(kHeaderBytes + ds.size() * ((explicit_ids ? 8 : 0) + 4 + 4 * ds.dimension()));
  out.append(kMagic, 4);
  put_le<std::uint32_t>(out, kVersion);
  put_le<std::uint32_t>(out, explicit_ids ? kFlagExplicitIds : 0u);
  put_le<std::uint64_t>(out, ds.size());
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(ds.dimension()));
  for (std::size_t row = 0; row < ds.size(); ++row) {
    if (explicit_ids) put_le<std::uint64_t>(out, ds.sample_id(row));
    put_le<std::uint32_t>(out, ds.class_id(row));
    for (double v : ds.vector(row)) {
      const float f = static_cast<float>(v);
      std::uint32_t bits;
      std::memcpy(&bits, &f, sizeof bits);
      put_le<std::uint32_t>(out, bits);
    }
  }
  return out;
}

std::string encode_csv(const EmbeddingDataset& ds) {
  std::string out;
  char buf[64];
  for (std::size_t row = 0; row < ds.size(); ++row) {
    out += std::to_string(ds.sample_id(row));
    out += ',';
    out += std::to_string(ds.class_id(row));
    for (double v : ds.vector(row)) {
      auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
      out += ',';
      out.append(buf, ptr);
    }
    out += '\n';
  }
  return out;
}

void write_dataset(const EmbeddingDataset& ds, const std::filesystem::path& path,
                   DatasetFormat format) {
  write_file(path, format == DatasetFormat::binary ? encode_binary(ds) : encode_csv(ds));
}

std::vector<Point> class_view(const EmbeddingDataset& ds, ClassId class_id) {
  auto it = ds.class_index().find(class_id);
  if (it == ds.class_index().end()) {
    throw Error(ErrorCode::unknown_class, "class " + std::to_string(class_id) + " not in dataset");
  }
  std::vector<Point> out;
  out.reserve(it->second.size());
  for (SampleId id : it->second) {
    out.push_back({id, ds.vector(*ds.row_of(id))});
  }
  return out;
}

}  // namespace redunda
