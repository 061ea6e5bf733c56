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

#include <cstring>
#include <filesystem>
#include <functional>
#include <limits>
#include <random>

#include "oracles.hpp"
#include "redunda/dataset.hpp"
#include "redunda/digest.hpp"
#include "redunda/error.hpp"

using namespace redunda;

namespace {

template <typename T>
void put(std::string& s, T v) {
  for (std::size_t i = 0; i < sizeof(T); ++i) s.push_back(static_cast<char>((static_cast<std::uint64_t>(v) >> (8 * i)) & 0xFF));
}

void put_f32(std::string& s, float f) {
  std::uint32_t bits;
  std::memcpy(&bits, &f, 4);
  put<std::uint32_t>(s, bits);
}

// Hand-assembled file, independent of encode_binary.
std::string three_record_file() {
  std::string s = "REDE";
  put<std::uint32_t>(s, 1);
  put<std::uint32_t>(s, 0);
  put<std::uint64_t>(s, 3);
  put<std::uint32_t>(s, 2);
  const float v[3][2] = {{1, 0}, {0, 1}, {1, 1}};
  const std::uint32_t cls[3] = {0, 0, 1};
  for (int i = 0; i < 3; ++i) {
    put<std::uint32_t>(s, cls[i]);
    put_f32(s, v[i][0]);
    put_f32(s, v[i][1]);
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

TEST(Dataset, BinaryExample) {
  const auto ds = decode_binary(three_record_file());
  EXPECT_EQ(ds.dimension(), 2u);
  EXPECT_EQ(ds.size(), 3u);
  EXPECT_FALSE(ds.explicit_ids());
  ASSERT_EQ(ds.class_index().size(), 2u);
  EXPECT_EQ(ds.class_index().at(0), (std::vector<SampleId>{0, 1}));
  EXPECT_EQ(ds.class_index().at(1), (std::vector<SampleId>{2}));
}

TEST(Dataset, ClassView) {
  const auto ds = decode_binary(three_record_file());
  const auto c0 = class_view(ds, 0);
  ASSERT_EQ(c0.size(), 2u);
  EXPECT_EQ(c0[0].id, 0u);
  EXPECT_EQ(std::vector<double>(c0[0].vector.begin(), c0[0].vector.end()), (std::vector<double>{1, 0}));
  EXPECT_EQ(std::vector<double>(c0[1].vector.begin(), c0[1].vector.end()), (std::vector<double>{0, 1}));
  const auto c1 = class_view(ds, 1);
  ASSERT_EQ(c1.size(), 1u);
  EXPECT_EQ(c1[0].id, 2u);
  EXPECT_EQ(code_of([&] { class_view(ds, 9); }), ErrorCode::unknown_class);
}

TEST(Dataset, CanonicalEncodingMatchesHandBuiltFile) {
  const auto bytes = three_record_file();
  EXPECT_EQ(encode_binary(decode_binary(bytes)), bytes);
}

TEST(Dataset, CsvLine) {
  LoadOptions opts;
  opts.dimension = 3;
  const auto ds = decode_csv("7,2,0.5,0.5,0.5\n", opts);
  ASSERT_EQ(ds.size(), 1u);
  EXPECT_EQ(ds.sample_id(0), 7u);
  EXPECT_EQ(ds.class_id(0), 2u);
  EXPECT_EQ(std::vector<double>(ds.vector(0).begin(), ds.vector(0).end()), (std::vector<double>{0.5, 0.5, 0.5}));
}

TEST(Dataset, CsvDimensionMismatch) {
  LoadOptions opts;
  opts.dimension = 3;
  try {
    decode_csv("1,0,1,1,1\n2,0,0.1,0.2,0.3,0.4\n", opts);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::dimension_mismatch);
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
  }
  // Without a declared dimension the first record decides.
  EXPECT_EQ(code_of([] { decode_csv("1,0,1,1\n2,0,1,1,1\n"); }), ErrorCode::dimension_mismatch);
}

TEST(Dataset, CsvHeaderAndBlankLines) {
  const auto ds = decode_csv("sample_id,class_id,v1,v2\n\n0,1,1.5,-2\r\n1,1,3e-2,4\n");
  EXPECT_EQ(ds.size(), 2u);
  EXPECT_EQ(ds.vector(1)[0], 3e-2);
  // Only the first line may be a header.
  EXPECT_EQ(code_of([] { decode_csv("0,1,1,2\nx,1,1,2\n"); }), ErrorCode::format_error);
}

TEST(Dataset, RejectsNonFiniteWithRecordIndex) {
  try {
    decode_csv("0,0,1,2\n1,0,nan,2\n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::non_finite);
    EXPECT_NE(std::string(e.what()).find("record 1"), std::string::npos);
  }
  std::string bin = three_record_file();
  const float inf = std::numeric_limits<float>::infinity();
  std::memcpy(bin.data() + 24 + 2 * 12 + 4, &inf, 4);  // record 2, first component
  try {
    decode_binary(bin);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::non_finite);
    EXPECT_NE(std::string(e.what()).find("record 2"), std::string::npos);
  }
}

TEST(Dataset, RejectsZeroVectorsAndDuplicates) {
  EXPECT_EQ(code_of([] { decode_csv("0,0,0,0\n"); }), ErrorCode::zero_norm);
  EXPECT_EQ(code_of([] { decode_csv("0,0,1e-31,0\n"); }), ErrorCode::zero_norm);
  EXPECT_EQ(code_of([] { decode_csv("5,0,1,0\n5,1,0,1\n"); }), ErrorCode::duplicate_id);
}

TEST(Dataset, RejectsMalformedBinary) {
  auto bytes = three_record_file();
  EXPECT_EQ(code_of([&] { decode_binary(bytes.substr(0, bytes.size() - 1)); }), ErrorCode::format_error);
  auto bad_magic = bytes;
  bad_magic[0] = 'X';
  EXPECT_EQ(code_of([&] { decode_binary(bad_magic); }), ErrorCode::format_error);
  auto bad_version = bytes;
  bad_version[4] = 2;
  EXPECT_EQ(code_of([&] { decode_binary(bad_version); }), ErrorCode::format_error);
  auto bad_flags = bytes;
  bad_flags[8] = 4;
  EXPECT_EQ(code_of([&] { decode_binary(bad_flags); }), ErrorCode::format_error);
  auto huge_count = bytes;
  huge_count[19] = 0x7F;
  EXPECT_EQ(code_of([&] { decode_binary(huge_count); }), ErrorCode::format_error);
  EXPECT_EQ(code_of([] { decode_binary("RED"); }), ErrorCode::format_error);
}

TEST(Dataset, ExplicitIdsSurviveBinary) {
  const auto ds = decode_csv("10,0,1,0\n3,0,0,1\n42,7,1,1\n");
  EXPECT_TRUE(ds.explicit_ids());
  const auto back = decode_binary(encode_binary(ds));
  EXPECT_EQ(back, ds);
  EXPECT_EQ(back.class_index().at(0), (std::vector<SampleId>{10, 3}));
}

TEST(Dataset, BinaryRoundTripIsByteIdentical) {
  std::mt19937_64 rng(99);
  for (int t = 0; t < 20; ++t) {
    const auto ds = redunda::testing::random_dataset(rng, 1 + t % 4, 1 + t % 9, 1 + t % 13);
    const auto bytes = encode_binary(ds);
    const auto again = decode_binary(bytes);
    EXPECT_EQ(again, ds);
    EXPECT_EQ(encode_binary(again), bytes);
    std::size_t total = 0;
    for (const auto& [c, ids] : again.class_index()) total += ids.size();
    EXPECT_EQ(total, again.size());
  }
}

TEST(Dataset, FileLoadIsDeterministicAndDigested) {
  const auto dir = std::filesystem::temp_directory_path() / "redunda_dataset_test";
  std::filesystem::create_directories(dir);
  const auto bin = dir / "d.bin";
  write_file(bin, three_record_file());
  const auto a = load_dataset(bin, DatasetFormat::binary);
  const auto b = load_dataset(bin, DatasetFormat::binary);
  EXPECT_EQ(a, b);
  EXPECT_EQ(a.source_digest(), sha256_hex(three_record_file()));
  EXPECT_EQ(a.source_digest().size(), 64u);

  const auto csv = dir / "d.csv";
  write_dataset(a, csv, DatasetFormat::csv);
  const auto c = load_dataset(csv, format_from_path(csv));
  EXPECT_EQ(encode_binary(c), encode_binary(a));
  EXPECT_EQ(code_of([&] { load_dataset(dir / "missing.bin", DatasetFormat::binary); }), ErrorCode::io_error);
  LoadOptions wrong_dim;
  wrong_dim.dimension = 5;
  EXPECT_EQ(code_of([&] { load_dataset(bin, DatasetFormat::binary, wrong_dim); }), ErrorCode::dimension_mismatch);
  std::filesystem::remove_all(dir);
}

TEST(Dataset, Sha256KnownAnswer) {
  EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}
