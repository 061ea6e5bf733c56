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

#include <array>
#include <cstdint>
#include <limits>
#include <string_view>

namespace redunda {

/// Philox4x32-10 counter-based block function (Salmon et al., Random123).
struct Philox4x32 {
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Counter block(Counter counter, Key key) noexcept;
};

// Counter word 3 separates the engine's independent uses of one seed.
enum class StreamPurpose : std::uint32_t { subset_sampling = 0, synthesis = 1 };

/// Deterministic stream over Philox4x32-10. The 64-bit seed is the key;
/// counter words 2 and 3 carry the substream id (the class id) and the
/// purpose, words 0-1 the block index. Results depend only on
/// (seed, substream, purpose, draw index), never on threads or platform.
///
/// Satisfies UniformRandomBitGenerator with 32-bit output.
class PhiloxStream {
 public:
  using result_type = std::uint32_t;

  static constexpr std::string_view kName = "philox4x32-10/v1";

  PhiloxStream(std::uint64_t seed, std::uint32_t substream, StreamPurpose purpose) noexcept;

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept;
  std::uint64_t next_u64() noexcept;
  // Uniform on [0, 1) with 53 random bits.
  double next_double() noexcept;
  // Uniform on [0, bound), unbiased (multiply-shift with rejection).
  std::uint64_t uniform_below(std::uint64_t bound) noexcept;
  // Standard normal via Box-Muller; one draw consumes two doubles.
  double normal() noexcept;

 private:
  void refill() noexcept;

  Philox4x32::Key key_;
  std::uint32_t substream_;
  std::uint32_t purpose_;
  std::uint64_t block_index_ = 0;
  Philox4x32::Counter buffer_{};
  unsigned used_ = 4;
};

}  // namespace redunda
