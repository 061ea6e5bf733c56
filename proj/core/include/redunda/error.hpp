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

#include <stdexcept>
#include <string>
#include <string_view>

namespace redunda {

enum class ErrorCode {
  invalid_argument,
  io_error,
  format_error,
  dimension_mismatch,
  non_finite,
  duplicate_id,
  zero_norm,
  unknown_class,
  out_of_range,
  memory_cap,
  degenerate_centroid,
  margin_unsatisfiable,
  manifest_mismatch,
};

std::string_view to_string(ErrorCode code) noexcept;

// Every failure in the engine surfaces as this exception. The CLI renders it
// as a single `code: message` line.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace redunda
