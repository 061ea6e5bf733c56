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

#include "redunda/error.hpp"

namespace redunda {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::invalid_argument: return "invalid_argument";
    case ErrorCode::io_error: return "io_error";
    case ErrorCode::format_error: return "format_error";
    case ErrorCode::dimension_mismatch: return "dimension_mismatch";
    case ErrorCode::non_finite: return "non_finite";
    case ErrorCode::duplicate_id: return "duplicate_id";
    case ErrorCode::zero_norm: return "zero_norm";
    case ErrorCode::unknown_class: return "unknown_class";
    case ErrorCode::out_of_range: return "out_of_range";
    case ErrorCode::memory_cap: return "memory_cap";
    case ErrorCode::degenerate_centroid: return "degenerate_centroid";
    case ErrorCode::margin_unsatisfiable: return "margin_unsatisfiable";
    case ErrorCode::manifest_mismatch: return "manifest_mismatch";
  }
  return "unknown";
}

}  // namespace redunda
