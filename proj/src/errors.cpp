// Copyright 2026 The lit-cpp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "lit/errors.hpp"

namespace lit {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid_argument";
    case ErrorCode::kValidation: return "validation_error";
    case ErrorCode::kNotFound: return "not_found";
    case ErrorCode::kNotApplicable: return "not_applicable";
    case ErrorCode::kNotImplemented: return "not_implemented";
    case ErrorCode::kRetryable: return "retryable";
    case ErrorCode::kConflict: return "conflict";
    case ErrorCode::kInternal: return "internal";
  }
  return "internal";
}

std::string FieldDiagnostic::to_string() const {
  std::string out = "field '" + field + "': " + reason;
  if (!expected.empty() || !found.empty()) {
    out += " (expected " + expected + ", found " + found + ")";
  }
  return out;
}

}  // namespace lit
