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

#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace lit {

enum class ErrorCode {
  kInvalidArgument,
  kValidation,
  kNotFound,
  kNotApplicable,
  kNotImplemented,
  kRetryable,
  kConflict,
  kInternal,
};

/// Machine-readable name, e.g. "not_applicable". Used verbatim in API errors.
std::string_view error_code_name(ErrorCode code);

/// One failed field check: which field, what kind was expected, what was found.
struct FieldDiagnostic {
  std::string field;
  std::string expected;
  std::string found;
  std::string reason;

  std::string to_string() const;
  bool operator==(const FieldDiagnostic&) const = default;
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, std::string field = {})
      : std::runtime_error(message), code_(code), field_(std::move(field)) {}

  ErrorCode code() const { return code_; }
  const std::string& field() const { return field_; }

  const std::vector<FieldDiagnostic>& diagnostics() const { return diagnostics_; }
  Error& with_diagnostics(std::vector<FieldDiagnostic> d) {
    diagnostics_ = std::move(d);
    return *this;
  }

  // Half-open range of example indices a retryable batch failure covers.
  const std::optional<std::pair<std::size_t, std::size_t>>& index_range() const {
    return index_range_;
  }
  Error& with_index_range(std::size_t begin, std::size_t end) {
    index_range_ = std::make_pair(begin, end);
    return *this;
  }

 private:
  ErrorCode code_;
  std::string field_;
  std::vector<FieldDiagnostic> diagnostics_;
  std::optional<std::pair<std::size_t, std::size_t>> index_range_;
};

}  // namespace lit
