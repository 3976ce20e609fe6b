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

#include <string>
#include <string_view>

#include "json.hpp"

namespace lit {

// Insertion-ordered so that specs and API responses serialize byte-stably.
using Json = nlohmann::ordered_json;

/// Canonical serialization used for content ids: UTF-8 JSON, object keys
/// sorted by code point, no whitespace, integers in plain decimal and reals
/// in shortest round-trip form. Throws Error(kInvalidArgument) on NaN/Inf.
std::string canonical_json(const Json& value);

/// Lower-case hex SHA-256 of raw bytes.
std::string sha256_hex(std::string_view bytes);

/// Content id of an example value map: sha256_hex(canonical_json(values)).
std::string canonical_hash(const Json& values);

/// Compact, insertion-ordered dump. Non-ASCII is kept as UTF-8.
std::string dump_compact(const Json& value);

}  // namespace lit
