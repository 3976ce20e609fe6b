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
#include <string>
#include <string_view>
#include <vector>

namespace lit::text {

/// A word token: byte range [begin, end) in the source plus its case-folded form.
struct WordSpan {
  std::size_t begin = 0;
  std::size_t end = 0;
  std::string folded;
};

// Words are maximal runs of letters/digits; everything else separates them.
// Non-ASCII code points count as letters except for the common punctuation,
// symbol and space blocks.
std::vector<WordSpan> word_spans(std::string_view text);
std::vector<std::string> word_tokens(std::string_view text);

std::string case_fold(std::string_view text);

std::vector<std::string> split_whitespace(std::string_view text);
std::string join(const std::vector<std::string>& parts, std::string_view sep);

/// True if `word` (already folded) occurs as a whole token of `text`.
bool contains_token(std::string_view text, std::string_view folded_word);

}  // namespace lit::text
