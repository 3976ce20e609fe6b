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

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "lit/spec.hpp"
#include "lit/value.hpp"

namespace lit {

enum class ExampleSource { kLoaded, kManualEdit, kGenerator };

std::string_view source_name(ExampleSource source);
ExampleSource parse_source(std::string_view name);

struct ExampleMeta {
  ExampleSource source = ExampleSource::kLoaded;
  std::optional<std::string> parent_id;
  std::optional<std::string> generator_name;
  std::optional<std::string> rule;

  bool operator==(const ExampleMeta&) const = default;
};

Json meta_to_json(const ExampleMeta& meta);
ExampleMeta meta_from_json(const Json& j);

/// Immutable datapoint. `id` is always canonical_hash(values).
struct Example {
  std::string id;
  Json values;
  ExampleMeta meta;
};

using ExamplePtr = std::shared_ptr<const Example>;

ExamplePtr make_example(Json values, ExampleMeta meta = {});

Json example_to_json(const Example& example);

struct Slice {
  std::string name;
  std::vector<std::string> ids;
};

enum class Comparator { kEq, kNe, kLt, kLe, kGt, kGe };

std::optional<Comparator> parse_comparator(std::string_view op);

struct ValuePredicate {
  std::string field;
  Comparator op = Comparator::kEq;
  Json value;
};

struct TokenSearch {
  std::string field;
  std::string token;
};

struct FilterQuery {
  std::optional<TokenSearch> token_search;
  std::vector<ValuePredicate> predicates;
};

struct NewExample {
  Json values;
  ExampleMeta meta;
};

struct CommitResult {
  // One id per input, in input order, including skipped duplicates.
  std::vector<std::string> ids;
  std::vector<std::string> skipped;
  // Dataset version right after this commit.
  std::uint64_t version = 0;
};

/// A named collection of examples sharing one spec, with named slices.
///
/// Mutation goes through commit() and the slice operations only; those take
/// an exclusive lock, reads take a shared lock.
class Dataset {
 public:
  static constexpr std::size_t kSoftCapacity = 10000;

  Dataset(std::string name, Spec spec);
  // Validates every example and rejects duplicate ids.
  Dataset(std::string name, Spec spec, std::vector<Example> examples);

  Dataset(Dataset&& other) noexcept;
  Dataset& operator=(Dataset&& other) noexcept;
  Dataset(const Dataset&) = delete;
  Dataset& operator=(const Dataset&) = delete;

  const std::string& name() const { return name_; }
  const Spec& spec() const { return spec_; }

  std::size_t size() const;
  // Number of commits applied since load.
  std::uint64_t version() const;
  bool over_soft_capacity() const { return size() > kSoftCapacity; }

  std::vector<ExamplePtr> examples() const;
  std::vector<std::string> ids() const;
  ExamplePtr find(std::string_view id) const;
  // Throws Error(kNotFound) naming the first unknown id.
  std::vector<ExamplePtr> get(std::span<const std::string> ids) const;

  // Ids of matching examples in dataset order.
  std::vector<std::string> filter(const FilterQuery& query) const;

  // All-or-nothing: any validation failure rejects the batch. Duplicates of
  // existing ids are skipped and reported. Always bumps version by one.
  CommitResult commit(std::vector<NewExample> batch);

  void save_slice(const std::string& name, std::vector<std::string> ids, bool overwrite = false);
  std::vector<Slice> list_slices() const;
  std::optional<Slice> slice(std::string_view name) const;
  bool delete_slice(std::string_view name);

  // Session file: {"spec":…, "examples":[{"id","values","meta"}], "slices":{…}}.
  Json to_session_json() const;
  static Dataset from_session_json(std::string name, const Json& session);
  void save_session(const std::filesystem::path& path) const;
  static Dataset load_session(std::string name, const std::filesystem::path& path);

 private:
  void insert_locked(ExamplePtr example);

  std::string name_;
  Spec spec_;
  mutable std::shared_mutex mutex_;
  std::vector<ExamplePtr> examples_;
  std::unordered_map<std::string, std::size_t> index_;
  std::map<std::string, std::vector<std::string>> slices_;
  std::uint64_t version_ = 0;
};

struct TsvOptions {
  bool skip_header = false;
};

/// Column index per spec field. Scalar/RegressionScore cells are parsed as
/// decimal reals, everything else is taken verbatim.
using ColumnMap = std::vector<std::pair<std::string, std::size_t>>;

Dataset load_tsv(const std::filesystem::path& path, std::string name, const Spec& spec,
                 const ColumnMap& columns, TsvOptions options = {});
Dataset load_jsonl(const std::filesystem::path& path, std::string name, const Spec& spec);

}  // namespace lit
