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

#include <atomic>
#include <compare>
#include <cstdint>
#include <list>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lit/dataset.hpp"
#include "lit/model.hpp"

namespace lit {

struct CacheKey {
  std::string model_name;
  std::string example_id;

  auto operator<=>(const CacheKey&) const = default;
};

struct CacheStats {
  std::uint64_t hits = 0;
  std::uint64_t misses = 0;
  std::uint64_t entries = 0;
  std::uint64_t evictions = 0;

  Json to_json() const;
};

/// LRU cache of full model predictions keyed by (model name, example id).
///
/// Concurrent misses on the same key may both run the model; the first value
/// stored wins and every caller receives that value.
class PredictionCache {
 public:
  static constexpr std::size_t kDefaultCapacity = 50000;

  explicit PredictionCache(std::size_t capacity = kDefaultCapacity);

  // Predictions in input order. Misses are predicted in one batch; nothing
  // is stored if that batch fails.
  std::vector<Prediction> cached_predict(const ModelHandle& model,
                                         std::span<const ExamplePtr> examples,
                                         const std::vector<std::string>* requested_fields = nullptr);

  // Evicts everything, or only one model's entries. Returns the count removed.
  std::size_t invalidate(const std::optional<std::string>& model_name = std::nullopt);

  CacheStats stats() const;
  std::size_t capacity() const { return capacity_; }

 private:
  using Entry = std::pair<CacheKey, std::shared_ptr<const Prediction>>;

  std::shared_ptr<const Prediction> lookup(const CacheKey& key);
  std::shared_ptr<const Prediction> insert(CacheKey key, std::shared_ptr<const Prediction> value);

  const std::size_t capacity_;
  mutable std::mutex mutex_;
  std::list<Entry> lru_;  // front = most recently used
  std::map<CacheKey, std::list<Entry>::iterator> index_;
  std::atomic<std::uint64_t> hits_{0};
  std::atomic<std::uint64_t> misses_{0};
  std::atomic<std::uint64_t> evictions_{0};
};

}  // namespace lit
