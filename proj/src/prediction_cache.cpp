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

#include "lit/prediction_cache.hpp"

namespace lit {

Json CacheStats::to_json() const {
  Json j = Json::object();
  j["hits"] = hits;
  j["misses"] = misses;
  j["entries"] = entries;
  j["evictions"] = evictions;
  return j;
}

PredictionCache::PredictionCache(std::size_t capacity) : capacity_(capacity) {
  if (capacity_ == 0) throw Error(ErrorCode::kInvalidArgument, "cache capacity must be positive");
}

std::shared_ptr<const Prediction> PredictionCache::lookup(const CacheKey& key) {
  std::lock_guard lock(mutex_);
  auto it = index_.find(key);
  if (it == index_.end()) {
    misses_.fetch_add(1, std::memory_order_relaxed);
    return nullptr;
  }
  hits_.fetch_add(1, std::memory_order_relaxed);
  lru_.splice(lru_.begin(), lru_, it->second);
  return it->second->second;
}

std::shared_ptr<const Prediction> PredictionCache::insert(CacheKey key,
                                                          std::shared_ptr<const Prediction> value) {
  std::lock_guard lock(mutex_);
  if (auto it = index_.find(key); it != index_.end()) {
    lru_.splice(lru_.begin(), lru_, it->second);
    return it->second->second;
  }
  lru_.emplace_front(key, std::move(value));
  index_.emplace(std::move(key), lru_.begin());
  while (lru_.size() > capacity_) {
    index_.erase(lru_.back().first);
    lru_.pop_back();
    evictions_.fetch_add(1, std::memory_order_relaxed);
  }
  return lru_.front().second;
}

std::vector<Prediction> PredictionCache::cached_predict(
    const ModelHandle& model, std::span<const ExamplePtr> examples,
    const std::vector<std::string>* requested_fields) {
  std::vector<std::shared_ptr<const Prediction>> found(examples.size());
  std::vector<ExamplePtr> miss_examples;
  std::vector<std::size_t> miss_positions;
  // Repeated ids within one batch are predicted once.
  std::map<std::string, std::size_t> miss_slot;
  std::vector<std::size_t> slot_of(examples.size(), 0);

  for (std::size_t i = 0; i < examples.size(); ++i) {
    const auto& id = examples[i]->id;
    if (auto it = miss_slot.find(id); it != miss_slot.end()) {
      slot_of[i] = it->second;
      miss_positions.push_back(i);
      continue;
    }
    found[i] = lookup(CacheKey{model.name(), id});
    if (!found[i]) {
      slot_of[i] = miss_examples.size();
      miss_slot.emplace(id, miss_examples.size());
      miss_examples.push_back(examples[i]);
      miss_positions.push_back(i);
    }
  }

  if (!miss_examples.empty()) {
    auto fresh = predict(model, miss_examples);
    std::vector<std::shared_ptr<const Prediction>> stored;
    stored.reserve(fresh.size());
    for (std::size_t k = 0; k < fresh.size(); ++k) {
      stored.push_back(insert(CacheKey{model.name(), miss_examples[k]->id},
                              std::make_shared<const Prediction>(std::move(fresh[k]))));
    }
    for (std::size_t i : miss_positions) found[i] = stored[slot_of[i]];
  }

  std::vector<Prediction> out;
  out.reserve(examples.size());
  for (const auto& p : found) {
    out.push_back(requested_fields ? select_fields(*p, *requested_fields) : *p);
  }
  return out;
}

std::size_t PredictionCache::invalidate(const std::optional<std::string>& model_name) {
  std::lock_guard lock(mutex_);
  if (!model_name) {
    const std::size_t n = lru_.size();
    lru_.clear();
    index_.clear();
    return n;
  }
  std::size_t n = 0;
  for (auto it = lru_.begin(); it != lru_.end();) {
    if (it->first.model_name == *model_name) {
      index_.erase(it->first);
      it = lru_.erase(it);
      ++n;
    } else {
      ++it;
    }
  }
  return n;
}

CacheStats PredictionCache::stats() const {
  CacheStats s;
  s.hits = hits_.load(std::memory_order_relaxed);
  s.misses = misses_.load(std::memory_order_relaxed);
  s.evictions = evictions_.load(std::memory_order_relaxed);
  std::lock_guard lock(mutex_);
  s.entries = lru_.size();
  return s;
}

}  // namespace lit
