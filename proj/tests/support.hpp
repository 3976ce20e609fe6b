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
#include <filesystem>
#include <fstream>
#include <regex>
#include <string>
#include <vector>

#include "lit/dataset.hpp"
#include "lit/model.hpp"
#include "lit/server.hpp"
#include "lit/toy_models.hpp"

namespace lit::testing {

inline std::filesystem::path data_dir() { return LIT_TEST_DATA_DIR; }
inline std::filesystem::path source_dir() { return LIT_TEST_SOURCE_DIR; }

inline std::vector<std::string> read_lines(const std::filesystem::path& path) {
  std::ifstream in(path);
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) {
    if (!line.empty()) lines.push_back(line);
  }
  return lines;
}

inline Dataset fixture_dataset(const std::string& preset = "sentiment_genre") {
  DatasetConfig config;
  config.path = data_dir() / "sentiment_fixture.tsv";
  config.preset = preset;
  return load_dataset("sst", config);
}

inline std::shared_ptr<BowSentimentModel> fixture_bow() {
  return std::make_shared<BowSentimentModel>(
      BowSentimentModel::from_file(data_dir() / "bow_sentiment_weights.json"));
}

/// Wraps a model and counts predict() calls and predicted examples.
class CountingModel final : public Model {
 public:
  explicit CountingModel(std::shared_ptr<const Model> inner) : inner_(std::move(inner)) {}
  const Spec& input_spec() const override { return inner_->input_spec(); }
  const Spec& output_spec() const override { return inner_->output_spec(); }
  std::vector<Prediction> predict(std::span<const Json> inputs) const override {
    ++calls;
    examples += inputs.size();
    return inner_->predict(inputs);
  }
  mutable std::atomic<std::size_t> calls{0};
  mutable std::atomic<std::size_t> examples{0};

 private:
  std::shared_ptr<const Model> inner_;
};

inline Json load_schema(const std::string& name) {
  std::ifstream in(source_dir() / "schemas" / (name + ".json"));
  return Json::parse(in);
}

// Subset of JSON Schema 2020-12 used by the published response schemas.
inline void validate_schema(const Json& schema, const Json& value, const std::string& path,
                            std::vector<std::string>& errors) {
  const auto fail = [&](const std::string& what) { errors.push_back(path + ": " + what); };
  if (schema.contains("type")) {
    const std::string type = schema["type"];
    bool ok = false;
    if (type == "object") ok = value.is_object();
    else if (type == "array") ok = value.is_array();
    else if (type == "string") ok = value.is_string();
    else if (type == "integer") ok = value.is_number_integer();
    else if (type == "number") ok = value.is_number();
    else if (type == "boolean") ok = value.is_boolean();
    else if (type == "null") ok = value.is_null();
    if (!ok) return fail("expected " + type + ", found " + value.type_name());
  }
  if (schema.contains("enum")) {
    bool found = false;
    for (const auto& e : schema["enum"]) found = found || e == value;
    if (!found) fail("value not in enum: " + value.dump());
  }
  if (value.is_number()) {
    const double v = value.get<double>();
    if (schema.contains("minimum") && v < schema["minimum"].get<double>()) fail("below minimum");
    if (schema.contains("maximum") && v > schema["maximum"].get<double>()) fail("above maximum");
  }
  if (value.is_string() && schema.contains("pattern")) {
    if (!std::regex_search(value.get<std::string>(), std::regex(schema["pattern"].get<std::string>()))) {
      fail("string does not match pattern");
    }
  }
  if (value.is_object()) {
    for (const auto& r : schema.value("required", Json::array())) {
      if (!value.contains(r.get<std::string>())) fail("missing property " + r.get<std::string>());
    }
    const Json props = schema.value("properties", Json::object());
    for (const auto& [key, v] : value.items()) {
      if (props.contains(key)) {
        validate_schema(props[key], v, path + "." + key, errors);
      } else if (schema.contains("additionalProperties")) {
        const Json& extra = schema["additionalProperties"];
        if (extra.is_boolean()) {
          if (!extra.get<bool>()) fail("unexpected property " + key);
        } else {
          validate_schema(extra, v, path + "." + key, errors);
        }
      }
    }
  }
  if (value.is_array()) {
    if (schema.contains("minItems") && value.size() < schema["minItems"].get<std::size_t>()) {
      fail("too few items");
    }
    if (schema.contains("maxItems") && value.size() > schema["maxItems"].get<std::size_t>()) {
      fail("too many items");
    }
    const Json prefix = schema.value("prefixItems", Json::array());
    for (std::size_t i = 0; i < value.size(); ++i) {
      const std::string at = path + "[" + std::to_string(i) + "]";
      if (i < prefix.size()) validate_schema(prefix[i], value[i], at, errors);
      else if (schema.contains("items")) validate_schema(schema["items"], value[i], at, errors);
    }
  }
}

inline std::vector<std::string> schema_errors(const std::string& schema_name, const Json& value) {
  std::vector<std::string> errors;
  validate_schema(load_schema(schema_name), value, "$", errors);
  return errors;
}

}  // namespace lit::testing
