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

#include "lit/model.hpp"

#include <cmath>

namespace lit {

std::string_view model_kind_name(ModelKind kind) {
  return kind == ModelKind::kRemote ? "remote" : "in_process";
}

ModelHandle::ModelHandle(std::string name, std::shared_ptr<const Model> model, ModelKind kind)
    : name_(std::move(name)), model_(std::move(model)), kind_(kind) {
  if (!model_) throw Error(ErrorCode::kInvalidArgument, "null model for '" + name_ + "'");
  check_output_spec(model_->output_spec());
}

void check_output_spec(const Spec& output_spec) {
  for (const auto& [name, type] : output_spec) {
    if (type.kind == FieldKind::kMulticlassPreds && !type.vocab) {
      throw Error(ErrorCode::kInvalidArgument, "MulticlassPreds field '" + name + "' has no vocab",
                  name);
    }
    if (type.kind == FieldKind::kTokenGradients || type.kind == FieldKind::kTokenEmbeddings ||
        type.kind == FieldKind::kTokenTopKPreds) {
      const FieldType* aligned = type.align ? output_spec.find(*type.align) : nullptr;
      if (aligned == nullptr || aligned->kind != FieldKind::kTokens) {
        throw Error(ErrorCode::kInvalidArgument,
                    "field '" + name + "' must align to a Tokens output field", name);
      }
    }
  }
}

void check_prediction(const Spec& output_spec, const Prediction& prediction) {
  const auto result = validate_example(output_spec, prediction);
  if (!result.ok()) {
    const auto& first = result.diagnostics.front();
    Error err(ErrorCode::kValidation, "prediction violates output spec: " + result.to_string(),
              first.field);
    err.with_diagnostics(result.diagnostics);
    throw err;
  }
  for (const auto& [name, type] : output_spec) {
    const Json& value = prediction[name];
    if (type.kind == FieldKind::kMulticlassPreds) {
      double sum = 0.0;
      for (const auto& p : value) {
        const double x = p.get<double>();
        if (x < 0.0) {
          throw Error(ErrorCode::kValidation, "negative probability in '" + name + "'", name);
        }
        sum += x;
      }
      if (std::abs(sum - 1.0) > 1e-6) {
        throw Error(ErrorCode::kValidation,
                    "probabilities in '" + name + "' sum to " + std::to_string(sum), name);
      }
    }
    if (type.align && (type.kind == FieldKind::kTokenGradients ||
                       type.kind == FieldKind::kTokenEmbeddings ||
                       type.kind == FieldKind::kTokenTopKPreds)) {
      const std::size_t n_tokens = prediction[*type.align].size();
      if (value.size() != n_tokens) {
        throw Error(ErrorCode::kValidation,
                    "field '" + name + "' has " + std::to_string(value.size()) +
                        " entries for " + std::to_string(n_tokens) + " tokens",
                    name);
      }
    }
  }
}

Json project_inputs(const Spec& input_spec, const Json& values) {
  Json out = Json::object();
  for (const auto& [name, type] : input_spec) {
    if (!values.contains(name)) {
      throw Error(ErrorCode::kValidation, "example lacks model input field '" + name + "'", name);
    }
    if (auto d = check_value(name, type, values[name])) {
      throw Error(ErrorCode::kValidation, "model input " + d->to_string(), name);
    }
    out[name] = values[name];
  }
  return out;
}

Prediction select_fields(const Prediction& prediction, const std::vector<std::string>& fields) {
  Prediction out = Json::object();
  for (const auto& f : fields) {
    if (!prediction.contains(f)) {
      throw Error(ErrorCode::kInvalidArgument, "model has no output field '" + f + "'", f);
    }
    out[f] = prediction[f];
  }
  return out;
}

std::vector<Prediction> predict(const ModelHandle& model, std::span<const ExamplePtr> examples,
                                const std::vector<std::string>* requested_fields) {
  if (examples.empty()) return {};
  std::vector<Json> inputs;
  inputs.reserve(examples.size());
  for (const auto& ex : examples) inputs.push_back(project_inputs(model.input_spec(), ex->values));
  auto outputs = model.model().predict(inputs);
  if (outputs.size() != inputs.size()) {
    throw Error(ErrorCode::kValidation, "model '" + model.name() + "' returned " +
                                            std::to_string(outputs.size()) + " predictions for " +
                                            std::to_string(inputs.size()) + " inputs");
  }
  for (const auto& p : outputs) check_prediction(model.output_spec(), p);
  if (requested_fields != nullptr) {
    for (auto& p : outputs) p = select_fields(p, *requested_fields);
  }
  return outputs;
}

std::size_t argmax(const Json& probabilities) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < probabilities.size(); ++i) {
    if (probabilities[i].get<double>() > probabilities[best].get<double>()) best = i;
  }
  return best;
}

}  // namespace lit
