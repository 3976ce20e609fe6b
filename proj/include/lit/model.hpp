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

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lit/dataset.hpp"
#include "lit/spec.hpp"
#include "lit/value.hpp"

namespace lit {

/// A model prediction: a value map conforming to the model's output spec.
using Prediction = Json;

/// Anything that maps batches of input value maps to predictions.
///
/// Implementations must be safe to call concurrently. Inputs contain exactly
/// the fields named in input_spec().
class Model {
 public:
  virtual ~Model() = default;

  virtual const Spec& input_spec() const = 0;
  virtual const Spec& output_spec() const = 0;
  virtual std::vector<Prediction> predict(std::span<const Json> inputs) const = 0;
};

enum class ModelKind { kInProcess, kRemote };

std::string_view model_kind_name(ModelKind kind);

/// Named, spec-checked reference to a model.
class ModelHandle {
 public:
  // Throws Error(kInvalidArgument) if the output spec breaks a handle invariant.
  ModelHandle(std::string name, std::shared_ptr<const Model> model,
              ModelKind kind = ModelKind::kInProcess);

  const std::string& name() const { return name_; }
  ModelKind kind() const { return kind_; }
  const Spec& input_spec() const { return model_->input_spec(); }
  const Spec& output_spec() const { return model_->output_spec(); }
  const Model& model() const { return *model_; }
  const std::shared_ptr<const Model>& shared_model() const { return model_; }

 private:
  std::string name_;
  std::shared_ptr<const Model> model_;
  ModelKind kind_;
};

/// MulticlassPreds fields carry a vocab; TokenGradients/TokenEmbeddings align
/// to a Tokens field of the same spec.
void check_output_spec(const Spec& output_spec);

/// Per-prediction invariants: spec conformance, probability simplex (1e-6),
/// token-aligned lengths. Throws Error(kValidation) naming the field.
void check_prediction(const Spec& output_spec, const Prediction& prediction);

/// Restricts an example's values to the model's input fields.
Json project_inputs(const Spec& input_spec, const Json& values);

/// Runs the model on examples in order and checks every output.
/// `requested_fields`, when given, restricts the returned maps.
std::vector<Prediction> predict(const ModelHandle& model, std::span<const ExamplePtr> examples,
                                const std::vector<std::string>* requested_fields = nullptr);

Prediction select_fields(const Prediction& prediction, const std::vector<std::string>& fields);

/// Index of the largest probability; lowest index wins ties.
std::size_t argmax(const Json& probabilities);

}  // namespace lit
