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

#include "lit/server.hpp"

#include <fstream>
#include <set>

#include "httplib.h"
#include "lit/metrics.hpp"
#include "lit/projection.hpp"
#include "lit/remote_model.hpp"
#include "lit/salience.hpp"
#include "lit/toy_models.hpp"

namespace lit {
namespace {

Error bad_request(const std::string& message, std::string field = {}) {
  return Error(ErrorCode::kInvalidArgument, message, std::move(field));
}

const Json& require(const Json& body, const char* key) {
  if (!body.contains(key)) throw bad_request(std::string("missing '") + key + "'", key);
  return body[key];
}

std::string require_string(const Json& body, const char* key) {
  const Json& v = require(body, key);
  if (!v.is_string()) throw bad_request(std::string("'") + key + "' must be a string", key);
  return v.get<std::string>();
}

std::vector<std::string> string_list(const Json& v, const char* key) {
  if (!v.is_array() ||
      !std::all_of(v.begin(), v.end(), [](const Json& x) { return x.is_string(); })) {
    throw bad_request(std::string("'") + key + "' must be a list of strings", key);
  }
  return v.get<std::vector<std::string>>();
}

// Explicit ids when given, otherwise the whole dataset in order.
std::vector<std::string> ids_or_all(const Json& body, const Dataset& ds) {
  if (body.contains("ids") && !body["ids"].is_null()) return string_list(body["ids"], "ids");
  return ds.ids();
}

int http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::kNotFound: return 404;
    case ErrorCode::kRetryable: return 503;
    case ErrorCode::kInternal: return 500;
    default: return 400;
  }
}

ApiResponse error_response(int status, std::string_view code, const std::string& field,
                           const std::string& message) {
  Json j = Json::object();
  j["error_code"] = std::string(code);
  j["field"] = field;
  j["message"] = message;
  return ApiResponse{status, dump_compact(j)};
}

std::filesystem::path default_data_dir() {
#ifdef LIT_DEFAULT_DATA_DIR
  return LIT_DEFAULT_DATA_DIR;
#else
  return "data";
#endif
}

struct NamedPattern {
  std::string name;
  ComponentPattern pattern;
};

std::vector<NamedPattern> interpreter_patterns() {
  return {{"lime", lime_pattern()}, {"grad_dot_input", grad_dot_input_pattern()}};
}

std::vector<NamedPattern> metric_patterns() {
  return {{"multiclass", multiclass_metrics_pattern()}, {"bleu", generation_metrics_pattern()}};
}

std::vector<NamedPattern> view_patterns() {
  return {
      {"confusion", multiclass_metrics_pattern()},
      {"scalars", scalar_pattern()},
      {"projection", ComponentPattern{Requirement{SpecRole::kOutput, FieldKind::kEmbeddings, {}}}},
  };
}

// Subset semantics: every model input must exist in the dataset with the same kind.
bool inputs_covered(const Spec& input, const Spec& dataset) {
  return std::all_of(input.begin(), input.end(), [&](const Spec::Entry& e) {
    const FieldType* t = dataset.find(e.first);
    return t != nullptr && t->kind == e.second.kind;
  });
}

}  // namespace

std::optional<std::pair<Spec, ColumnMap>> dataset_preset(std::string_view name) {
  if (name == "sentiment" || name == "sst") {
    return std::make_pair(Spec{{"sentence", FieldType::text_segment()},
                               {"label", FieldType::multiclass_label({"0", "1"})}},
                          ColumnMap{{"sentence", 0}, {"label", 1}});
  }
  if (name == "sentiment_genre") {
    return std::make_pair(Spec{{"sentence", FieldType::text_segment()},
                               {"label", FieldType::multiclass_label({"0", "1"})},
                               {"genre", FieldType::category_label()}},
                          ColumnMap{{"sentence", 0}, {"label", 1}, {"genre", 2}});
  }
  return std::nullopt;
}

ServerConfig ServerConfig::from_json(const Json& j) {
  if (!j.is_object()) throw bad_request("server config must be a JSON object");
  ServerConfig c;
  try {
    c.host = j.value("host", c.host);
    c.port = j.value("port", c.port);
    c.cache_capacity = j.value("cache_capacity", c.cache_capacity);
    if (j.contains("static_dir")) c.static_dir = j["static_dir"].get<std::string>();
    if (j.contains("data_dir")) c.data_dir = j["data_dir"].get<std::string>();
    if (j.contains("models")) {
      for (const auto& [name, src] : j["models"].items()) c.models[name] = src.get<std::string>();
    }
    if (j.contains("datasets")) {
      for (const auto& [name, d] : j["datasets"].items()) {
        DatasetConfig dc;
        dc.path = d.at("path").get<std::string>();
        dc.format = d.value("format", dc.format);
        dc.preset = d.value("preset", dc.preset);
        if (d.contains("spec")) dc.spec = spec_from_json(d["spec"]);
        if (d.contains("columns")) {
          for (const auto& [field, col] : d["columns"].items()) {
            dc.columns.emplace_back(field, col.get<std::size_t>());
          }
        }
        dc.skip_header = d.value("skip_header", false);
        c.datasets[name] = std::move(dc);
      }
    }
  } catch (const Json::exception& e) {
    throw bad_request(std::string("malformed server config: ") + e.what());
  }
  return c;
}

ServerConfig ServerConfig::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kNotFound, "cannot open config " + path.string());
  try {
    return from_json(Json::parse(in));
  } catch (const Json::parse_error& e) {
    throw bad_request("malformed config " + path.string() + ": " + e.what());
  }
}

void ServerConfig::validate() const {
  if (models.empty()) throw bad_request("server needs at least one model", "models");
  if (datasets.empty()) throw bad_request("server needs at least one dataset", "datasets");
  if (port < 0 || port > 65535) throw bad_request("port out of range", "port");
  if (cache_capacity == 0) throw bad_request("cache_capacity must be positive", "cache_capacity");
}

std::pair<std::string, DatasetConfig> parse_dataset_flag(const std::string& flag) {
  const auto eq = flag.find('=');
  const auto colon = flag.rfind(':');
  if (eq == std::string::npos || eq == 0 || colon == std::string::npos || colon < eq) {
    throw bad_request("--dataset expects name=path:format, got '" + flag + "'", "dataset");
  }
  DatasetConfig dc;
  dc.path = flag.substr(eq + 1, colon - eq - 1);
  std::string format = flag.substr(colon + 1);
  if (const auto slash = format.find('/'); slash != std::string::npos) {
    dc.preset = format.substr(slash + 1);
    format = format.substr(0, slash);
  }
  if (format != "tsv" && format != "jsonl" && format != "session") {
    throw bad_request("unknown dataset format '" + format + "'", "dataset");
  }
  dc.format = format;
  return {flag.substr(0, eq), std::move(dc)};
}

std::pair<std::string, std::string> parse_model_flag(const std::string& flag) {
  const auto eq = flag.find('=');
  if (eq == std::string::npos || eq == 0 || eq + 1 == flag.size()) {
    throw bad_request("--model expects name=fixture:<name>|url, got '" + flag + "'", "model");
  }
  return {flag.substr(0, eq), flag.substr(eq + 1)};
}

Dataset load_dataset(const std::string& name, const DatasetConfig& config) {
  if (config.format == "session") return Dataset::load_session(name, config.path);
  Spec spec;
  ColumnMap columns = config.columns;
  if (config.spec) {
    spec = *config.spec;
  } else {
    auto preset = dataset_preset(config.preset);
    if (!preset) throw bad_request("unknown dataset preset '" + config.preset + "'", "preset");
    spec = preset->first;
    if (columns.empty()) columns = preset->second;
  }
  if (config.format == "jsonl") return load_jsonl(config.path, name, spec);
  if (config.format != "tsv") throw bad_request("unknown dataset format '" + config.format + "'");
  if (columns.empty()) {
    std::size_t i = 0;
    for (const auto& [field, type] : spec) columns.emplace_back(field, i++);
  }
  return load_tsv(config.path, name, spec, columns, TsvOptions{config.skip_header});
}

ModelHandle load_model(const std::string& name, const std::string& source,
                       const std::filesystem::path& data_dir) {
  const std::filesystem::path dir = data_dir.empty() ? default_data_dir() : data_dir;
  if (source.rfind("fixture:", 0) == 0) {
    std::string fixture = source.substr(8);
    std::optional<std::filesystem::path> override_path;
    if (const auto at = fixture.find('@'); at != std::string::npos) {
      override_path = fixture.substr(at + 1);
      fixture = fixture.substr(0, at);
    }
    if (fixture == "bow_sentiment") {
      auto m = BowSentimentModel::from_file(override_path.value_or(dir / "bow_sentiment_weights.json"));
      return ModelHandle(name, std::make_shared<BowSentimentModel>(std::move(m)));
    }
    if (fixture == "bigram_lm") {
      auto m = BigramLanguageModel::from_file(override_path.value_or(dir / "bigram_corpus.txt"));
      return ModelHandle(name, std::make_shared<BigramLanguageModel>(std::move(m)));
    }
    throw bad_request("unknown model fixture '" + fixture + "'", "models");
  }
  if (source.rfind("http://", 0) == 0) return connect_remote_model(name, source);
  throw bad_request("model source must be fixture:<name> or an http:// URL: '" + source + "'",
                    "models");
}

LitApp::LitApp(std::vector<ModelHandle> models, std::vector<Dataset> datasets,
               std::size_t cache_capacity)
    : generators_(builtin_generators()), cache_(cache_capacity) {
  if (models.empty()) throw bad_request("server needs at least one model", "models");
  if (datasets.empty()) throw bad_request("server needs at least one dataset", "datasets");
  for (auto& m : models) {
    const std::string name = m.name();
    if (!models_.emplace(name, std::move(m)).second) {
      throw bad_request("duplicate model name '" + name + "'", "models");
    }
  }
  for (auto& d : datasets) {
    const std::string name = d.name();
    if (!datasets_.emplace(name, std::make_unique<Dataset>(std::move(d))).second) {
      throw bad_request("duplicate dataset name '" + name + "'", "datasets");
    }
  }
}

std::unique_ptr<LitApp> LitApp::from_config(const ServerConfig& config) {
  config.validate();
  std::vector<std::string> failures;
  std::vector<Dataset> datasets;
  for (const auto& [name, dc] : config.datasets) {
    try {
      datasets.push_back(load_dataset(name, dc));
    } catch (const Error& e) {
      failures.push_back("dataset '" + name + "' (" + dc.path.string() + "): " + e.what());
    }
  }
  std::vector<ModelHandle> models;
  for (const auto& [name, source] : config.models) {
    try {
      models.push_back(load_model(name, source, config.data_dir));
    } catch (const Error& e) {
      failures.push_back("model '" + name + "' (" + source + "): " + e.what());
    }
  }
  if (!failures.empty()) {
    std::string message = "startup failed:";
    for (const auto& f : failures) message += "\n  " + f;
    throw Error(ErrorCode::kInvalidArgument, message);
  }
  return std::make_unique<LitApp>(std::move(models), std::move(datasets), config.cache_capacity);
}

const ModelHandle& LitApp::model(const std::string& name) const {
  auto it = models_.find(name);
  if (it == models_.end()) throw Error(ErrorCode::kNotFound, "unknown model '" + name + "'", "model");
  return it->second;
}

Dataset& LitApp::dataset(const std::string& name) {
  auto it = datasets_.find(name);
  if (it == datasets_.end()) {
    throw Error(ErrorCode::kNotFound, "unknown dataset '" + name + "'", "dataset");
  }
  return *it->second;
}

std::vector<std::string> LitApp::applicable_components(const ModelHandle& model,
                                                       const Dataset& dataset) const {
  std::vector<std::string> out;
  if (!inputs_covered(model.input_spec(), dataset.spec())) return out;
  const auto check = [&](const ComponentPattern& p) {
    return is_component_applicable(p, dataset.spec(), model.input_spec(), model.output_spec());
  };
  for (const auto& p : interpreter_patterns()) {
    if (check(p.pattern)) out.push_back(p.name);
  }
  for (const auto& g : generators_) {
    if (g->implemented() && check(g->pattern())) out.push_back(g->name());
  }
  for (const auto& p : metric_patterns()) {
    if (check(p.pattern)) out.push_back(p.name);
  }
  for (const auto& p : view_patterns()) {
    if (check(p.pattern)) out.push_back(p.name);
  }
  return out;
}

Json LitApp::info() const {
  Json j = Json::object();
  Json models = Json::object();
  for (const auto& [name, m] : models_) {
    Json mj = Json::object();
    mj["kind"] = std::string(model_kind_name(m.kind()));
    mj["input_spec"] = spec_to_json(m.input_spec());
    mj["output_spec"] = spec_to_json(m.output_spec());
    models[name] = std::move(mj);
  }
  j["models"] = std::move(models);

  Json datasets = Json::object();
  for (const auto& [name, d] : datasets_) {
    Json dj = Json::object();
    dj["spec"] = spec_to_json(d->spec());
    dj["size"] = d->size();
    dj["version"] = d->version();
    datasets[name] = std::move(dj);
  }
  j["datasets"] = std::move(datasets);

  const auto listing = [](const std::vector<NamedPattern>& v) {
    Json arr = Json::array();
    for (const auto& p : v) arr.push_back(p.name);
    return arr;
  };
  Json components = Json::object();
  components["interpreters"] = listing(interpreter_patterns());
  Json gens = Json::array();
  for (const auto& g : generators_) {
    Json gj = Json::object();
    gj["name"] = g->name();
    gj["implemented"] = g->implemented();
    gens.push_back(std::move(gj));
  }
  components["generators"] = std::move(gens);
  components["metrics"] = listing(metric_patterns());
  components["views"] = listing(view_patterns());
  j["components"] = std::move(components);

  Json applicable = Json::object();
  for (const auto& [mname, m] : models_) {
    Json per = Json::object();
    for (const auto& [dname, d] : datasets_) per[dname] = applicable_components(m, *d);
    applicable[mname] = std::move(per);
  }
  j["applicable"] = std::move(applicable);
  j["comparison_available"] = models_.size() >= 2;
  return j;
}

Json LitApp::handle_examples(const Json& body) {
  Dataset& ds = dataset(require_string(body, "dataset"));
  std::vector<std::string> ids;
  if (body.contains("ids")) {
    ids = string_list(body["ids"], "ids");
    ds.get(ids);  // existence check
  } else {
    FilterQuery q;
    if (body.contains("query")) {
      const Json& qj = body["query"];
      if (qj.contains("token_search")) {
        q.token_search = TokenSearch{require_string(qj["token_search"], "field"),
                                     require_string(qj["token_search"], "token")};
      }
      if (qj.contains("predicates")) {
        for (const auto& p : qj["predicates"]) {
          const auto op = parse_comparator(require_string(p, "op"));
          if (!op) throw bad_request("unknown comparator", "op");
          q.predicates.push_back(ValuePredicate{require_string(p, "field"), *op, require(p, "value")});
        }
      }
    }
    ids = ds.filter(q);
  }
  const std::size_t offset = body.value("offset", std::size_t{0});
  const std::size_t limit = body.value("limit", ids.size());
  Json examples = Json::array();
  for (std::size_t i = offset; i < ids.size() && i - offset < limit; ++i) {
    examples.push_back(example_to_json(*ds.find(ids[i])));
  }
  Json j = Json::object();
  j["dataset"] = ds.name();
  j["version"] = ds.version();
  j["total"] = ids.size();
  j["ids"] = ids;
  j["examples"] = std::move(examples);
  return j;
}

Json LitApp::handle_predict(const Json& body) {
  const ModelHandle& m = model(require_string(body, "model"));
  Dataset& ds = dataset(require_string(body, "dataset"));
  const auto examples = ds.get(ids_or_all(body, ds));
  std::optional<std::vector<std::string>> fields;
  if (body.contains("fields")) fields = string_list(body["fields"], "fields");
  const auto preds = cache_.cached_predict(m, examples, fields ? &*fields : nullptr);
  Json out = Json::array();
  for (std::size_t i = 0; i < preds.size(); ++i) {
    Json p = Json::object();
    p["id"] = examples[i]->id;
    p["values"] = preds[i];
    out.push_back(std::move(p));
  }
  Json j = Json::object();
  j["model"] = m.name();
  j["version"] = ds.version();
  j["predictions"] = std::move(out);
  return j;
}

Json LitApp::handle_interpret(const Json& body) {
  const ModelHandle& m = model(require_string(body, "model"));
  Dataset& ds = dataset(require_string(body, "dataset"));
  const std::string interpreter = require_string(body, "interpreter");
  std::vector<std::string> ids;
  if (body.contains("id")) ids.push_back(require_string(body, "id"));
  else ids = string_list(require(body, "ids"), "ids");

  const auto patterns = interpreter_patterns();
  const auto it = std::find_if(patterns.begin(), patterns.end(),
                               [&](const NamedPattern& p) { return p.name == interpreter; });
  if (it == patterns.end()) {
    throw Error(ErrorCode::kNotFound, "unknown interpreter '" + interpreter + "'", "interpreter");
  }
  if (!inputs_covered(m.input_spec(), ds.spec()) ||
      !is_component_applicable(it->pattern, ds.spec(), m.input_spec(), m.output_spec())) {
    throw Error(ErrorCode::kNotApplicable,
                "interpreter '" + interpreter + "' does not apply to model '" + m.name() + "'",
                "interpreter");
  }
  std::string field = body.value("field", std::string());
  if (field.empty()) {
    const auto texts = find_compatible_fields(m.input_spec(), FieldKind::kTextSegment);
    if (texts.empty()) throw Error(ErrorCode::kNotApplicable, "model has no text input", "field");
    field = texts.front();
  }
  Json results = Json::array();
  for (const auto& ex : ds.get(ids)) {
    SalienceMap map;
    if (interpreter == "lime") {
      const auto config = LimeConfig::from_json(body.contains("config") ? body["config"] : Json());
      std::optional<std::string> target;
      if (body.contains("target_class")) target = require_string(body, "target_class");
      map = lime_explain(cache_, m, *ex, field, config, target);
    } else {
      map = grad_dot_input(cache_, m, *ex, field);
    }
    Json r = map.to_json();
    r["id"] = ex->id;
    results.push_back(std::move(r));
  }
  Json j = Json::object();
  j["version"] = ds.version();
  j["results"] = std::move(results);
  return j;
}

Json LitApp::handle_generate(const Json& body) {
  const std::string name = require_string(body, "generator");
  Dataset& ds = dataset(require_string(body, "dataset"));
  const auto it = std::find_if(generators_.begin(), generators_.end(),
                               [&](const auto& g) { return g->name() == name; });
  if (it == generators_.end()) {
    throw Error(ErrorCode::kNotFound, "unknown generator '" + name + "'", "generator");
  }
  const ModelHandle* m = body.contains("model") ? &model(require_string(body, "model")) : nullptr;
  const Dataset* corpus = body.contains("corpus") ? &dataset(require_string(body, "corpus")) : nullptr;
  const Spec empty;
  const bool applies = is_component_applicable((*it)->pattern(), ds.spec(),
                                               m ? m->input_spec() : empty,
                                               m ? m->output_spec() : empty);
  if (!(*it)->implemented()) {
    throw Error(ErrorCode::kNotImplemented, "generator '" + name + "' is not implemented", "generator");
  }
  if (!applies) {
    throw Error(ErrorCode::kNotApplicable, "generator '" + name + "' does not apply here", "generator");
  }
  const auto ids = string_list(require(body, "ids"), "ids");
  const Json config = body.contains("config") ? body["config"] : Json::object();
  GeneratorContext ctx{cache_, ds, m, corpus};
  Json generated = Json::array();
  for (const auto& g : (*it)->generate(ctx, config, ids)) generated.push_back(g.to_json());
  Json j = Json::object();
  j["version"] = ds.version();
  j["generated"] = std::move(generated);
  return j;
}

Json LitApp::handle_commit(const Json& body) {
  Dataset& ds = dataset(require_string(body, "dataset"));
  CommitResult result;
  if (body.contains("generated")) {
    std::vector<GeneratedExample> generated;
    for (const auto& g : require(body, "generated")) generated.push_back(GeneratedExample::from_json(g));
    std::map<std::size_t, Json> edits;
    if (body.contains("edits")) {
      for (const auto& [key, patch] : body["edits"].items()) {
        std::size_t index = 0;
        try {
          index = std::stoul(key);
        } catch (const std::exception&) {
          throw bad_request("edit keys must be staged item indices", "edits");
        }
        edits[index] = patch;
      }
    }
    result = stage_and_commit(ds, std::move(generated), edits);
  } else {
    std::vector<NewExample> batch;
    for (const auto& item : require(body, "examples")) {
      batch.push_back(NewExample{require(item, "values"),
                                 meta_from_json(item.contains("meta") ? item["meta"] : Json())});
    }
    result = ds.commit(std::move(batch));
  }
  Json j = Json::object();
  j["version"] = result.version;
  j["ids"] = result.ids;
  j["skipped"] = result.skipped;
  j["size"] = ds.size();
  return j;
}

Json LitApp::handle_metrics(const Json& body) {
  const ModelHandle& m = model(require_string(body, "model"));
  Dataset& ds = dataset(require_string(body, "dataset"));
  const std::string metric = body.value("metric", std::string("multiclass"));
  if (metric != "multiclass" && metric != "bleu") {
    throw Error(ErrorCode::kNotFound, "unknown metric '" + metric + "'", "metric");
  }
  const bool exclude_generated = body.value("exclude_generated", false);
  const auto keep = [&](std::vector<std::string> ids) {
    if (!exclude_generated) return ids;
    std::vector<std::string> out;
    for (const auto& id : ids) {
      const auto ex = ds.find(id);
      if (ex && ex->meta.source != ExampleSource::kGenerator) out.push_back(id);
    }
    return out;
  };
  const auto score = [&](const std::vector<std::string>& ids, std::string group) {
    return metric == "bleu" ? generation_metrics(cache_, m, ds, ids, std::move(group))
                            : multiclass_metrics(cache_, m, ds, ids, std::move(group));
  };

  Json rows = Json::array();
  const auto all_ids = keep(ds.ids());
  rows.push_back(score(all_ids, "all").to_json());
  std::optional<std::vector<std::string>> selection;
  if (body.contains("ids") && !body["ids"].is_null()) {
    selection = keep(string_list(body["ids"], "ids"));
    rows.push_back(score(*selection, "selection").to_json());
  }
  if (body.contains("slices")) {
    std::vector<std::string> names;
    if (body["slices"].is_boolean()) {
      if (body["slices"].get<bool>()) {
        for (const auto& s : ds.list_slices()) names.push_back(s.name);
      }
    } else {
      names = string_list(body["slices"], "slices");
    }
    for (const auto& name : names) {
      const auto s = ds.slice(name);
      if (!s) throw Error(ErrorCode::kNotFound, "unknown slice '" + name + "'", "slices");
      rows.push_back(score(keep(s->ids), "slice:" + name).to_json());
    }
  }
  if (body.contains("facet")) {
    if (metric != "multiclass") throw bad_request("facets need the multiclass metric", "facet");
    const auto facets = faceted_metrics(cache_, m, ds, selection ? *selection : all_ids,
                                        require_string(body, "facet"));
    for (const auto& r : facets) {
      if (r.group != "all") rows.push_back(r.to_json());
    }
  }
  Json j = Json::object();
  j["version"] = ds.version();
  j["rows"] = std::move(rows);
  return j;
}

Json LitApp::handle_confusion(const Json& body) {
  const ModelHandle& a = model(require_string(body, "model"));
  const ModelHandle* b = body.contains("model_b") ? &model(require_string(body, "model_b")) : nullptr;
  Dataset& ds = dataset(require_string(body, "dataset"));
  const auto matrix = confusion_matrix(cache_, a, b, ds, ids_or_all(body, ds));
  Json j = Json::object();
  j["version"] = ds.version();
  j["confusion"] = matrix.to_json();
  return j;
}

Json LitApp::handle_scalars(const Json& body) {
  const ModelHandle& m = model(require_string(body, "model"));
  Dataset& ds = dataset(require_string(body, "dataset"));
  const Json& src = require(body, "source");
  ScalarSource source;
  if (src.contains("field")) source = FieldSource{require_string(src, "field")};
  else if (src.contains("predicted_prob")) source = PredictedProb{require_string(src, "predicted_prob")};
  else throw bad_request("source needs 'field' or 'predicted_prob'", "source");
  Json values = Json::array();
  for (const auto& [id, v] : scalar_values(cache_, m, ds, ids_or_all(body, ds), source)) {
    values.push_back(Json::array({id, v}));
  }
  Json j = Json::object();
  j["version"] = ds.version();
  j["values"] = std::move(values);
  return j;
}

Json LitApp::handle_projection(const Json& body) {
  const ModelHandle& m = model(require_string(body, "model"));
  Dataset& ds = dataset(require_string(body, "dataset"));
  std::string field = body.value("field", std::string());
  if (field.empty()) {
    const auto found = find_compatible_fields(m.output_spec(), FieldKind::kEmbeddings);
    if (found.empty()) throw Error(ErrorCode::kNotApplicable, "model has no Embeddings output", "field");
    field = found.front();
  }
  const FieldType* t = m.output_spec().find(field);
  if (t == nullptr || t->kind != FieldKind::kEmbeddings) {
    throw Error(ErrorCode::kNotApplicable, "'" + field + "' is not an Embeddings output", "field");
  }
  const auto ids = ids_or_all(body, ds);
  const auto examples = ds.get(ids);
  if (examples.empty()) throw bad_request("projection needs at least one example", "ids");
  const auto preds = cache_.cached_predict(m, examples);
  std::vector<std::vector<double>> rows;
  rows.reserve(preds.size());
  for (const auto& p : preds) rows.push_back(p[field].get<std::vector<double>>());
  Json j = pca_project(linalg::Matrix::from_rows(rows), ids).to_json();
  j["field"] = field;
  j["version"] = ds.version();
  return j;
}

Json LitApp::handle_slices(const ApiRequest& request, const Json& body) {
  const auto param = [&](const char* key) -> std::string {
    if (auto it = request.params.find(key); it != request.params.end()) return it->second;
    if (body.is_object() && body.contains(key)) return require_string(body, key);
    throw bad_request(std::string("missing '") + key + "'", key);
  };
  Dataset& ds = dataset(param("dataset"));
  Json j = Json::object();
  if (request.method == "POST") {
    ds.save_slice(require_string(body, "name"), string_list(require(body, "ids"), "ids"),
                  body.value("overwrite", false));
  } else if (request.method == "DELETE") {
    const std::string name = param("name");
    if (!ds.delete_slice(name)) throw Error(ErrorCode::kNotFound, "unknown slice '" + name + "'", "name");
  }
  Json slices = Json::object();
  for (const auto& s : ds.list_slices()) slices[s.name] = s.ids;
  j["dataset"] = ds.name();
  j["version"] = ds.version();
  j["slices"] = std::move(slices);
  return j;
}

ApiResponse LitApp::handle(const ApiRequest& request) {
  try {
    Json body = Json::object();
    if (!request.body.empty()) {
      try {
        body = Json::parse(request.body);
      } catch (const Json::parse_error& e) {
        return error_response(400, "invalid_json", "", e.what());
      }
      if (!body.is_object()) return error_response(400, "invalid_json", "", "body must be a JSON object");
    }
    const auto& path = request.path;
    const auto& method = request.method;
    Json result;
    if (path == "/api/info" && method == "GET") {
      result = info();
    } else if (path == "/api/cache_stats" && method == "GET") {
      result = cache_.stats().to_json();
    } else if (path == "/api/slices" && (method == "GET" || method == "POST" || method == "DELETE")) {
      result = handle_slices(request, body);
    } else if (method == "POST" && path == "/api/examples") {
      result = handle_examples(body);
    } else if (method == "POST" && path == "/api/predict") {
      result = handle_predict(body);
    } else if (method == "POST" && path == "/api/interpret") {
      result = handle_interpret(body);
    } else if (method == "POST" && path == "/api/generate") {
      result = handle_generate(body);
    } else if (method == "POST" && path == "/api/commit") {
      result = handle_commit(body);
    } else if (method == "POST" && path == "/api/metrics") {
      result = handle_metrics(body);
    } else if (method == "POST" && path == "/api/confusion") {
      result = handle_confusion(body);
    } else if (method == "POST" && path == "/api/scalars") {
      result = handle_scalars(body);
    } else if (method == "POST" && path == "/api/projection") {
      result = handle_projection(body);
    } else {
      return error_response(404, "not_found", "", "no endpoint " + method + " " + path);
    }
    return ApiResponse{200, dump_compact(result)};
  } catch (const Error& e) {
    return error_response(http_status(e.code()), error_code_name(e.code()), e.field(), e.what());
  } catch (const Json::exception& e) {
    return error_response(400, "validation_error", "", e.what());
  } catch (const std::exception& e) {
    return error_response(500, "internal", "", e.what());
  }
}

LitServer::LitServer(std::shared_ptr<LitApp> app, std::optional<std::filesystem::path> static_dir)
    : app_(std::move(app)), server_(std::make_unique<httplib::Server>()) {
  const auto route = [this](const httplib::Request& req, httplib::Response& res) {
    ApiRequest r{req.method, req.path, req.body, {}};
    for (const auto& [k, v] : req.params) r.params.emplace(k, v);
    const ApiResponse out = app_->handle(r);
    res.status = out.status;
    res.set_content(out.body, "application/json");
  };
  const std::string pattern = R"(/api/.*)";
  server_->Get(pattern, route);
  server_->Post(pattern, route);
  server_->Delete(pattern, route);
  if (static_dir) {
    if (!server_->set_mount_point("/", static_dir->string())) {
      throw bad_request("static_dir does not exist: " + static_dir->string(), "static_dir");
    }
  }
}

LitServer::~LitServer() { stop(); }

int LitServer::start(const std::string& host, int port) {
  port_ = port == 0 ? server_->bind_to_any_port(host)
                    : (server_->bind_to_port(host, port) ? port : -1);
  if (port_ < 0) throw bad_request("cannot bind " + host + ":" + std::to_string(port), "port");
  thread_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
  return port_;
}

void LitServer::serve_forever(const std::string& host, int port) {
  port_ = port;
  if (!server_->listen(host, port)) {
    throw bad_request("cannot bind " + host + ":" + std::to_string(port), "port");
  }
}

void LitServer::stop() {
  if (server_) server_->stop();
  if (thread_.joinable()) thread_.join();
}

}  // namespace lit
