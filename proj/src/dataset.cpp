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

#include "lit/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <mutex>
#include <set>
#include <sstream>

#include "lit/text.hpp"

namespace lit {
namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kNotFound, "cannot open file: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Lines split on 0x0A; a trailing empty segment after the final newline is dropped.
std::vector<std::string_view> split_lines(std::string_view content) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start < content.size()) {
    const std::size_t nl = content.find('\n', start);
    if (nl == std::string_view::npos) {
      lines.push_back(content.substr(start));
      break;
    }
    lines.push_back(content.substr(start, nl - start));
    start = nl + 1;
  }
  return lines;
}

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const std::size_t tab = line.find('\t', start);
    if (tab == std::string_view::npos) {
      cells.push_back(line.substr(start));
      return cells;
    }
    cells.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
}

std::optional<double> parse_real(std::string_view cell) {
  double value = 0.0;
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  if (first != last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || !std::isfinite(value)) return std::nullopt;
  return value;
}

void warn_capacity(const Dataset& ds) {
  if (ds.over_soft_capacity()) {
    std::clog << "warning: dataset '" << ds.name() << "' holds " << ds.size()
              << " examples, above the interactive budget of " << Dataset::kSoftCapacity
              << "\n";
  }
}

Error load_error(const std::string& what, std::vector<FieldDiagnostic> diags) {
  std::string message = what;
  const std::size_t shown = std::min<std::size_t>(diags.size(), 5);
  for (std::size_t i = 0; i < shown; ++i) message += "\n  " + diags[i].to_string();
  if (diags.size() > shown) {
    message += "\n  ... and " + std::to_string(diags.size() - shown) + " more";
  }
  Error err(ErrorCode::kValidation, message);
  err.with_diagnostics(std::move(diags));
  return err;
}

bool compare_values(const Json& lhs, Comparator op, const Json& rhs) {
  if (op == Comparator::kEq) return lhs == rhs;
  if (op == Comparator::kNe) return lhs != rhs;
  int cmp = 0;
  if (lhs.is_number() && rhs.is_number()) {
    const double a = lhs.get<double>();
    const double b = rhs.get<double>();
    cmp = a < b ? -1 : (a > b ? 1 : 0);
  } else if (lhs.is_string() && rhs.is_string()) {
    cmp = lhs.get_ref<const std::string&>().compare(rhs.get_ref<const std::string&>());
    cmp = cmp < 0 ? -1 : (cmp > 0 ? 1 : 0);
  } else {
    return false;
  }
  switch (op) {
    case Comparator::kLt: return cmp < 0;
    case Comparator::kLe: return cmp <= 0;
    case Comparator::kGt: return cmp > 0;
    case Comparator::kGe: return cmp >= 0;
    default: return false;
  }
}

bool contains_phrase(const std::vector<std::string>& haystack,
                     const std::vector<std::string>& needle) {
  if (needle.empty()) return true;
  if (needle.size() > haystack.size()) return false;
  return std::search(haystack.begin(), haystack.end(), needle.begin(), needle.end()) !=
         haystack.end();
}

}  // namespace

std::string_view source_name(ExampleSource source) {
  switch (source) {
    case ExampleSource::kLoaded: return "loaded";
    case ExampleSource::kManualEdit: return "manual_edit";
    case ExampleSource::kGenerator: return "generator";
  }
  return "loaded";
}

ExampleSource parse_source(std::string_view name) {
  if (name == "loaded") return ExampleSource::kLoaded;
  if (name == "manual_edit") return ExampleSource::kManualEdit;
  if (name == "generator") return ExampleSource::kGenerator;
  throw Error(ErrorCode::kInvalidArgument, "unknown example source '" + std::string(name) + "'",
              "source");
}

Json meta_to_json(const ExampleMeta& meta) {
  Json j = Json::object();
  j["source"] = std::string(source_name(meta.source));
  if (meta.parent_id) j["parent_id"] = *meta.parent_id;
  if (meta.generator_name) j["generator_name"] = *meta.generator_name;
  if (meta.rule) j["rule"] = *meta.rule;
  return j;
}

ExampleMeta meta_from_json(const Json& j) {
  ExampleMeta meta;
  if (j.is_null()) return meta;
  if (!j.is_object()) throw Error(ErrorCode::kInvalidArgument, "meta must be an object", "meta");
  for (const auto& [key, value] : j.items()) {
    if (!value.is_string()) {
      throw Error(ErrorCode::kInvalidArgument, "meta." + key + " must be a string", key);
    }
    const auto& s = value.get_ref<const std::string&>();
    if (key == "source") {
      meta.source = parse_source(s);
    } else if (key == "parent_id") {
      meta.parent_id = s;
    } else if (key == "generator_name") {
      meta.generator_name = s;
    } else if (key == "rule") {
      meta.rule = s;
    } else {
      throw Error(ErrorCode::kInvalidArgument, "unknown meta key '" + key + "'", key);
    }
  }
  return meta;
}

ExamplePtr make_example(Json values, ExampleMeta meta) {
  std::string id = canonical_hash(values);
  return std::make_shared<const Example>(Example{std::move(id), std::move(values), std::move(meta)});
}

Json example_to_json(const Example& example) {
  Json j = Json::object();
  j["id"] = example.id;
  j["values"] = example.values;
  j["meta"] = meta_to_json(example.meta);
  return j;
}

std::optional<Comparator> parse_comparator(std::string_view op) {
  if (op == "==" || op == "eq") return Comparator::kEq;
  if (op == "!=" || op == "ne") return Comparator::kNe;
  if (op == "<" || op == "lt") return Comparator::kLt;
  if (op == "<=" || op == "le") return Comparator::kLe;
  if (op == ">" || op == "gt") return Comparator::kGt;
  if (op == ">=" || op == "ge") return Comparator::kGe;
  return std::nullopt;
}

Dataset::Dataset(std::string name, Spec spec) : name_(std::move(name)), spec_(std::move(spec)) {}

Dataset::Dataset(std::string name, Spec spec, std::vector<Example> examples)
    : Dataset(std::move(name), std::move(spec)) {
  std::vector<FieldDiagnostic> diags;
  for (std::size_t i = 0; i < examples.size(); ++i) {
    auto& ex = examples[i];
    const auto result = validate_example(spec_, ex.values);
    for (auto d : result.diagnostics) {
      d.field = "example " + std::to_string(i) + ": " + d.field;
      diags.push_back(std::move(d));
    }
    if (!result.ok()) continue;
    const std::string id = canonical_hash(ex.values);
    if (!ex.id.empty() && ex.id != id) {
      diags.push_back({"example " + std::to_string(i), id, ex.id, "id is not the content hash"});
      continue;
    }
    if (index_.count(id) > 0) {
      diags.push_back({"example " + std::to_string(i), "unique id", id, "duplicate example"});
      continue;
    }
    if (ex.meta.parent_id && index_.count(*ex.meta.parent_id) == 0) {
      diags.push_back({"example " + std::to_string(i), "earlier example id", *ex.meta.parent_id,
                       "unknown parent id"});
      continue;
    }
    insert_locked(std::make_shared<const Example>(
        Example{id, std::move(ex.values), std::move(ex.meta)}));
  }
  if (!diags.empty()) throw load_error("invalid examples in dataset '" + name_ + "'", diags);
}

Dataset::Dataset(Dataset&& other) noexcept {
  std::unique_lock lock(other.mutex_);
  name_ = std::move(other.name_);
  spec_ = std::move(other.spec_);
  examples_ = std::move(other.examples_);
  index_ = std::move(other.index_);
  slices_ = std::move(other.slices_);
  version_ = other.version_;
}

Dataset& Dataset::operator=(Dataset&& other) noexcept {
  if (this == &other) return *this;
  std::scoped_lock lock(mutex_, other.mutex_);
  name_ = std::move(other.name_);
  spec_ = std::move(other.spec_);
  examples_ = std::move(other.examples_);
  index_ = std::move(other.index_);
  slices_ = std::move(other.slices_);
  version_ = other.version_;
  return *this;
}

void Dataset::insert_locked(ExamplePtr example) {
  index_.emplace(example->id, examples_.size());
  examples_.push_back(std::move(example));
}

std::size_t Dataset::size() const {
  std::shared_lock lock(mutex_);
  return examples_.size();
}

std::uint64_t Dataset::version() const {
  std::shared_lock lock(mutex_);
  return version_;
}

std::vector<ExamplePtr> Dataset::examples() const {
  std::shared_lock lock(mutex_);
  return examples_;
}

std::vector<std::string> Dataset::ids() const {
  std::shared_lock lock(mutex_);
  std::vector<std::string> out;
  out.reserve(examples_.size());
  for (const auto& ex : examples_) out.push_back(ex->id);
  return out;
}

ExamplePtr Dataset::find(std::string_view id) const {
  std::shared_lock lock(mutex_);
  auto it = index_.find(std::string(id));
  return it == index_.end() ? nullptr : examples_[it->second];
}

std::vector<ExamplePtr> Dataset::get(std::span<const std::string> ids) const {
  std::shared_lock lock(mutex_);
  std::vector<ExamplePtr> out;
  out.reserve(ids.size());
  for (const auto& id : ids) {
    auto it = index_.find(id);
    if (it == index_.end()) {
      throw Error(ErrorCode::kNotFound, "unknown example id '" + id + "' in dataset '" + name_ + "'",
                  "ids");
    }
    out.push_back(examples_[it->second]);
  }
  return out;
}

std::vector<std::string> Dataset::filter(const FilterQuery& query) const {
  const auto check_field = [&](const std::string& field) {
    if (!spec_.contains(field)) {
      throw Error(ErrorCode::kInvalidArgument, "unknown field '" + field + "'", field);
    }
  };
  std::vector<std::string> needle;
  if (query.token_search) {
    check_field(query.token_search->field);
    needle = text::word_tokens(query.token_search->token);
  }
  for (const auto& p : query.predicates) check_field(p.field);

  std::shared_lock lock(mutex_);
  std::vector<std::string> out;
  for (const auto& ex : examples_) {
    if (query.token_search) {
      const Json& v = ex->values[query.token_search->field];
      if (!v.is_string()) continue;
      if (!contains_phrase(text::word_tokens(v.get_ref<const std::string&>()), needle)) continue;
    }
    const bool pass = std::all_of(query.predicates.begin(), query.predicates.end(),
                                  [&](const ValuePredicate& p) {
                                    return compare_values(ex->values[p.field], p.op, p.value);
                                  });
    if (pass) out.push_back(ex->id);
  }
  return out;
}

CommitResult Dataset::commit(std::vector<NewExample> batch) {
  std::vector<FieldDiagnostic> diags;
  std::vector<std::string> batch_ids;
  batch_ids.reserve(batch.size());
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const auto result = validate_example(spec_, batch[i].values);
    for (auto d : result.diagnostics) {
      d.field = "item " + std::to_string(i) + ": " + d.field;
      diags.push_back(std::move(d));
    }
    batch_ids.push_back(result.ok() ? canonical_hash(batch[i].values) : std::string());
  }

  std::unique_lock lock(mutex_);
  std::set<std::string> available;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const auto& parent = batch[i].meta.parent_id;
    if (parent && index_.count(*parent) == 0 && available.count(*parent) == 0) {
      diags.push_back(
          {"item " + std::to_string(i) + ": meta.parent_id", "existing id", *parent, "unknown parent id"});
    }
    if (!batch_ids[i].empty()) available.insert(batch_ids[i]);
  }
  if (!diags.empty()) throw load_error("commit rejected", std::move(diags));

  CommitResult result;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    result.ids.push_back(batch_ids[i]);
    if (index_.count(batch_ids[i]) > 0) {
      result.skipped.push_back(batch_ids[i]);
      continue;
    }
    insert_locked(std::make_shared<const Example>(
        Example{batch_ids[i], std::move(batch[i].values), std::move(batch[i].meta)}));
  }
  result.version = ++version_;
  lock.unlock();
  warn_capacity(*this);
  return result;
}

void Dataset::save_slice(const std::string& name, std::vector<std::string> ids, bool overwrite) {
  if (name.empty()) throw Error(ErrorCode::kInvalidArgument, "slice name must be non-empty", "name");
  std::unique_lock lock(mutex_);
  for (const auto& id : ids) {
    if (index_.count(id) == 0) {
      throw Error(ErrorCode::kNotFound, "unknown example id '" + id + "'", "ids");
    }
  }
  if (!overwrite && slices_.count(name) > 0) {
    throw Error(ErrorCode::kConflict, "slice exists", "name");
  }
  slices_[name] = std::move(ids);
}

std::vector<Slice> Dataset::list_slices() const {
  std::shared_lock lock(mutex_);
  std::vector<Slice> out;
  for (const auto& [name, ids] : slices_) out.push_back(Slice{name, ids});
  return out;
}

std::optional<Slice> Dataset::slice(std::string_view name) const {
  std::shared_lock lock(mutex_);
  auto it = slices_.find(std::string(name));
  if (it == slices_.end()) return std::nullopt;
  return Slice{it->first, it->second};
}

bool Dataset::delete_slice(std::string_view name) {
  std::unique_lock lock(mutex_);
  return slices_.erase(std::string(name)) > 0;
}

Json Dataset::to_session_json() const {
  std::shared_lock lock(mutex_);
  Json j = Json::object();
  j["spec"] = spec_to_json(spec_);
  Json examples = Json::array();
  for (const auto& ex : examples_) examples.push_back(example_to_json(*ex));
  j["examples"] = std::move(examples);
  Json slices = Json::object();
  for (const auto& [name, ids] : slices_) slices[name] = ids;
  j["slices"] = std::move(slices);
  return j;
}

Dataset Dataset::from_session_json(std::string name, const Json& session) {
  if (!session.is_object() || !session.contains("spec") || !session.contains("examples")) {
    throw Error(ErrorCode::kInvalidArgument, "session must contain 'spec' and 'examples'");
  }
  Spec spec = spec_from_json(session["spec"]);
  std::vector<Example> examples;
  for (const auto& item : session["examples"]) {
    if (!item.is_object() || !item.contains("values")) {
      throw Error(ErrorCode::kInvalidArgument, "session example missing 'values'");
    }
    Example ex;
    ex.id = item.value("id", std::string());
    ex.values = item["values"];
    ex.meta = meta_from_json(item.contains("meta") ? item["meta"] : Json());
    examples.push_back(std::move(ex));
  }
  Dataset ds(std::move(name), std::move(spec), std::move(examples));
  if (session.contains("slices")) {
    for (const auto& [slice_name, ids] : session["slices"].items()) {
      ds.save_slice(slice_name, ids.get<std::vector<std::string>>());
    }
  }
  warn_capacity(ds);
  return ds;
}

void Dataset::save_session(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kInvalidArgument, "cannot write session file: " + path.string());
  out << dump_compact(to_session_json()) << "\n";
}

Dataset Dataset::load_session(std::string name, const std::filesystem::path& path) {
  Json session;
  try {
    session = Json::parse(read_file(path));
  } catch (const Json::parse_error& e) {
    throw Error(ErrorCode::kInvalidArgument, "malformed session file " + path.string() + ": " + e.what());
  }
  return from_session_json(std::move(name), session);
}

Dataset load_tsv(const std::filesystem::path& path, std::string name, const Spec& spec,
                 const ColumnMap& columns, TsvOptions options) {
  for (const auto& [field, type] : spec) {
    const bool mapped = std::any_of(columns.begin(), columns.end(),
                                    [&](const auto& c) { return c.first == field; });
    if (!mapped) throw Error(ErrorCode::kInvalidArgument, "no column for field '" + field + "'", field);
  }
  for (const auto& [field, col] : columns) {
    if (!spec.contains(field)) {
      throw Error(ErrorCode::kInvalidArgument, "column map names unknown field '" + field + "'", field);
    }
  }

  const std::string content = read_file(path);
  const auto lines = split_lines(content);
  std::vector<FieldDiagnostic> diags;
  std::vector<Example> examples;
  std::set<std::string> seen;
  for (std::size_t i = options.skip_header ? 1 : 0; i < lines.size(); ++i) {
    const std::string_view line = lines[i];
    if (line.empty()) continue;
    const std::string where = "line " + std::to_string(i + 1);
    const auto cells = split_tabs(line);
    Json values = Json::object();
    bool row_ok = true;
    for (const auto& [field, col] : columns) {
      if (col >= cells.size()) {
        diags.push_back({where + ": " + field, "column " + std::to_string(col),
                         std::to_string(cells.size()) + " columns", "missing column"});
        row_ok = false;
        continue;
      }
      const FieldType& type = *spec.find(field);
      if (type.kind == FieldKind::kScalar || type.kind == FieldKind::kRegressionScore) {
        const auto real = parse_real(cells[col]);
        if (!real) {
          diags.push_back({where + ": " + field, "decimal real", std::string(cells[col]),
                           "unparseable number"});
          row_ok = false;
          continue;
        }
        values[field] = *real;
      } else {
        values[field] = std::string(cells[col]);
      }
    }
    if (!row_ok) continue;
    // Re-emit fields in spec order so every loaded example has the same layout.
    Json ordered = Json::object();
    for (const auto& [field, type] : spec) ordered[field] = values[field];
    const auto result = validate_example(spec, ordered);
    for (auto d : result.diagnostics) {
      d.field = where + ": " + d.field;
      diags.push_back(std::move(d));
    }
    if (!result.ok()) continue;
    std::string id = canonical_hash(ordered);
    if (!seen.insert(id).second) {
      std::clog << "warning: " << path.string() << " " << where
                << " duplicates an earlier row; skipped\n";
      continue;
    }
    examples.push_back(Example{std::move(id), std::move(ordered), {}});
  }
  if (!diags.empty()) throw load_error("failed to load " + path.string(), std::move(diags));
  Dataset ds(std::move(name), spec, std::move(examples));
  warn_capacity(ds);
  return ds;
}

Dataset load_jsonl(const std::filesystem::path& path, std::string name, const Spec& spec) {
  const std::string content = read_file(path);
  const auto lines = split_lines(content);
  std::vector<FieldDiagnostic> diags;
  std::vector<Example> examples;
  std::set<std::string> seen;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const std::string where = "line " + std::to_string(i + 1);
    Json values;
    try {
      values = Json::parse(lines[i]);
    } catch (const Json::parse_error& e) {
      diags.push_back({where, "JSON object", "malformed JSON", e.what()});
      continue;
    }
    const auto result = validate_example(spec, values);
    for (auto d : result.diagnostics) {
      d.field = where + ": " + d.field;
      diags.push_back(std::move(d));
    }
    if (!result.ok()) continue;
    std::string id = canonical_hash(values);
    if (!seen.insert(id).second) {
      std::clog << "warning: " << path.string() << " " << where
                << " duplicates an earlier line; skipped\n";
      continue;
    }
    examples.push_back(Example{std::move(id), std::move(values), {}});
  }
  if (!diags.empty()) throw load_error("failed to load " + path.string(), std::move(diags));
  Dataset ds(std::move(name), spec, std::move(examples));
  warn_capacity(ds);
  return ds;
}

}  // namespace lit
