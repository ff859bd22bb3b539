// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include <nlohmann/json.hpp>

#include "oasgen/errors.hpp"
#include "oasgen/oas.hpp"
#include "oasgen/schema.hpp"
#include "oasgen/scope.hpp"
#include "oasgen/text.hpp"

namespace oasgen::enrich {

using ordered_json = nlohmann::ordered_json;

struct ParameterRow {
  std::string name;                  // non-empty after parsing
  std::string type;                  // closed vocabulary; "" when unknown
  std::optional<bool> required;      // nullopt when unknown
  std::string location;              // path, query, header, body; "" unknown
  std::string description;           // whitespace-collapsed; "" when absent

  bool operator==(const ParameterRow&) const = default;
};

struct EnrichmentTable {
  std::vector<ParameterRow> rows;
  std::vector<std::string> header;  // column names as generated
};

struct ResponseEnrichmentSchema {
  schema::JsonSchemaNode root;
};

enum class Column { name, type, required, location, description, none };

namespace detail {

// Fuzzy header-cell mapping shared by the TSV parser and the table-reading
// provider stand-in, so both accept the same spellings.
inline Column column_from_header(const std::string& cell) {
  std::string c = text::to_lower(text::collapse_ws(cell));
  auto has = [&](std::string_view word) {
    for (const auto& t : text::word_tokens(c))
      if (t == word) return true;
    return false;
  };
  if (has("name") || has("parameter") || has("param") || has("field") ||
      has("property") || has("key"))
    return Column::name;
  if (has("type") || has("datatype")) return Column::type;
  if (has("required") || has("optional") || has("mandatory"))
    return Column::required;
  if (c == "in" || has("location") || has("where")) return Column::location;
  if (has("description") || has("details") || has("notes") || has("desc"))
    return Column::description;
  return Column::none;
}

inline std::string normalize_type_cell(const std::string& raw) {
  std::string t = text::to_lower(text::collapse_ws(raw));
  if (t == "int" || t == "integer") return "integer";
  if (t == "bool" || t == "boolean") return "boolean";
  if (t == "float" || t == "double" || t == "number") return "number";
  if (t == "string" || t == "array" || t == "object") return t;
  return "";  // unknown
}

inline std::optional<bool> parse_required_cell(const std::string& raw) {
  std::string t = text::to_lower(text::collapse_ws(raw));
  if (t == "yes" || t == "true" || t == "required") return true;
  if (t == "no" || t == "false" || t == "optional") return false;
  return std::nullopt;
}

inline std::string normalize_location_cell(const std::string& raw) {
  std::string t = text::to_lower(text::collapse_ws(raw));
  if (t == "path" || t == "query" || t == "header" || t == "body") return t;
  return "";  // unknown
}

inline std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == '\t') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

inline std::vector<std::string> split_lines(const std::string& body) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : body) {
    if (c == '\n') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

// `"user.id"` -> {"user", "id"}; names without dots come back whole
inline std::vector<std::string> dotted_segments(const std::string& name) {
  std::vector<std::string> segs;
  std::string cur;
  for (char c : name) {
    if (c == '.') {
      if (!cur.empty()) segs.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) segs.push_back(cur);
  return segs;
}

}  // namespace detail

// Tab-separated table with a fuzzy header row: the five canonical columns may
// arrive in any order and under alias spellings; extra columns are ignored;
// unknown cell values stay unknown rather than guessing.
inline EnrichmentTable parse_request_tsv(const std::string& body) {
  auto lines = detail::split_lines(body);

  EnrichmentTable table;
  std::vector<Column> columns;
  size_t row_start = 0;
  for (size_t i = 0; i < lines.size(); ++i) {
    if (text::trim(lines[i]).empty()) continue;
    auto cells = detail::split_tabs(lines[i]);
    if (cells.size() < 2)
      throw Error(errc::malformed_tsv, "header row has no tab separator");
    bool has_name = false;
    for (const auto& cell : cells) {
      Column c = detail::column_from_header(cell);
      columns.push_back(c);
      if (c == Column::name) has_name = true;
      table.header.push_back(text::collapse_ws(cell));
    }
    if (!has_name)
      throw Error(errc::malformed_tsv, "header row names no parameter column");
    row_start = i + 1;
    break;
  }
  if (columns.empty()) throw Error(errc::malformed_tsv, "no header row");

  for (size_t i = row_start; i < lines.size(); ++i) {
    if (text::trim(lines[i]).empty()) continue;
    auto cells = detail::split_tabs(lines[i]);
    ParameterRow row;
    for (size_t c = 0; c < cells.size() && c < columns.size(); ++c) {
      switch (columns[c]) {
        case Column::name: row.name = text::collapse_ws(cells[c]); break;
        case Column::type: row.type = detail::normalize_type_cell(cells[c]); break;
        case Column::required:
          row.required = detail::parse_required_cell(cells[c]);
          break;
        case Column::location:
          row.location = detail::normalize_location_cell(cells[c]);
          break;
        case Column::description:
          row.description = text::collapse_ws(cells[c]);
          break;
        case Column::none: break;
      }
    }
    if (row.name.empty()) continue;
    bool duplicate = false;
    for (const auto& prev : table.rows)
      duplicate = duplicate || (text::iequals(prev.name, row.name) &&
                                prev.location == row.location);
    if (!duplicate) table.rows.push_back(std::move(row));
  }
  if (table.rows.empty())
    throw Error(errc::malformed_tsv, "no parseable data rows");
  return table;
}

namespace detail {

inline std::string strip_code_fences(const std::string& body) {
  std::string t = text::trim(body);
  if (!text::starts_with(t, "```")) return t;
  auto first_nl = t.find('\n');
  if (first_nl == std::string::npos) return t;
  std::string inner = t.substr(first_nl + 1);
  auto closing = inner.rfind("```");
  if (closing != std::string::npos) inner = inner.substr(0, closing);
  return text::trim(inner);
}

}  // namespace detail

inline ResponseEnrichmentSchema parse_response_schema(const std::string& body) {
  std::string inner = detail::strip_code_fences(body);
  ordered_json doc;
  try {
    doc = ordered_json::parse(inner);
  } catch (const nlohmann::json::exception&) {
    throw Error(errc::malformed_schema, "response schema is not JSON");
  }
  return {schema::JsonSchemaNode::from_json(doc)};
}

namespace detail {

// case-insensitive word-boundary membership; dotted names need every segment
inline bool name_in_scope(const std::string& name,
                          const std::unordered_set<std::string>& tokens) {
  auto segs = dotted_segments(name);
  if (segs.empty()) return false;
  for (const auto& seg : segs) {
    bool found = true;
    for (const auto& part : text::word_tokens(seg)) found = found && tokens.count(part) > 0;
    if (!found || text::word_tokens(seg).empty()) return false;
  }
  return true;
}

inline std::unordered_set<std::string> scope_tokens(const scope::ProcessedScope& s) {
  auto tokens = text::word_token_set(s.visible_text);
  for (const auto& t : text::word_tokens(s.cleaned_html)) tokens.insert(t);
  return tokens;
}

inline void filter_schema_node(schema::JsonSchemaNode& node,
                               const std::unordered_set<std::string>& tokens,
                               const std::string& path,
                               std::vector<std::string>* audit) {
  if (!node.properties.empty()) {
    std::vector<std::pair<std::string, schema::JsonSchemaNode>> kept;
    std::unordered_set<std::string> dropped_names;
    for (auto& [name, child] : node.properties) {
      std::string child_path = path.empty() ? name : path + "." + name;
      if (name_in_scope(name, tokens)) {
        filter_schema_node(child, tokens, child_path, audit);
        kept.emplace_back(name, std::move(child));
      } else {
        dropped_names.insert(name);
        if (audit) audit->push_back(child_path);
      }
    }
    node.properties = std::move(kept);
    if (!dropped_names.empty()) {
      std::vector<std::string> req;
      for (auto& r : node.required)
        if (!dropped_names.count(r)) req.push_back(r);
      node.required = std::move(req);
    }
  }
  if (node.items) filter_schema_node(*node.items, tokens, path, audit);
}

}  // namespace detail

// Drops every row whose parameter name does not occur in the prompted scope
// (visible text or cleaned markup). Removed names land in `audit`.
inline EnrichmentTable filter_hallucinations(const EnrichmentTable& table,
                                             const scope::ProcessedScope& scope,
                                             std::vector<std::string>* audit = nullptr) {
  auto tokens = detail::scope_tokens(scope);
  EnrichmentTable out;
  out.header = table.header;
  for (const auto& row : table.rows) {
    if (detail::name_in_scope(row.name, tokens)) {
      out.rows.push_back(row);
    } else if (audit) {
      audit->push_back(row.name);
    }
  }
  return out;
}

inline ResponseEnrichmentSchema filter_hallucinations(
    const ResponseEnrichmentSchema& schema_in, const scope::ProcessedScope& scope,
    std::vector<std::string>* audit = nullptr) {
  auto tokens = detail::scope_tokens(scope);
  ResponseEnrichmentSchema out = schema_in;
  detail::filter_schema_node(out.root, tokens, "", audit);
  return out;
}

namespace detail {

inline bool is_http_method(const std::string& m) {
  static const std::vector<std::string> methods = {
      "get", "put", "post", "delete", "options", "head", "patch", "trace"};
  for (const auto& k : methods)
    if (m == k) return true;
  return false;
}

inline std::string esc(const std::string& token) {
  return schema::detail::escape_pointer_token(token);
}

// description + required follow the enrichment; type stays with the base
inline void merge_param_fields(ordered_json& param, const ParameterRow& row,
                               const std::string& param_ptr, builder::OasDocument& doc) {
  if (!row.description.empty()) {
    bool changed = !param.contains("description") ||
                   param["description"] != row.description;
    param["description"] = row.description;
    if (changed) doc.mark(param_ptr + "/description", "enrichment");
  }
  bool is_path = param.contains("in") && param["in"] == "path";
  if (row.required.has_value() && !is_path) {
    bool changed = !param.contains("required") ||
                   param["required"] != ordered_json(*row.required);
    param["required"] = *row.required;
    if (changed) doc.mark(param_ptr + "/required", "enrichment");
  }
  if (!row.type.empty() &&
      (!param.contains("schema") || !param["schema"].contains("type"))) {
    param["schema"]["type"] = row.type;
    doc.mark(param_ptr + "/schema/type", "enrichment");
  }
}

// Resolves (or creates) the dotted path inside a request-body schema and
// returns the property slot, or nullptr when an intermediate level is not an
// object to descend into.
inline ordered_json* body_property_slot(ordered_json& schema_json,
                                        const std::vector<std::string>& segs,
                                        bool create, std::string& ptr) {
  ordered_json* node = &schema_json;
  for (size_t i = 0; i < segs.size(); ++i) {
    if (!node->is_object()) return nullptr;
    if (!node->contains("properties")) {
      if (!create) return nullptr;
      (*node)["properties"] = ordered_json::object();
    }
    ordered_json& props = (*node)["properties"];
    std::string key;
    for (auto it = props.begin(); it != props.end(); ++it)
      if (text::iequals(it.key(), segs[i])) key = it.key();
    if (key.empty()) {
      if (!create) return nullptr;
      key = segs[i];
      props[key] = ordered_json::object();
    }
    ptr += "/properties/" + esc(key);
    node = &props[key];
  }
  return node;
}

inline void set_required_membership(ordered_json& schema_json,
                                    const std::string& name, bool required) {
  if (!schema_json.is_object()) return;
  ordered_json req = schema_json.contains("required")
                         ? schema_json["required"]
                         : ordered_json::array();
  ordered_json next = ordered_json::array();
  bool present = false;
  for (const auto& r : req) {
    if (r.is_string() && text::iequals(r.get<std::string>(), name)) {
      present = true;
      if (required) next.push_back(r);
    } else {
      next.push_back(r);
    }
  }
  if (required && !present) next.push_back(name);
  schema_json["required"] = next;
  if (schema_json["required"].empty()) schema_json.erase("required");
}

inline void merge_response_schema(ordered_json& base, const schema::JsonSchemaNode& enr,
                                  const std::string& ptr, builder::OasDocument& doc) {
  if (!base.is_object()) return;
  if (enr.description && !enr.description->empty()) {
    std::string desc = text::collapse_ws(*enr.description);
    bool changed = !base.contains("description") || base["description"] != desc;
    base["description"] = desc;
    if (changed) doc.mark(ptr + "/description", "enrichment");
  }
  if (!enr.properties.empty()) {
    // Dotted paths do not distinguish an array from its element, so child
    // properties of an array-typed base belong to the element schema.
    ordered_json* target = &base;
    std::string tptr = ptr;
    if (!base.contains("properties") && base.contains("items") &&
        base["items"].is_object()) {
      target = &base["items"];
      tptr += "/items";
    }
    if (!target->contains("properties"))
      (*target)["properties"] = ordered_json::object();
    ordered_json& props = (*target)["properties"];
    for (const auto& [name, child] : enr.properties) {
      std::string key;
      for (auto it = props.begin(); it != props.end(); ++it)
        if (text::iequals(it.key(), name)) key = it.key();
      if (key.empty()) {
        props[name] = child.to_json();
        doc.mark(tptr + "/properties/" + esc(name), "enrichment");
      } else {
        merge_response_schema(props[key], child,
                              tptr + "/properties/" + esc(key), doc);
      }
    }
    // a supplied required list replaces the base list for this object
    if (!enr.required.empty()) {
      ordered_json req = ordered_json::array();
      for (const auto& r : enr.required) {
        std::string resolved = r;
        for (auto it = props.begin(); it != props.end(); ++it)
          if (text::iequals(it.key(), r)) resolved = it.key();
        req.push_back(resolved);
      }
      bool changed =
          !target->contains("required") || (*target)["required"] != req;
      (*target)["required"] = req;
      if (changed) doc.mark(tptr + "/required", "enrichment");
    }
  }
  if (enr.items && base.contains("items"))
    merge_response_schema(base["items"], *enr.items, ptr + "/items", doc);
}

}  // namespace detail

// Folds enrichment into the base document. Description and required follow
// the enrichment; type and location stay with the base; parameters only the
// enrichment knows about are added; nothing from the base is ever deleted.
inline builder::OasDocument merge_enrichment(
    builder::OasDocument doc, const std::optional<EnrichmentTable>& request_table,
    const std::optional<ResponseEnrichmentSchema>& response_schema) {
  if (!doc.spec.contains("paths") || !doc.spec["paths"].is_object()) return doc;

  for (auto pit = doc.spec["paths"].begin(); pit != doc.spec["paths"].end(); ++pit) {
    if (!pit.value().is_object()) continue;
    for (auto oit = pit.value().begin(); oit != pit.value().end(); ++oit) {
      if (!detail::is_http_method(oit.key()) || !oit.value().is_object()) continue;
      ordered_json& op = oit.value();
      std::string op_ptr =
          "/paths/" + detail::esc(pit.key()) + "/" + oit.key();

      if (request_table) {
        ordered_json* body_schema = nullptr;
        if (op.contains("requestBody") &&
            op["requestBody"].contains("content") &&
            op["requestBody"]["content"].contains("application/json") &&
            op["requestBody"]["content"]["application/json"].contains("schema"))
          body_schema = &op["requestBody"]["content"]["application/json"]["schema"];
        std::string body_ptr =
            op_ptr + "/requestBody/content/application~1json/schema";

        for (const auto& row : request_table->rows) {
          // 1. match an operation parameter by name, location-agnostic
          bool matched = false;
          if (op.contains("parameters")) {
            ordered_json& params = op["parameters"];
            for (size_t i = 0; i < params.size(); ++i) {
              if (!params[i].contains("name") || !params[i]["name"].is_string())
                continue;
              if (!text::iequals(params[i]["name"].get<std::string>(), row.name))
                continue;
              detail::merge_param_fields(
                  params[i], row, op_ptr + "/parameters/" + std::to_string(i),
                  doc);
              matched = true;
            }
          }
          if (matched) continue;

          // 2. match a request-body property (dotted names descend)
          if (body_schema) {
            std::string prop_ptr = body_ptr;
            auto segs = detail::dotted_segments(row.name);
            ordered_json* slot =
                detail::body_property_slot(*body_schema, segs, false, prop_ptr);
            if (slot) {
              if (!row.description.empty()) {
                bool changed = !slot->contains("description") ||
                               (*slot)["description"] != row.description;
                (*slot)["description"] = row.description;
                if (changed) doc.mark(prop_ptr + "/description", "enrichment");
              }
              if (row.required.has_value() && segs.size() >= 1) {
                // membership in the owning object's required list
                std::string parent_ptr = body_ptr;
                std::vector<std::string> parents(segs.begin(), segs.end() - 1);
                ordered_json* parent = detail::body_property_slot(
                    *body_schema, parents, false, parent_ptr);
                if (parent)
                  detail::set_required_membership(*parent, segs.back(),
                                                  *row.required);
              }
              continue;
            }
          }

          // 3. nowhere in the base: add the parameter from the enrichment
          if (row.location == "body" && body_schema) {
            std::string prop_ptr = body_ptr;
            auto segs = detail::dotted_segments(row.name);
            ordered_json* slot =
                detail::body_property_slot(*body_schema, segs, true, prop_ptr);
            if (!slot) continue;
            (*slot)["type"] = row.type.empty() ? "string" : row.type;
            if (!row.description.empty())
              (*slot)["description"] = row.description;
            doc.mark(prop_ptr, "enrichment");
            if (row.required.has_value() && *row.required) {
              std::string parent_ptr = body_ptr;
              std::vector<std::string> parents(segs.begin(), segs.end() - 1);
              ordered_json* parent = detail::body_property_slot(
                  *body_schema, parents, false, parent_ptr);
              if (parent)
                detail::set_required_membership(*parent, segs.back(), true);
            }
            continue;
          }

          std::string in = row.location.empty() || row.location == "body"
                               ? "query"
                               : row.location;
          if (row.location == "body")
            doc.warnings.push_back("parameter " + row.name +
                                   " is documented as a body field but the "
                                   "document has no request body; added as a "
                                   "query parameter");
          ordered_json param;
          param["name"] = row.name;
          param["in"] = in;
          param["required"] =
              in == "path" ? true : row.required.value_or(false);
          param["schema"]["type"] = row.type.empty() ? "string" : row.type;
          if (!row.description.empty()) param["description"] = row.description;
          if (!op.contains("parameters"))
            op["parameters"] = ordered_json::array();
          op["parameters"].push_back(param);
          doc.mark(op_ptr + "/parameters/" +
                       std::to_string(op["parameters"].size() - 1),
                   "enrichment");
        }
      }

      if (response_schema && op.contains("responses")) {
        for (auto rit = op["responses"].begin(); rit != op["responses"].end();
             ++rit) {
          if (!rit.value().is_object() || !rit.value().contains("content"))
            continue;
          ordered_json& content = rit.value()["content"];
          if (!content.contains("application/json") ||
              !content["application/json"].contains("schema"))
            continue;
          detail::merge_response_schema(
              content["application/json"]["schema"], response_schema->root,
              op_ptr + "/responses/" + detail::esc(rit.key()) +
                  "/content/application~1json/schema",
              doc);
        }
      }
    }
  }
  return doc;
}

}  // namespace oasgen::enrich
