// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cctype>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "oasgen/errors.hpp"
#include "oasgen/text.hpp"

namespace oasgen::schema {

using ordered_json = nlohmann::ordered_json;

struct JsonSchemaNode {
  std::string type;  // empty = unconstrained
  std::vector<std::pair<std::string, JsonSchemaNode>> properties;
  std::shared_ptr<JsonSchemaNode> items;
  std::vector<std::string> required;
  bool nullable = false;
  std::optional<std::string> description;

  bool has_property(const std::string& name) const {
    for (const auto& [k, v] : properties)
      if (k == name) return true;
    return false;
  }
  JsonSchemaNode* find_property(const std::string& name) {
    for (auto& [k, v] : properties)
      if (k == name) return &v;
    return nullptr;
  }
  const JsonSchemaNode* find_property(const std::string& name) const {
    for (const auto& [k, v] : properties)
      if (k == name) return &v;
    return nullptr;
  }

  friend bool operator==(const JsonSchemaNode& a, const JsonSchemaNode& b) {
    if (a.type != b.type || a.nullable != b.nullable || a.required != b.required ||
        a.description != b.description)
      return false;
    if (a.properties.size() != b.properties.size()) return false;
    for (size_t i = 0; i < a.properties.size(); ++i) {
      if (a.properties[i].first != b.properties[i].first) return false;
      if (!(a.properties[i].second == b.properties[i].second)) return false;
    }
    if (static_cast<bool>(a.items) != static_cast<bool>(b.items)) return false;
    if (a.items && !(*a.items == *b.items)) return false;
    return true;
  }

  ordered_json to_json() const {
    ordered_json j = ordered_json::object();
    if (!type.empty()) j["type"] = type;
    if (nullable) j["nullable"] = true;
    if (description) j["description"] = *description;
    if (!properties.empty()) {
      ordered_json props = ordered_json::object();
      for (const auto& [k, v] : properties) props[k] = v.to_json();
      j["properties"] = std::move(props);
    }
    if (!required.empty()) j["required"] = required;
    if (items) j["items"] = items->to_json();
    return j;
  }

  static JsonSchemaNode from_json(const ordered_json& j) {
    JsonSchemaNode n;
    if (!j.is_object()) throw Error(errc::malformed_schema, "schema must be an object");
    if (j.contains("type")) {
      if (!j["type"].is_string())
        throw Error(errc::malformed_schema, "schema type must be a string");
      n.type = j["type"].get<std::string>();
      static const char* allowed[] = {"object", "array",   "string",
                                      "number", "integer", "boolean"};
      bool ok = false;
      for (const char* a : allowed) ok = ok || n.type == a;
      if (!ok) throw Error(errc::malformed_schema, "unknown schema type: " + n.type);
    }
    if (j.contains("nullable")) {
      if (!j["nullable"].is_boolean())
        throw Error(errc::malformed_schema, "nullable must be boolean");
      n.nullable = j["nullable"].get<bool>();
    }
    if (j.contains("description")) {
      if (!j["description"].is_string())
        throw Error(errc::malformed_schema, "description must be a string");
      n.description = text::collapse_ws(j["description"].get<std::string>());
    }
    if (j.contains("properties")) {
      if (!j["properties"].is_object())
        throw Error(errc::malformed_schema, "properties must be an object");
      if (!n.type.empty() && n.type != "object")
        throw Error(errc::malformed_schema, "properties on non-object schema");
      for (auto it = j["properties"].begin(); it != j["properties"].end(); ++it)
        n.properties.emplace_back(it.key(), from_json(it.value()));
    }
    if (j.contains("items")) {
      if (!n.type.empty() && n.type != "array")
        throw Error(errc::malformed_schema, "items on non-array schema");
      n.items = std::make_shared<JsonSchemaNode>(from_json(j["items"]));
    }
    if (j.contains("required")) {
      if (!j["required"].is_array())
        throw Error(errc::malformed_schema, "required must be an array");
      for (const auto& r : j["required"]) {
        if (!r.is_string())
          throw Error(errc::malformed_schema, "required entries must be strings");
        n.required.push_back(r.get<std::string>());
      }
      for (const auto& r : n.required)
        if (!n.has_property(r))
          throw Error(errc::malformed_schema, "required name not in properties: " + r);
    }
    return n;
  }
};

struct Segment {
  int index = 0;
  std::string text;
  std::string json_pointer_prefix;
};

namespace detail {

inline int line_count(const std::string& s) {
  return static_cast<int>(std::count(s.begin(), s.end(), '\n')) + 1;
}

inline std::string pretty(const ordered_json& v) { return v.dump(2); }

inline std::string escape_pointer_token(const std::string& tok) {
  std::string out;
  for (char c : tok) {
    if (c == '~') out += "~0";
    else if (c == '/') out += "~1";
    else out.push_back(c);
  }
  return out;
}

inline std::string unescape_pointer_token(const std::string& tok) {
  std::string out;
  for (size_t i = 0; i < tok.size(); ++i) {
    if (tok[i] == '~' && i + 1 < tok.size()) {
      if (tok[i + 1] == '0') {
        out.push_back('~');
        ++i;
        continue;
      }
      if (tok[i + 1] == '1') {
        out.push_back('/');
        ++i;
        continue;
      }
    }
    out.push_back(tok[i]);
  }
  return out;
}

inline std::vector<std::string> pointer_tokens(const std::string& prefix) {
  std::vector<std::string> out;
  size_t i = 0;
  while (i < prefix.size()) {
    if (prefix[i] != '/') throw Error(errc::inconsistent_prefixes, "bad pointer: " + prefix);
    size_t next = prefix.find('/', i + 1);
    if (next == std::string::npos) next = prefix.size();
    out.push_back(unescape_pointer_token(prefix.substr(i + 1, next - i - 1)));
    i = next;
  }
  return out;
}

inline void segment_value(const ordered_json& v, const std::string& prefix,
                          int threshold, std::vector<Segment>& out) {
  std::string printed = pretty(v);
  if (line_count(printed) <= threshold) {
    out.push_back({static_cast<int>(out.size()), std::move(printed), prefix});
    return;
  }
  if (v.is_object()) {
    ordered_json chunk = ordered_json::object();
    auto flush = [&]() {
      if (chunk.empty()) return;
      out.push_back({static_cast<int>(out.size()), pretty(chunk), prefix});
      chunk = ordered_json::object();
    };
    for (auto it = v.begin(); it != v.end(); ++it) {
      ordered_json lone = ordered_json::object();
      lone[it.key()] = it.value();
      if (line_count(pretty(lone)) > threshold) {
        // this key alone cannot fit: descend into its value
        flush();
        segment_value(it.value(), prefix + "/" + escape_pointer_token(it.key()),
                      threshold, out);
        continue;
      }
      ordered_json trial = chunk;
      trial[it.key()] = it.value();
      if (!chunk.empty() && line_count(pretty(trial)) > threshold) flush();
      chunk[it.key()] = it.value();
    }
    flush();
    return;
  }
  if (v.is_array()) {
    ordered_json chunk = ordered_json::array();
    auto flush = [&]() {
      if (chunk.empty()) return;
      out.push_back({static_cast<int>(out.size()), pretty(chunk), prefix});
      chunk = ordered_json::array();
    };
    for (size_t i = 0; i < v.size(); ++i) {
      ordered_json lone = ordered_json::array();
      lone.push_back(v[i]);
      if (line_count(pretty(lone)) > threshold) {
        flush();
        segment_value(v[i], prefix + "/" + std::to_string(i), threshold, out);
        continue;
      }
      ordered_json trial = chunk;
      trial.push_back(v[i]);
      if (!chunk.empty() && line_count(pretty(trial)) > threshold) flush();
      chunk.push_back(v[i]);
    }
    flush();
    return;
  }
  // scalar too large for the threshold: oversized atomic segment
  out.push_back({static_cast<int>(out.size()), std::move(printed), prefix});
}

}  // namespace detail

// Splits a JSON document at key boundaries so each piece pretty-prints within
// the line threshold; unsplittable values become oversized segments. Pointer
// prefixes let aggregation put the pieces back.
inline std::vector<Segment> segment_example(const std::string& json_text,
                                            int line_threshold) {
  if (line_threshold <= 0)
    throw Error(errc::invalid_threshold, "line threshold must be positive");
  if (!ordered_json::accept(json_text))
    throw Error(errc::not_json, "segmentation input is not JSON");
  ordered_json doc = ordered_json::parse(json_text);
  std::vector<Segment> out;
  detail::segment_value(doc, "", line_threshold, out);
  return out;
}

namespace detail {

// element-unification lattice: higher wins on type conflicts, except the
// integer/number pair which widens to number
inline int type_priority(const std::string& t) {
  if (t == "object") return 6;
  if (t == "array") return 5;
  if (t == "string") return 4;
  if (t == "number") return 3;
  if (t == "integer") return 2;
  if (t == "boolean") return 1;
  return 0;
}

}  // namespace detail

// Commutative, associative join used to unify array element schemas. The
// empty type acts as a null sentinel that only contributes nullability.
inline JsonSchemaNode join_schemas(const JsonSchemaNode& a, const JsonSchemaNode& b) {
  if (a.type.empty() && a.properties.empty() && !a.items) {
    JsonSchemaNode r = b;
    r.nullable = r.nullable || a.nullable || b.nullable;
    return r;
  }
  if (b.type.empty() && b.properties.empty() && !b.items) {
    JsonSchemaNode r = a;
    r.nullable = r.nullable || b.nullable || a.nullable;
    return r;
  }
  if (a.type != b.type) {
    if ((a.type == "integer" && b.type == "number") ||
        (a.type == "number" && b.type == "integer")) {
      JsonSchemaNode r;
      r.type = "number";
      r.nullable = a.nullable || b.nullable;
      return r;
    }
    const JsonSchemaNode& win =
        detail::type_priority(a.type) >= detail::type_priority(b.type) ? a : b;
    JsonSchemaNode r = win;
    r.nullable = a.nullable || b.nullable;
    return r;
  }
  JsonSchemaNode r;
  r.type = a.type;
  r.nullable = a.nullable || b.nullable;
  r.description = a.description ? a.description : b.description;
  if (a.type == "object") {
    for (const auto& [k, v] : a.properties) {
      const JsonSchemaNode* other = b.find_property(k);
      r.properties.emplace_back(k, other ? join_schemas(v, *other) : v);
    }
    for (const auto& [k, v] : b.properties)
      if (!r.has_property(k)) r.properties.emplace_back(k, v);
    // a key stays required only when required on both sides
    for (const auto& name : a.required)
      if (std::find(b.required.begin(), b.required.end(), name) != b.required.end())
        r.required.push_back(name);
  } else if (a.type == "array") {
    if (a.items && b.items)
      r.items = std::make_shared<JsonSchemaNode>(join_schemas(*a.items, *b.items));
    else if (a.items)
      r.items = a.items;
    else
      r.items = b.items;
  }
  return r;
}

namespace detail {

inline JsonSchemaNode infer_raw(const ordered_json& v);

inline bool is_sentinel(const JsonSchemaNode& n) {
  return n.type.empty() && n.properties.empty() && !n.items;
}

// The string default for bare nulls runs once, after all unification: at the
// whole-document root and on object property values. Folding keeps the
// typeless sentinel so sibling evidence in other elements or segments can
// still type a null; an all-null array reports typeless nullable items.
inline JsonSchemaNode string_default(JsonSchemaNode n) {
  if (is_sentinel(n) && n.nullable) n.type = "string";
  return n;
}

inline void apply_property_defaults(JsonSchemaNode& n) {
  for (auto& [k, v] : n.properties) {
    v = string_default(std::move(v));
    apply_property_defaults(v);
  }
  if (n.items) apply_property_defaults(*n.items);
}

inline JsonSchemaNode finalize_defaults(JsonSchemaNode n) {
  n = string_default(std::move(n));
  apply_property_defaults(n);
  return n;
}

inline JsonSchemaNode infer_raw(const ordered_json& v) {
  JsonSchemaNode n;
  if (v.is_null()) {
    n.nullable = true;
    return n;
  }
  if (v.is_string()) {
    n.type = "string";
    return n;
  }
  if (v.is_boolean()) {
    n.type = "boolean";
    return n;
  }
  if (v.is_number_integer() || v.is_number_unsigned()) {
    n.type = "integer";
    return n;
  }
  if (v.is_number()) {
    n.type = "number";
    return n;
  }
  if (v.is_array()) {
    n.type = "array";
    if (!v.empty()) {
      JsonSchemaNode acc = infer_raw(v[0]);
      for (size_t i = 1; i < v.size(); ++i) acc = join_schemas(acc, infer_raw(v[i]));
      n.items = std::make_shared<JsonSchemaNode>(std::move(acc));
    }
    return n;
  }
  // object: every observed key required, document order kept
  n.type = "object";
  for (auto it = v.begin(); it != v.end(); ++it) {
    n.properties.emplace_back(it.key(), infer_raw(it.value()));
    n.required.push_back(it.key());
  }
  return n;
}

}  // namespace detail

// Reference schema inference: strings, booleans, integer-valued numbers,
// numbers; null marks the sibling-evidenced type nullable (string default);
// arrays unify element schemas; object keys are all required.
inline JsonSchemaNode infer_value_schema(const ordered_json& value) {
  return detail::finalize_defaults(detail::infer_raw(value));
}

// A segment rooted at the document ("" prefix) takes the root string default;
// a partial segment keeps a bare-null root typeless so sibling evidence from
// other segments can still type it during aggregation.
inline JsonSchemaNode infer_segment_schema(const Segment& seg) {
  if (!ordered_json::accept(seg.text))
    throw Error(errc::not_json, "segment text is not JSON");
  JsonSchemaNode n = detail::infer_raw(ordered_json::parse(seg.text));
  if (seg.json_pointer_prefix.empty()) n = detail::finalize_defaults(std::move(n));
  return n;
}

struct AggregateResult {
  JsonSchemaNode root;
  std::vector<std::string> warnings;
};

namespace detail {

inline bool all_digits(const std::string& s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  return true;
}

inline void merge_parts(JsonSchemaNode& a, const JsonSchemaNode& b,
                        const std::string& path, std::vector<std::string>& warnings) {
  if (a.type != b.type) {
    warnings.push_back("type conflict at '" + (path.empty() ? "/" : path) + "': '" +
                       (a.type.empty() ? "none" : a.type) + "' vs '" +
                       (b.type.empty() ? "none" : b.type) + "', keeping first");
    a.nullable = a.nullable || b.nullable;
    return;
  }
  a.nullable = a.nullable || b.nullable;
  if (!a.description && b.description) a.description = b.description;
  if (a.type == "object") {
    for (const auto& [k, v] : b.properties) {
      JsonSchemaNode* mine = a.find_property(k);
      if (mine) {
        merge_parts(*mine, v, path + "/" + escape_pointer_token(k), warnings);
      } else {
        a.properties.emplace_back(k, v);
      }
    }
    // union of required names, first-seen order
    for (const auto& name : b.required)
      if (std::find(a.required.begin(), a.required.end(), name) == a.required.end())
        a.required.push_back(name);
  } else if (a.type == "array") {
    if (a.items && b.items)
      *a.items = join_schemas(*a.items, *b.items);
    else if (!a.items && b.items)
      a.items = b.items;
  }
}

// Parts grouped by pointer path. Fragments of one container merge with union
// semantics; distinct array elements join with element-unification semantics.
struct PartTrie {
  struct Child;
  std::vector<std::pair<int, JsonSchemaNode>> direct;  // (arrival order, part)
  std::vector<Child> children;
  PartTrie* descend(const std::string& token, int seq);
};

struct PartTrie::Child {
  std::string token;
  int seq;  // arrival order of the first part under this edge
  PartTrie sub;
};

inline PartTrie* PartTrie::descend(const std::string& token, int seq) {
  for (auto& c : children)
    if (c.token == token) return &c.sub;
  children.push_back(Child{token, seq, PartTrie{}});
  return &children.back().sub;
}

inline JsonSchemaNode fold_trie(const PartTrie& t, const std::string& path,
                                std::vector<std::string>& warnings) {
  // decide what this node is: explicit part types win, then edge spelling
  std::string kind;
  for (const auto& [seq, node] : t.direct)
    if (!node.type.empty()) {
      kind = node.type;
      break;
    }
  if (kind.empty() && !t.children.empty()) {
    bool digits = true, words = true;
    for (const auto& c : t.children) {
      if (all_digits(c.token)) words = false;
      else digits = false;
    }
    if (digits == words)
      throw Error(errc::inconsistent_prefixes,
                  "edges mix array indices and object keys at " +
                      (path.empty() ? "/" : path));
    kind = digits ? "array" : "object";
  }
  if (!t.children.empty()) {
    if (kind != "object" && kind != "array")
      throw Error(errc::inconsistent_prefixes,
                  "prefix descends into scalar at " + (path.empty() ? "/" : path));
    if (kind == "array")
      for (const auto& c : t.children)
        if (!all_digits(c.token))
          throw Error(errc::inconsistent_prefixes,
                      "object key under array at " + path + "/" + c.token);
  }

  // replay contributions in segment arrival order so properties keep the
  // original document order
  struct Contrib {
    int seq;
    int child_idx;                // -1 for a direct part
    const JsonSchemaNode* part;   // null for a child edge
  };
  std::vector<Contrib> order;
  for (const auto& [seq, node] : t.direct) order.push_back({seq, -1, &node});
  for (size_t i = 0; i < t.children.size(); ++i)
    order.push_back({t.children[i].seq, static_cast<int>(i), nullptr});
  std::stable_sort(order.begin(), order.end(),
                   [](const Contrib& a, const Contrib& b) { return a.seq < b.seq; });

  JsonSchemaNode acc;
  bool acc_set = false;
  if (!t.children.empty()) {
    acc.type = kind;
    acc_set = true;
  }
  for (const auto& c : order) {
    if (c.part) {
      if (!acc_set) {
        acc = *c.part;
        acc_set = true;
      } else {
        merge_parts(acc, *c.part, path, warnings);
      }
      continue;
    }
    const auto& edge = t.children[c.child_idx];
    std::string child_path = path + "/" + escape_pointer_token(edge.token);
    JsonSchemaNode sub = fold_trie(edge.sub, child_path, warnings);
    if (kind == "array") {
      if (acc.items)
        *acc.items = join_schemas(*acc.items, sub);
      else
        acc.items = std::make_shared<JsonSchemaNode>(std::move(sub));
      continue;
    }
    JsonSchemaNode* existing = acc.find_property(edge.token);
    if (existing) {
      bool mergeable =
          existing->type == sub.type || existing->type.empty() || sub.type.empty();
      if (!mergeable)
        throw Error(errc::inconsistent_prefixes,
                    "prefix payload conflicts with part at " + child_path);
      merge_parts(*existing, sub, child_path, warnings);
    } else {
      acc.properties.emplace_back(edge.token, std::move(sub));
      if (std::find(acc.required.begin(), acc.required.end(), edge.token) ==
          acc.required.end())
        acc.required.push_back(edge.token);
    }
  }
  return acc;
}

}  // namespace detail

// Reassembles per-segment schemas: each part grafted at its pointer prefix,
// intermediate objects and arrays materialized from the prefix structure.
// Type conflicts keep the first-seen type and record a warning.
inline AggregateResult aggregate_segments(
    const std::vector<std::pair<std::string, JsonSchemaNode>>& parts) {
  AggregateResult result;
  detail::PartTrie root;
  int seq = 0;
  for (const auto& [prefix, node] : parts) {
    detail::PartTrie* cur = &root;
    for (const auto& tok : detail::pointer_tokens(prefix)) cur = cur->descend(tok, seq);
    cur->direct.emplace_back(seq, node);
    ++seq;
  }
  if (root.direct.empty() && root.children.empty()) return result;
  result.root = detail::fold_trie(root, "", result.warnings);
  detail::apply_property_defaults(result.root);
  return result;
}

}  // namespace oasgen::schema
