// SPDX-License-Identifier: Apache-2.0
#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <set>
#include <string>
#include <vector>

#include "oasgen/schema.hpp"
#include "support/random_json.hpp"
#include "support/schema_oracle.hpp"

using namespace oasgen;
using ordered_json = nlohmann::ordered_json;

namespace {

using oracles::oracle_infer;
using oracles::oracle_join;

// order-insensitive semantic view (plain json sorts object keys)
nlohmann::json semantic(const ordered_json& j) {
  return nlohmann::json::parse(j.dump());
}

// pins property and required-name ordering, which dump-level equality of the
// sorted view cannot see
std::string ordering_trace(const ordered_json& j) {
  std::string out;
  if (!j.is_object()) return out;
  if (j.contains("properties")) {
    out += "(";
    for (auto it = j["properties"].begin(); it != j["properties"].end(); ++it) {
      out += it.key();
      out += ":";
      out += ordering_trace(it.value());
      out += ",";
    }
    out += ")";
  }
  if (j.contains("required")) {
    out += "req{";
    for (const auto& r : j["required"]) {
      out += r.get<std::string>();
      out += ",";
    }
    out += "}";
  }
  if (j.contains("items")) {
    out += "[";
    out += ordering_trace(j["items"]);
    out += "]";
  }
  return out;
}

// ---- independent reassembly oracle: graft segment values back together ----

std::vector<std::string> split_pointer(const std::string& prefix) {
  std::vector<std::string> toks;
  size_t i = 0;
  while (i < prefix.size()) {
    REQUIRE(prefix[i] == '/');
    size_t next = prefix.find('/', i + 1);
    if (next == std::string::npos) next = prefix.size();
    std::string raw = prefix.substr(i + 1, next - i - 1);
    std::string tok;
    for (size_t k = 0; k < raw.size(); ++k) {
      if (raw[k] == '~' && k + 1 < raw.size() && raw[k + 1] == '0') {
        tok += '~';
        ++k;
      } else if (raw[k] == '~' && k + 1 < raw.size() && raw[k + 1] == '1') {
        tok += '/';
        ++k;
      } else {
        tok += raw[k];
      }
    }
    toks.push_back(tok);
    i = next;
  }
  return toks;
}

bool digits_only(const std::string& s) {
  if (s.empty()) return false;
  for (char c : s)
    if (c < '0' || c > '9') return false;
  return true;
}

void merge_slot(ordered_json& slot, const ordered_json& frag) {
  if (slot.is_null() && !frag.is_null()) {
    slot = frag;
    return;
  }
  if (slot.is_object() && frag.is_object()) {
    for (auto it = frag.begin(); it != frag.end(); ++it) slot[it.key()] = it.value();
    return;
  }
  if (slot.is_array() && frag.is_array()) {
    for (const auto& e : frag) slot.push_back(e);
    return;
  }
  slot = frag;
}

ordered_json reassemble(const std::vector<schema::Segment>& segs) {
  ordered_json recon;
  for (const auto& seg : segs) {
    ordered_json frag = ordered_json::parse(seg.text);
    auto toks = split_pointer(seg.json_pointer_prefix);
    ordered_json* cur = &recon;
    for (size_t t = 0; t + 1 < toks.size(); ++t) {
      const std::string& tok = toks[t];
      if (cur->is_null()) *cur = digits_only(tok) ? ordered_json::array()
                                                  : ordered_json::object();
      if (cur->is_array()) {
        size_t idx = std::stoul(tok);
        if (idx == cur->size()) cur->push_back(nullptr);
        REQUIRE(idx < cur->size());
        cur = &(*cur)[idx];
      } else {
        if (!cur->contains(tok)) (*cur)[tok] = nullptr;
        cur = &(*cur)[tok];
      }
    }
    if (toks.empty()) {
      merge_slot(recon, frag);
      continue;
    }
    const std::string& last = toks.back();
    if (cur->is_null()) *cur = digits_only(last) ? ordered_json::array()
                                                 : ordered_json::object();
    if (cur->is_array()) {
      size_t idx = std::stoul(last);
      if (idx == cur->size()) cur->push_back(frag);
      else merge_slot((*cur)[idx], frag);
    } else {
      if (!cur->contains(last)) (*cur)[last] = frag;
      else merge_slot((*cur)[last], frag);
    }
  }
  return recon;
}

std::string collect_keys(const ordered_json& v) {
  std::string out;
  if (v.is_object()) {
    for (auto it = v.begin(); it != v.end(); ++it) {
      out += it.key();
      out += '|';
      out += collect_keys(it.value());
    }
  } else if (v.is_array()) {
    for (const auto& e : v) out += collect_keys(e);
  }
  return out;
}

ordered_json make_wide_object(int keys_outer, int keys_inner) {
  ordered_json doc = ordered_json::object();
  for (int i = 0; i < keys_outer; ++i) {
    ordered_json inner = ordered_json::object();
    for (int j = 0; j < keys_inner; ++j)
      inner["field" + std::to_string(j)] = j;
    doc["key" + std::to_string(i)] = inner;
  }
  return doc;
}

schema::JsonSchemaNode infer_text(const std::string& text) {
  schema::Segment seg{0, text, ""};
  return schema::infer_segment_schema(seg);
}

}  // namespace

TEST_CASE("small documents stay whole under a large threshold") {
  ordered_json doc = make_wide_object(2, 2);  // 10 pretty-printed lines
  std::string text = doc.dump(2);
  REQUIRE(std::count(text.begin(), text.end(), '\n') + 1 == 10);
  auto segs = schema::segment_example(text, 40);
  REQUIRE(segs.size() == 1);
  REQUIRE(segs[0].index == 0);
  REQUIRE(segs[0].json_pointer_prefix == "");
  REQUIRE(ordered_json::parse(segs[0].text) == doc);
}

TEST_CASE("wide documents split at key boundaries and recombine") {
  ordered_json doc = make_wide_object(10, 8);  // 102 lines
  std::string text = doc.dump(2);
  REQUIRE(std::count(text.begin(), text.end(), '\n') + 1 > 100);
  auto segs = schema::segment_example(text, 40);
  REQUIRE(segs.size() >= 3);
  for (const auto& s : segs) {
    REQUIRE(ordered_json::accept(s.text));
    REQUIRE(std::count(s.text.begin(), s.text.end(), '\n') + 1 <= 40);
  }
  ordered_json recon = reassemble(segs);
  REQUIRE(recon == doc);
  REQUIRE(collect_keys(recon) == collect_keys(doc));
}

TEST_CASE("segmentation rejects bad thresholds and non-JSON") {
  try {
    schema::segment_example("{}", 0);
    FAIL("expected invalid threshold");
  } catch (const Error& e) {
    REQUIRE(e.code() == errc::invalid_threshold);
  }
  try {
    schema::segment_example("{}", -3);
    FAIL("expected invalid threshold");
  } catch (const Error& e) {
    REQUIRE(e.code() == errc::invalid_threshold);
  }
  try {
    schema::segment_example("{not json", 40);
    FAIL("expected not-json");
  } catch (const Error& e) {
    REQUIRE(e.code() == errc::not_json);
  }
}

TEST_CASE("pointer prefixes escape slashes and tildes") {
  ordered_json inner = ordered_json::object();
  for (int j = 0; j < 6; ++j) inner["f" + std::to_string(j)] = j;
  ordered_json doc = ordered_json::object();
  doc["a/b"] = ordered_json::object();
  doc["a/b"]["c~d"] = inner;
  auto segs = schema::segment_example(doc.dump(2), 3);
  bool saw_escaped = false;
  for (const auto& s : segs)
    if (s.json_pointer_prefix.find("a~1b") != std::string::npos &&
        s.json_pointer_prefix.find("c~0d") != std::string::npos)
      saw_escaped = true;
  REQUIRE(saw_escaped);
  REQUIRE(reassemble(segs) == doc);
}

TEST_CASE("segments parse and recombine across random documents (property)") {
  std::mt19937_64 rng(20240816);
  const int thresholds[] = {1, 5, 40};
  for (int iter = 0; iter < 60; ++iter) {
    ordered_json doc = testgen::random_json_document(rng);
    std::string text = doc.dump(2);
    for (int t : thresholds) {
      CAPTURE(iter, t, text);
      auto segs = schema::segment_example(text, t);
      REQUIRE(!segs.empty());
      for (size_t i = 0; i < segs.size(); ++i) {
        REQUIRE(segs[i].index == static_cast<int>(i));
        REQUIRE(ordered_json::accept(segs[i].text));
      }
      REQUIRE(reassemble(segs) == doc);
    }
  }
}

TEST_CASE("schema inference fixtures") {
  SECTION("single integer key") {
    auto n = infer_text("{\"a\": 1}");
    REQUIRE(n.type == "object");
    REQUIRE(n.properties.size() == 1);
    REQUIRE(n.properties[0].first == "a");
    REQUIRE(n.properties[0].second.type == "integer");
    REQUIRE(n.required == std::vector<std::string>{"a"});
  }
  SECTION("empty array has unconstrained items") {
    auto n = infer_text("[]");
    REQUIRE(n.type == "array");
    REQUIRE(!n.items);
  }
  SECTION("null maps to nullable string by default") {
    auto n = infer_text("{\"a\": null}");
    REQUIRE(n.properties[0].second.type == "string");
    REQUIRE(n.properties[0].second.nullable);
  }
  SECTION("null element marks sibling type nullable") {
    auto n = infer_text("[null, 5]");
    REQUIRE(n.items);
    REQUIRE(n.items->type == "integer");
    REQUIRE(n.items->nullable);
  }
  SECTION("all-null arrays keep typeless nullable items") {
    auto n = infer_text("[null]");
    REQUIRE(n.items);
    REQUIRE(n.items->type.empty());
    REQUIRE(n.items->nullable);
  }
  SECTION("a bare null document takes the root string default") {
    auto n = infer_text("null");
    REQUIRE(n.type == "string");
    REQUIRE(n.nullable);
  }
  SECTION("sibling elements type a null property across the array") {
    auto n = infer_text("[{\"flag\": null}, {\"flag\": 1}]");
    const auto* flag = n.items->find_property("flag");
    REQUIRE(flag != nullptr);
    REQUIRE(flag->type == "integer");
    REQUIRE(flag->nullable);
  }
  SECTION("a partial null segment stays typeless for later unification") {
    schema::Segment partial{0, "null", "/a"};
    auto n = schema::infer_segment_schema(partial);
    REQUIRE(n.type.empty());
    REQUIRE(n.nullable);
  }
  SECTION("integer and float elements widen to number") {
    auto n = infer_text("[1, 2.5]");
    REQUIRE(n.items->type == "number");
    REQUIRE(!n.items->nullable);
  }
  SECTION("object elements keep only mutual keys required") {
    auto n = infer_text("[{\"a\": 1}, {\"a\": 2, \"b\": 3}]");
    REQUIRE(n.items->type == "object");
    REQUIRE(n.items->properties.size() == 2);
    REQUIRE(n.items->required == std::vector<std::string>{"a"});
  }
  SECTION("number kinds") {
    REQUIRE(infer_text("3").type == "integer");
    REQUIRE(infer_text("-7").type == "integer");
    REQUIRE(infer_text("3.25").type == "number");
    REQUIRE(infer_text("true").type == "boolean");
    REQUIRE(infer_text("\"x\"").type == "string");
  }
}

TEST_CASE("inference matches a brute-force value-tree oracle (property)") {
  std::mt19937_64 rng(77001);
  for (int iter = 0; iter < 200; ++iter) {
    ordered_json value = testgen::random_json_value(rng, 4);
    CAPTURE(iter, value.dump());
    ordered_json got = schema::infer_value_schema(value).to_json();
    ordered_json want = oracle_infer(value);
    CAPTURE(got.dump(), want.dump());
    REQUIRE(semantic(got) == semantic(want));
    REQUIRE(ordering_trace(got) == ordering_trace(want));
  }
}

TEST_CASE("inference is stable across reserialization") {
  std::mt19937_64 rng(5150);
  SECTION("notation changes do not change the schema") {
    auto a = infer_text("{\"x\": 2.5e3}");
    auto b = infer_text(ordered_json::parse("{\"x\": 2.5e3}").dump(2));
    REQUIRE(a == b);
  }
  SECTION("random documents") {
    for (int iter = 0; iter < 80; ++iter) {
      ordered_json doc = testgen::random_json_document(rng);
      std::string text = doc.dump();
      auto once = infer_text(text);
      auto again = infer_text(ordered_json::parse(text).dump(2));
      CAPTURE(iter, text);
      REQUIRE(once == again);
    }
  }
}

TEST_CASE("aggregation identities and unions") {
  SECTION("single part at the root is returned unchanged") {
    auto n = infer_text("{\"a\": 1, \"b\": [true]}");
    auto agg = schema::aggregate_segments({{"", n}});
    REQUIRE(agg.root == n);
    REQUIRE(agg.warnings.empty());
  }
  SECTION("disjoint root parts union like the unsplit document") {
    auto part_a = infer_text("{\"a\": 1}");
    auto part_b = infer_text("{\"b\": \"x\"}");
    auto agg = schema::aggregate_segments({{"", part_a}, {"", part_b}});
    REQUIRE(agg.warnings.empty());
    REQUIRE(agg.root == infer_text("{\"a\": 1, \"b\": \"x\"}"));
  }
  SECTION("identical overlapping keys deduplicate silently") {
    auto part = infer_text("{\"a\": 1}");
    auto agg = schema::aggregate_segments({{"", part}, {"", part}});
    REQUIRE(agg.warnings.empty());
    REQUIRE(agg.root == part);
  }
  SECTION("type conflict keeps first-seen and records one warning") {
    auto part_a = infer_text("{\"k\": 1}");
    auto part_b = infer_text("{\"k\": \"s\"}");
    auto agg = schema::aggregate_segments({{"", part_a}, {"", part_b}});
    REQUIRE(agg.root.properties[0].second.type == "integer");
    REQUIRE(agg.warnings.size() == 1);
    REQUIRE(agg.warnings[0].find("/k") != std::string::npos);
  }
}

TEST_CASE("aggregation grafts deep prefixes with intermediate nodes") {
  schema::JsonSchemaNode leaf;
  leaf.type = "integer";
  auto agg = schema::aggregate_segments({{"/a/b", leaf}});
  REQUIRE(agg.root.type == "object");
  REQUIRE(agg.root.required == std::vector<std::string>{"a"});
  const auto* a = agg.root.find_property("a");
  REQUIRE(a != nullptr);
  REQUIRE(a->type == "object");
  REQUIRE(a->required == std::vector<std::string>{"b"});
  REQUIRE(a->find_property("b")->type == "integer");
}

TEST_CASE("aggregation unifies array item parts") {
  schema::JsonSchemaNode s;
  s.type = "string";
  auto agg = schema::aggregate_segments({{"/items/0", s}, {"/items/1", s}});
  const auto* items = agg.root.find_property("items");
  REQUIRE(items != nullptr);
  REQUIRE(items->type == "array");
  REQUIRE(items->items);
  REQUIRE(items->items->type == "string");
  REQUIRE(agg.warnings.empty());
}

TEST_CASE("aggregation rejects inconsistent prefixes") {
  schema::JsonSchemaNode leaf;
  leaf.type = "integer";
  SECTION("descending through a scalar") {
    try {
      schema::aggregate_segments({{"", infer_text("{\"a\": 1}")},
                                  {"/a/b", leaf}});
      FAIL("expected inconsistent prefixes");
    } catch (const Error& e) {
      REQUIRE(e.code() == errc::inconsistent_prefixes);
    }
  }
  SECTION("array index and object key at the same node") {
    try {
      schema::aggregate_segments({{"/a/0/x", leaf}, {"/a/b", leaf}});
      FAIL("expected inconsistent prefixes");
    } catch (const Error& e) {
      REQUIRE(e.code() == errc::inconsistent_prefixes);
    }
  }
}

TEST_CASE("null-heavy splits still match unsplit inference") {
  // splits that isolate nulls from their typed siblings
  struct Case {
    const char* text;
    int threshold;
  };
  const Case cases[] = {
      {"[null, null, 5]", 4},  // fragments [null,null] and [5]
      {"[null, 5]", 1},
      {"[null]", 1},
      {"{\"a\": null}", 1},
      {"{\"a\": [null], \"b\": null}", 1},
      {"[[null, null], [\"x\"]]", 4},
  };
  for (const auto& c : cases) {
    CAPTURE(c.text, c.threshold);
    schema::JsonSchemaNode whole = infer_text(c.text);
    auto segs = schema::segment_example(c.text, c.threshold);
    std::vector<std::pair<std::string, schema::JsonSchemaNode>> parts;
    for (const auto& s : segs)
      parts.emplace_back(s.json_pointer_prefix, schema::infer_segment_schema(s));
    auto agg = schema::aggregate_segments(parts);
    CAPTURE(agg.root.to_json().dump(), whole.to_json().dump());
    REQUIRE(agg.root == whole);
  }
}

TEST_CASE("segment-infer-aggregate equals unsplit inference (property)") {
  std::mt19937_64 rng(909090);
  const int thresholds[] = {1, 5, 40};
  for (int iter = 0; iter < 120; ++iter) {
    ordered_json doc = testgen::random_json_document(rng);
    std::string text = doc.dump(2);
    schema::JsonSchemaNode whole = infer_text(text);
    for (int t : thresholds) {
      CAPTURE(iter, t, text);
      auto segs = schema::segment_example(text, t);
      std::vector<std::pair<std::string, schema::JsonSchemaNode>> parts;
      for (const auto& s : segs)
        parts.emplace_back(s.json_pointer_prefix, schema::infer_segment_schema(s));
      auto agg = schema::aggregate_segments(parts);
      CAPTURE(agg.root.to_json().dump(), whole.to_json().dump());
      REQUIRE(agg.root == whole);
      REQUIRE(agg.warnings.empty());
    }
  }
}

TEST_CASE("schema nodes round-trip through JSON") {
  auto n = infer_text("{\"a\": [1, null], \"b\": {\"c\": true}}");
  auto j = n.to_json();
  auto back = schema::JsonSchemaNode::from_json(j);
  REQUIRE(back == n);
  SECTION("invalid payloads are rejected") {
    try {
      schema::JsonSchemaNode::from_json(ordered_json::parse(
          "{\"type\": \"object\", \"required\": [\"ghost\"]}"));
      FAIL("expected malformed schema");
    } catch (const Error& e) {
      REQUIRE(e.code() == errc::malformed_schema);
    }
    try {
      schema::JsonSchemaNode::from_json(ordered_json::parse(
          "{\"type\": \"string\", \"properties\": {}}"));
      FAIL("expected malformed schema");
    } catch (const Error& e) {
      REQUIRE(e.code() == errc::malformed_schema);
    }
  }
}
