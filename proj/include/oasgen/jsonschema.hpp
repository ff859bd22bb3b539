// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <regex>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "oasgen/errors.hpp"
#include "oasgen/schema.hpp"

namespace oasgen::jsonschema {

using ordered_json = nlohmann::ordered_json;

struct Violation {
  std::string instance_pointer;
  std::string message;

  bool operator==(const Violation&) const = default;
};

// Draft-04 subset evaluator covering the keywords the bundled meta-schema
// uses: $ref (internal), type, enum, required, properties, patternProperties,
// additionalProperties, items, allOf/anyOf/oneOf/not, pattern, minLength,
// minimum, maximum, minItems, minProperties, uniqueItems. Violations are
// reported in instance-traversal order; composite keywords (anyOf, oneOf,
// not) contribute a single violation each, so counts are deterministic.
class Validator {
public:
  explicit Validator(ordered_json schema) : root_(std::move(schema)) {}

  std::vector<Violation> validate(const ordered_json& instance) const {
    std::vector<Violation> out;
    check(instance, root_, "", out);
    return out;
  }

private:
  static std::string type_name(const ordered_json& v) {
    if (v.is_object()) return "object";
    if (v.is_array()) return "array";
    if (v.is_string()) return "string";
    if (v.is_boolean()) return "boolean";
    if (v.is_null()) return "null";
    if (v.is_number_integer() || v.is_number_unsigned()) return "integer";
    return "number";
  }

  static bool matches_type(const ordered_json& v, const std::string& want) {
    std::string got = type_name(v);
    if (want == got) return true;
    if (want == "number" && got == "integer") return true;
    return false;
  }

  const ordered_json* resolve_ref(const std::string& ref) const {
    if (ref.rfind("#/", 0) != 0)
      throw Error(errc::parse_failure, "unsupported schema reference: " + ref);
    const ordered_json* node = &root_;
    for (const auto& token :
         schema::detail::pointer_tokens(ref.substr(1))) {
      if (!node->is_object() || !node->contains(token))
        throw Error(errc::parse_failure, "dangling schema reference: " + ref);
      node = &(*node)[token];
    }
    return node;
  }

  static std::string esc(const std::string& token) {
    return schema::detail::escape_pointer_token(token);
  }

  void check(const ordered_json& inst, const ordered_json& sch,
             const std::string& ptr, std::vector<Violation>& out) const {
    if (sch.is_boolean()) {  // additionalProperties-style boolean schema
      if (!sch.get<bool>())
        out.push_back({ptr, "value not allowed here"});
      return;
    }
    if (!sch.is_object()) return;

    if (sch.contains("$ref")) {
      check(inst, *resolve_ref(sch["$ref"].get<std::string>()), ptr, out);
      return;
    }

    if (sch.contains("type")) {
      bool ok = false;
      if (sch["type"].is_array()) {
        for (const auto& t : sch["type"])
          ok = ok || matches_type(inst, t.get<std::string>());
      } else {
        ok = matches_type(inst, sch["type"].get<std::string>());
      }
      if (!ok) {
        out.push_back({ptr, "expected type " + sch["type"].dump() + ", got " +
                                type_name(inst)});
        return;  // type mismatch makes the remaining keywords meaningless
      }
    }

    if (sch.contains("enum")) {
      bool ok = false;
      for (const auto& v : sch["enum"]) ok = ok || v == inst;
      if (!ok)
        out.push_back({ptr, "value " + inst.dump() + " is not one of " +
                                sch["enum"].dump()});
    }

    if (sch.contains("allOf"))
      for (const auto& sub : sch["allOf"]) check(inst, sub, ptr, out);

    if (sch.contains("anyOf")) {
      bool ok = false;
      for (const auto& sub : sch["anyOf"]) {
        std::vector<Violation> scratch;
        check(inst, sub, ptr, scratch);
        ok = ok || scratch.empty();
      }
      if (!ok) out.push_back({ptr, "value matches none of the allowed forms"});
    }

    if (sch.contains("oneOf")) {
      int hits = 0;
      for (const auto& sub : sch["oneOf"]) {
        std::vector<Violation> scratch;
        check(inst, sub, ptr, scratch);
        if (scratch.empty()) ++hits;
      }
      if (hits != 1)
        out.push_back({ptr, "value matches " + std::to_string(hits) +
                                " of the exclusive forms instead of exactly 1"});
    }

    if (sch.contains("not")) {
      std::vector<Violation> scratch;
      check(inst, sch["not"], ptr, scratch);
      if (scratch.empty())
        out.push_back({ptr, "value matches a disallowed form"});
    }

    if (inst.is_object()) {
      if (sch.contains("required")) {
        for (const auto& name : sch["required"]) {
          const std::string key = name.get<std::string>();
          if (!inst.contains(key))
            out.push_back({ptr, "missing required property '" + key + "'"});
        }
      }
      if (sch.contains("minProperties") &&
          inst.size() < sch["minProperties"].get<size_t>())
        out.push_back({ptr, "object needs at least " +
                                sch["minProperties"].dump() + " properties"});

      const ordered_json* props =
          sch.contains("properties") ? &sch["properties"] : nullptr;
      const ordered_json* patterns =
          sch.contains("patternProperties") ? &sch["patternProperties"] : nullptr;

      for (auto it = inst.begin(); it != inst.end(); ++it) {
        const std::string& key = it.key();
        std::string child_ptr = ptr + "/" + esc(key);
        bool matched = false;
        if (props && props->contains(key)) {
          matched = true;
          check(it.value(), (*props)[key], child_ptr, out);
        }
        if (patterns) {
          for (auto pit = patterns->begin(); pit != patterns->end(); ++pit) {
            if (std::regex_search(key, std::regex(pit.key()))) {
              matched = true;
              check(it.value(), pit.value(), child_ptr, out);
            }
          }
        }
        if (!matched && sch.contains("additionalProperties")) {
          const ordered_json& ap = sch["additionalProperties"];
          if (ap.is_boolean()) {
            if (!ap.get<bool>())
              out.push_back({child_ptr, "unexpected property '" + key + "'"});
          } else {
            check(it.value(), ap, child_ptr, out);
          }
        }
      }
    }

    if (inst.is_array()) {
      if (sch.contains("minItems") && inst.size() < sch["minItems"].get<size_t>())
        out.push_back(
            {ptr, "array needs at least " + sch["minItems"].dump() + " items"});
      if (sch.contains("uniqueItems") && sch["uniqueItems"].is_boolean() &&
          sch["uniqueItems"].get<bool>()) {
        for (size_t i = 0; i < inst.size(); ++i)
          for (size_t j = i + 1; j < inst.size(); ++j)
            if (inst[i] == inst[j]) {
              out.push_back({ptr, "array items are not unique"});
              i = inst.size();  // one violation per array
              break;
            }
      }
      if (sch.contains("items")) {
        for (size_t i = 0; i < inst.size(); ++i)
          check(inst[i], sch["items"], ptr + "/" + std::to_string(i), out);
      }
    }

    if (inst.is_string()) {
      if (sch.contains("pattern")) {
        std::string s = inst.get<std::string>();
        if (!std::regex_search(s, std::regex(sch["pattern"].get<std::string>())))
          out.push_back({ptr, "string does not match pattern " +
                                  sch["pattern"].dump()});
      }
      if (sch.contains("minLength") &&
          inst.get<std::string>().size() < sch["minLength"].get<size_t>())
        out.push_back({ptr, "string shorter than minLength " +
                                sch["minLength"].dump()});
    }

    if (inst.is_number()) {
      if (sch.contains("minimum") &&
          inst.get<double>() < sch["minimum"].get<double>())
        out.push_back({ptr, "number below minimum " + sch["minimum"].dump()});
      if (sch.contains("maximum") &&
          inst.get<double>() > sch["maximum"].get<double>())
        out.push_back({ptr, "number above maximum " + sch["maximum"].dump()});
    }
  }

  ordered_json root_;
};

}  // namespace oasgen::jsonschema
