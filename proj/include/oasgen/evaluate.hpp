// SPDX-License-Identifier: Apache-2.0
#ifndef OASGEN_EVALUATE_HPP
#define OASGEN_EVALUATE_HPP

#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "oasgen/errors.hpp"
#include "oasgen/oas.hpp"
#include "oasgen/text.hpp"

namespace oasgen::evaluate {

using ordered_json = nlohmann::ordered_json;

enum class Side { request, response };
enum class ParamField { required, type, location };

// One parameter as seen by the evaluator: a flat name for request
// parameters, a dotted property path for response fields. Absent optionals
// mean the document does not state the field.
struct ParamRef {
  std::string name;
  std::optional<std::string> type;
  std::optional<bool> required;
  std::optional<std::string> location;
  std::optional<std::string> description;
};

struct EvalCase {
  builder::OasDocument predicted;
  builder::OasDocument truth;
  std::string path;
  std::string method;
};

struct ParamMatchSet {
  std::vector<std::pair<ParamRef, ParamRef>> matched;  // (pred, truth)
  std::vector<ParamRef> pred_only;
  std::vector<ParamRef> truth_only;
};

struct Prf1 {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

struct SideMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::optional<double> required_precision;
  std::optional<double> type_precision;
  std::optional<double> location_precision;  // request side only
  std::optional<double> desc_similarity;
};

struct MetricsReport {
  SideMetrics request;
  SideMetrics response;
  std::size_t n_cases = 0;
};

namespace detail {

inline std::optional<std::string> opt_string(const ordered_json& obj,
                                             const char* key) {
  if (obj.is_object() && obj.contains(key) && obj[key].is_string())
    return obj[key].get<std::string>();
  return std::nullopt;
}

inline const ordered_json* find_operation(const ordered_json& spec,
                                          const std::string& path,
                                          const std::string& method) {
  if (!spec.is_object() || !spec.contains("paths")) return nullptr;
  const auto& paths = spec["paths"];
  if (!paths.is_object() || !paths.contains(path)) return nullptr;
  const auto& item = paths[path];
  std::string m = text::to_lower(method);
  if (!item.is_object() || !item.contains(m) || !item[m].is_object())
    return nullptr;
  return &item[m];
}

inline bool required_lists(const ordered_json& parent, const std::string& n) {
  if (!parent.is_object() || !parent.contains("required") ||
      !parent["required"].is_array())
    return false;
  for (const auto& r : parent["required"])
    if (r.is_string() && r.get<std::string>() == n) return true;
  return false;
}

// Walks a schema and emits one ParamRef per named property. Array nodes are
// descended transparently, so items of a list keep their parent's prefix.
inline void collect_schema_params(const ordered_json& node,
                                  const std::string& prefix,
                                  const std::optional<std::string>& location,
                                  bool recurse, std::vector<ParamRef>& out) {
  if (!node.is_object()) return;
  if (node.contains("items"))
    collect_schema_params(node["items"], prefix, location, recurse, out);
  if (!node.contains("properties") || !node["properties"].is_object()) return;
  for (auto it = node["properties"].begin(); it != node["properties"].end();
       ++it) {
    const auto& p = it.value();
    ParamRef ref;
    ref.name = prefix.empty() ? it.key() : prefix + "." + it.key();
    ref.required = required_lists(node, it.key());
    ref.location = location;
    if (p.is_object()) {
      ref.type = opt_string(p, "type");
      ref.description = opt_string(p, "description");
    }
    out.push_back(ref);
    if (recurse && p.is_object())
      collect_schema_params(p, ref.name, location, recurse, out);
  }
}

inline std::vector<ParamRef> collect_params(const ordered_json& op,
                                            Side side) {
  std::vector<ParamRef> out;
  if (side == Side::request) {
    if (op.contains("parameters") && op["parameters"].is_array()) {
      for (const auto& p : op["parameters"]) {
        if (!p.is_object()) continue;
        ParamRef ref;
        ref.name = p.value("name", std::string{});
        ref.location = opt_string(p, "in");
        if (p.contains("required") && p["required"].is_boolean())
          ref.required = p["required"].get<bool>();
        if (p.contains("schema")) ref.type = opt_string(p["schema"], "type");
        ref.description = opt_string(p, "description");
        out.push_back(std::move(ref));
      }
    }
    // top-level body properties count as request parameters in "body"
    if (op.contains("requestBody")) {
      const auto& rb = op["requestBody"];
      if (rb.is_object() && rb.contains("content") &&
          rb["content"].is_object() &&
          rb["content"].contains("application/json") &&
          rb["content"]["application/json"].is_object() &&
          rb["content"]["application/json"].contains("schema")) {
        collect_schema_params(rb["content"]["application/json"]["schema"], "",
                              std::string("body"), /*recurse=*/false, out);
      }
    }
    return out;
  }
  // response side: dotted paths from every JSON response schema, first
  // occurrence of a path wins
  if (!op.contains("responses") || !op["responses"].is_object()) return out;
  std::map<std::string, bool> seen;
  for (auto it = op["responses"].begin(); it != op["responses"].end(); ++it) {
    const auto& resp = it.value();
    if (!resp.is_object() || !resp.contains("content") ||
        !resp["content"].is_object() ||
        !resp["content"].contains("application/json"))
      continue;
    const auto& media = resp["content"]["application/json"];
    if (!media.is_object() || !media.contains("schema")) continue;
    std::vector<ParamRef> here;
    collect_schema_params(media["schema"], "", std::nullopt, /*recurse=*/true,
                          here);
    for (auto& ref : here) {
      std::string key = text::to_lower(ref.name);
      if (seen.emplace(key, true).second) out.push_back(std::move(ref));
    }
  }
  return out;
}

inline std::string normalize_type(std::string_view raw) {
  std::string t = text::to_lower(text::trim(raw));
  if (t == "int") return "integer";
  if (t == "bool") return "boolean";
  if (t == "float" || t == "double") return "number";
  return t;
}

}  // namespace detail

inline ParamMatchSet match_params(const EvalCase& c, Side side) {
  const auto* pred_op =
      detail::find_operation(c.predicted.spec, c.path, c.method);
  const auto* truth_op = detail::find_operation(c.truth.spec, c.path, c.method);
  if (pred_op == nullptr || truth_op == nullptr) {
    throw Error(errc::selector_miss,
                "endpoint " + c.method + " " + c.path + " missing from the " +
                    (truth_op == nullptr ? "truth" : "predicted") +
                    " document");
  }
  auto pred = detail::collect_params(*pred_op, side);
  auto truth = detail::collect_params(*truth_op, side);

  ParamMatchSet m;
  std::vector<bool> used(truth.size(), false);
  for (auto& p : pred) {
    std::string key = text::to_lower(p.name);
    bool hit = false;
    for (std::size_t i = 0; i < truth.size(); ++i) {
      if (used[i] || text::to_lower(truth[i].name) != key) continue;
      used[i] = true;
      m.matched.emplace_back(p, truth[i]);
      hit = true;
      break;
    }
    if (!hit) m.pred_only.push_back(p);
  }
  for (std::size_t i = 0; i < truth.size(); ++i)
    if (!used[i]) m.truth_only.push_back(truth[i]);
  return m;
}

inline Prf1 prf1(const ParamMatchSet& m) {
  Prf1 out;
  double matched = static_cast<double>(m.matched.size());
  double p_denom = matched + static_cast<double>(m.pred_only.size());
  double r_denom = matched + static_cast<double>(m.truth_only.size());
  out.precision = p_denom > 0 ? matched / p_denom : 0.0;
  out.recall = r_denom > 0 ? matched / r_denom : 0.0;
  out.f1 = (out.precision + out.recall) > 0
               ? 2.0 * out.precision * out.recall /
                     (out.precision + out.recall)
               : 0.0;
  return out;
}

inline double field_precision(const ParamMatchSet& m, ParamField field) {
  std::size_t eligible = 0;
  std::size_t equal = 0;
  for (const auto& [pred, truth] : m.matched) {
    switch (field) {
      case ParamField::required:
        if (!truth.required) continue;
        ++eligible;
        // an unstated flag means not-required, so compare against false
        if (pred.required.value_or(false) == *truth.required) ++equal;
        break;
      case ParamField::type:
        if (!truth.type) continue;
        ++eligible;
        if (pred.type && detail::normalize_type(*pred.type) ==
                             detail::normalize_type(*truth.type))
          ++equal;
        break;
      case ParamField::location:
        if (!truth.location) continue;
        ++eligible;
        if (pred.location &&
            text::iequals(*pred.location, *truth.location))
          ++equal;
        break;
    }
  }
  if (eligible == 0)
    throw Error(errc::no_eligible_pairs,
                "no matched pair carries the field in the truth document");
  return static_cast<double>(equal) / static_cast<double>(eligible);
}

inline double description_similarity(std::string_view pred_text,
                                     std::string_view truth_text) {
  auto a = text::alnum_tokens(pred_text);
  auto b = text::alnum_tokens(truth_text);
  if (a.empty() && b.empty()) return 1.0;
  if (a.empty() || b.empty()) return 0.0;
  std::map<std::string, double> ta;
  std::map<std::string, double> tb;
  for (auto& t : a) ta[t] += 1.0;
  for (auto& t : b) tb[t] += 1.0;
  double dot = 0.0;
  double na = 0.0;
  double nb = 0.0;
  for (auto& [k, v] : ta) {
    na += v * v;
    auto it = tb.find(k);
    if (it != tb.end()) dot += v * it->second;
  }
  for (auto& [k, v] : tb) nb += v * v;
  if (na == 0.0 || nb == 0.0) return 0.0;
  // sqrt of the product keeps proportional count vectors at exactly 1.0
  return dot / std::sqrt(na * nb);
}

inline MetricsReport e2e_report(const std::vector<EvalCase>& cases) {
  if (cases.empty()) throw Error(errc::empty_corpus, "no evaluation cases");

  struct Acc {
    double p = 0, r = 0, f1 = 0;
    double req = 0, type = 0, loc = 0, sim = 0;
    std::size_t req_n = 0, type_n = 0, loc_n = 0, sim_n = 0;
  };
  Acc acc[2];

  for (const auto& c : cases) {
    for (Side side : {Side::request, Side::response}) {
      Acc& a = acc[side == Side::request ? 0 : 1];
      auto m = match_params(c, side);
      auto s = prf1(m);
      a.p += s.precision;
      a.r += s.recall;
      a.f1 += s.f1;
      auto add_field = [&](ParamField f, double& sum, std::size_t& n) {
        try {
          sum += field_precision(m, f);
          ++n;
        } catch (const Error& e) {
          if (e.code() != errc::no_eligible_pairs) throw;
        }
      };
      add_field(ParamField::required, a.req, a.req_n);
      add_field(ParamField::type, a.type, a.type_n);
      if (side == Side::request) add_field(ParamField::location, a.loc, a.loc_n);
      double sim_sum = 0.0;
      std::size_t sim_pairs = 0;
      for (const auto& [pred, truth] : m.matched) {
        if (!truth.description || truth.description->empty()) continue;
        sim_sum += description_similarity(pred.description.value_or(""),
                                          *truth.description);
        ++sim_pairs;
      }
      if (sim_pairs > 0) {
        a.sim += sim_sum / static_cast<double>(sim_pairs);
        ++a.sim_n;
      }
    }
  }

  auto finish = [&](const Acc& a, bool with_location) {
    SideMetrics s;
    double n = static_cast<double>(cases.size());
    s.precision = a.p / n;
    s.recall = a.r / n;
    s.f1 = a.f1 / n;
    if (a.req_n > 0) s.required_precision = a.req / a.req_n;
    if (a.type_n > 0) s.type_precision = a.type / a.type_n;
    if (with_location && a.loc_n > 0) s.location_precision = a.loc / a.loc_n;
    if (a.sim_n > 0) s.desc_similarity = a.sim / a.sim_n;
    return s;
  };

  MetricsReport report;
  report.n_cases = cases.size();
  report.request = finish(acc[0], true);
  report.response = finish(acc[1], false);
  return report;
}

namespace detail {

inline ordered_json side_to_json(const SideMetrics& s, bool with_location) {
  ordered_json j;
  j["precision"] = s.precision;
  j["recall"] = s.recall;
  j["f1"] = s.f1;
  auto put = [&](const char* key, const std::optional<double>& v) {
    if (v)
      j[key] = *v;
    else
      j[key] = nullptr;
  };
  put("required_precision", s.required_precision);
  put("type_precision", s.type_precision);
  if (with_location) put("location_precision", s.location_precision);
  put("desc_similarity", s.desc_similarity);
  return j;
}

inline ordered_json side_row(const SideMetrics& s) {
  ordered_json j;
  j["p"] = s.precision;
  j["r"] = s.recall;
  j["f1"] = s.f1;
  if (s.desc_similarity)
    j["sim"] = *s.desc_similarity;
  else
    j["sim"] = nullptr;
  return j;
}

}  // namespace detail

inline ordered_json report_to_json(const MetricsReport& r) {
  ordered_json j;
  j["n_cases"] = r.n_cases;
  j["request"] = detail::side_to_json(r.request, true);
  j["response"] = detail::side_to_json(r.response, false);
  return j;
}

// Compact comparison rows: P/R/F1/Sim per side, one row per pipeline variant.
inline ordered_json comparison_to_json(
    const std::optional<MetricsReport>& without_enrichment,
    const std::optional<MetricsReport>& with_enrichment) {
  ordered_json rows = ordered_json::array();
  auto add = [&](const char* label, const MetricsReport& r) {
    ordered_json row;
    row["variant"] = label;
    row["n_cases"] = r.n_cases;
    row["request"] = detail::side_row(r.request);
    row["response"] = detail::side_row(r.response);
    rows.push_back(row);
  };
  if (without_enrichment) add("without-enrichment", *without_enrichment);
  if (with_enrichment) add("with-enrichment", *with_enrichment);
  ordered_json j;
  j["rows"] = rows;
  return j;
}

}  // namespace oasgen::evaluate

#endif  // OASGEN_EVALUATE_HPP
