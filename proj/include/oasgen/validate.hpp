// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "oasgen/errors.hpp"
#include "oasgen/jsonschema.hpp"
#include "oasgen/oas_metaschema.hpp"

namespace oasgen::validate {

using ordered_json = nlohmann::ordered_json;

struct ValidationReport {
  bool is_valid_json = false;
  bool is_valid_oas = false;
  std::vector<jsonschema::Violation> warnings;

  int warning_count() const { return static_cast<int>(warnings.size()); }
};

struct SyntaxSummary {
  int n_docs = 0;
  double valid_json_ratio = 0;
  double valid_oas_ratio = 0;
  double avg_warnings = 0;  // mean over JSON-valid documents only
};

inline const jsonschema::Validator& meta_validator() {
  static const jsonschema::Validator v(ordered_json::parse(kOasMetaSchema));
  return v;
}

// JSON parse first; when that passes, every meta-schema violation becomes one
// warning. Failures are report states, never exceptions.
inline ValidationReport check_document(const std::string& body) {
  ValidationReport report;
  ordered_json doc;
  try {
    doc = ordered_json::parse(body);
  } catch (const nlohmann::json::exception&) {
    return report;
  }
  report.is_valid_json = true;
  report.warnings = meta_validator().validate(doc);
  report.is_valid_oas = report.warnings.empty();
  return report;
}

inline SyntaxSummary summarize(const std::vector<ValidationReport>& reports) {
  if (reports.empty())
    throw Error(errc::empty_corpus, "no validation reports to summarize");
  SyntaxSummary s;
  s.n_docs = static_cast<int>(reports.size());
  int json_ok = 0, oas_ok = 0, warning_total = 0;
  for (const auto& r : reports) {
    if (r.is_valid_json) {
      ++json_ok;
      warning_total += r.warning_count();
    }
    if (r.is_valid_oas) ++oas_ok;
  }
  s.valid_json_ratio = static_cast<double>(json_ok) / s.n_docs;
  s.valid_oas_ratio = static_cast<double>(oas_ok) / s.n_docs;
  s.avg_warnings =
      json_ok == 0 ? 0 : static_cast<double>(warning_total) / json_ok;
  return s;
}

inline ordered_json report_to_json(const ValidationReport& r) {
  ordered_json j;
  j["is_valid_json"] = r.is_valid_json;
  j["is_valid_oas"] = r.is_valid_oas;
  j["warning_count"] = r.warning_count();
  j["warnings"] = ordered_json::array();
  for (const auto& w : r.warnings)
    j["warnings"].push_back(
        ordered_json{{"json_pointer", w.instance_pointer}, {"message", w.message}});
  return j;
}

inline ordered_json summary_to_json(const SyntaxSummary& s) {
  ordered_json j;
  j["n_docs"] = s.n_docs;
  j["valid_json_ratio"] = s.valid_json_ratio;
  j["valid_oas_ratio"] = s.valid_oas_ratio;
  j["avg_warnings"] = s.avg_warnings;
  j["meta_schema"] = kMetaSchemaVersion;
  return j;
}

}  // namespace oasgen::validate
