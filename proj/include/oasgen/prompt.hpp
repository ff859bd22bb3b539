// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "oasgen/icl.hpp"

namespace oasgen::gateway {

// The templates below are frozen: tests compare rendered prompts
// byte-for-byte, so any edit here is a deliberate format change.

inline const char* task_instruction(GenTask t) {
  switch (t) {
    case GenTask::skeleton:
      return "Read the HTTP request example below and describe the endpoint "
             "as a JSON object with the keys openapi, title, version, "
             "servers, path, method, securitySchemes, parameters, and "
             "hasRequestBody. Use {name} placeholders for path parameters.";
    case GenTask::schema:
      return "Infer a JSON Schema for the JSON value below. Respond with a "
             "single JSON object using only the keys type, properties, "
             "required, items, and nullable.";
    case GenTask::request_enrichment:
      return "Extract every request parameter documented in the HTML "
             "fragment below. Respond with a tab-separated table whose "
             "header row is exactly: name, type, required, location, "
             "description. Use one row per parameter and copy names "
             "verbatim from the documentation.";
    case GenTask::response_enrichment:
      return "Extract the response fields documented in the HTML fragment "
             "below. Respond with a single JSON Schema object using only "
             "the keys type, properties, required, items, nullable, and "
             "description. Copy field names verbatim from the "
             "documentation.";
  }
  return "";
}

// Pure function of (task, icl, input_payload): instruction block, one
// demonstration per example in the order given, then the new input with an
// output cue.
inline std::string build_prompt(GenTask task, const std::vector<IclExample>& icl,
                                const std::string& input_payload) {
  std::string out;
  out += task_instruction(task);
  out += "\n";
  int n = 0;
  for (const auto& e : icl) {
    ++n;
    out += "\n### Example " + std::to_string(n) + "\nInput:\n";
    out += e.input_html;
    if (out.back() != '\n') out += "\n";
    out += "Output:\n";
    out += e.expected_output;
    if (out.back() != '\n') out += "\n";
  }
  out += "\n### Task\nInput:\n";
  out += input_payload;
  if (out.back() != '\n') out += "\n";
  out += "Output:\n";
  return out;
}

}  // namespace oasgen::gateway
