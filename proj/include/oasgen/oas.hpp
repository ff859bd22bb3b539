// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cctype>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "oasgen/schema.hpp"
#include "oasgen/skeleton.hpp"

namespace oasgen::builder {

// Full specification tree plus per-field provenance. Provenance keys are JSON
// pointers into spec; values say which stage last wrote the field.
struct OasDocument {
  ordered_json spec;
  std::map<std::string, std::string> provenance;  // pointer → base | enrichment
  std::vector<std::string> warnings;

  void mark(const std::string& pointer, const std::string& origin) {
    provenance[pointer] = origin;
  }
};

inline std::string pointer_token(const std::string& raw) {
  return schema::detail::escape_pointer_token(raw);
}

inline std::string operation_pointer(const OasSkeleton& sk) {
  return "/paths/" + pointer_token(sk.path) + "/" + sk.method;
}

// Embeds the skeleton and any inferred schemas into an OpenAPI 3 document.
// Bodies on GET or HEAD are dropped with a warning. The response lands under
// the given status (the example's explicit 4xx/5xx preamble, else 200).
inline OasDocument build_base_oas(const OasSkeleton& sk,
                                  const std::optional<schema::JsonSchemaNode>& request_schema,
                                  const std::optional<schema::JsonSchemaNode>& response_schema,
                                  int response_status = 200) {
  OasDocument doc;
  ordered_json& spec = doc.spec;
  spec["openapi"] = sk.openapi_version;
  spec["info"] = ordered_json{{"title", sk.title}, {"version", sk.version}};
  doc.mark("/openapi", "base");
  doc.mark("/info", "base");
  if (!sk.servers.empty()) {
    ordered_json servers = ordered_json::array();
    for (const auto& url : sk.servers) servers.push_back(ordered_json{{"url", url}});
    spec["servers"] = servers;
    doc.mark("/servers", "base");
  }

  const std::string op_ptr = operation_pointer(sk);
  ordered_json op = ordered_json::object();

  if (!sk.parameters.empty()) {
    ordered_json params = ordered_json::array();
    for (size_t i = 0; i < sk.parameters.size(); ++i) {
      const auto& p = sk.parameters[i];
      ordered_json pj;
      pj["name"] = p.name;
      pj["in"] = p.location;
      pj["required"] = p.location == "path";
      pj["schema"] = ordered_json{{"type", p.schema_type}};
      params.push_back(pj);
      doc.mark(op_ptr + "/parameters/" + std::to_string(i), "base");
    }
    op["parameters"] = params;
  }

  bool bodyless_method = sk.method == "get" || sk.method == "head";
  if (sk.has_request_body || request_schema) {
    if (bodyless_method) {
      std::string upper = sk.method;
      for (char& c : upper) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
      doc.warnings.push_back("request body on " + upper +
                             " is non-standard; dropped from the document");
    } else {
      ordered_json media;
      media["schema"] =
          request_schema ? request_schema->to_json() : ordered_json::object();
      op["requestBody"] = ordered_json{
          {"required", true},
          {"content", ordered_json{{"application/json", media}}}};
      doc.mark(op_ptr + "/requestBody/content/application~1json/schema", "base");
    }
  }

  std::string status = std::to_string(response_status);
  ordered_json response;
  response["description"] =
      response_status < 400 ? "Successful response" : "Error response";
  if (response_schema) {
    ordered_json media;
    media["schema"] = response_schema->to_json();
    response["content"] = ordered_json{{"application/json", media}};
    doc.mark(op_ptr + "/responses/" + status + "/content/application~1json/schema",
             "base");
  }
  op["responses"] = ordered_json{{status, response}};
  doc.mark(op_ptr + "/responses/" + status, "base");

  if (!sk.security_schemes.empty()) {
    ordered_json requirement = ordered_json::array();
    for (const auto& [name, def] : sk.security_schemes) {
      ordered_json one = ordered_json::object();
      one[name] = ordered_json::array();
      requirement.push_back(one);
    }
    op["security"] = requirement;
  }

  spec["paths"] = ordered_json::object();
  spec["paths"][sk.path] = ordered_json::object();
  spec["paths"][sk.path][sk.method] = op;
  doc.mark(op_ptr, "base");

  if (!sk.security_schemes.empty()) {
    ordered_json schemes = ordered_json::object();
    for (const auto& [name, def] : sk.security_schemes) {
      schemes[name] = def;
      doc.mark("/components/securitySchemes/" + pointer_token(name), "base");
    }
    spec["components"] = ordered_json{{"securitySchemes", schemes}};
  }
  return doc;
}

}  // namespace oasgen::builder
