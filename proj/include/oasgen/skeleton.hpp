// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cctype>
#include <charconv>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "oasgen/extract.hpp"
#include "oasgen/text.hpp"

namespace oasgen::builder {

using ordered_json = nlohmann::ordered_json;

struct SkeletonParameter {
  std::string name;
  std::string location;     // path, query, header
  std::string schema_type;  // string, integer, number, boolean
};

struct OasSkeleton {
  std::string openapi_version = "3.0.3";
  std::string title = "Generated API";
  std::string version = "1.0.0";
  std::vector<std::string> servers;
  std::string path;
  std::string method;
  std::map<std::string, ordered_json> security_schemes;
  std::vector<SkeletonParameter> parameters;
  bool has_request_body = false;
};

// integer, number, and lowercase boolean literals; everything else (empty
// values, signs like "+7", hex, inf/nan spellings) stays string
inline std::string infer_primitive_type(const std::string& raw) {
  std::string v = text::trim(raw);
  if (v.empty()) return "string";
  std::string lower = text::to_lower(v);
  if (lower == "true" || lower == "false") return "boolean";
  const char* first = v.data();
  const char* last = v.data() + v.size();
  long long ll = 0;
  auto ir = std::from_chars(first, last, ll);
  if (ir.ec == std::errc() && ir.ptr == last) return "integer";
  for (char c : v)
    if (std::string("0123456789+-.eE").find(c) == std::string::npos) return "string";
  double d = 0;
  auto dr = std::from_chars(first, last, d);
  if (dr.ec == std::errc() && dr.ptr == last) return "number";
  return "string";
}

namespace detail {

inline std::vector<std::string> split_segments(const std::string& path) {
  std::vector<std::string> out;
  size_t i = 0;
  while (i < path.size()) {
    if (path[i] == '/') {
      ++i;
      continue;
    }
    size_t next = path.find('/', i);
    if (next == std::string::npos) next = path.size();
    out.push_back(path.substr(i, next - i));
    i = next;
  }
  return out;
}

inline bool identifier_like(const std::string& s) {
  if (s.empty()) return false;
  if (!std::isalpha(static_cast<unsigned char>(s[0])) && s[0] != '_') return false;
  for (char c : s)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '-')
      return false;
  return true;
}

// pulls a template-bearing path out of a prose token: strips quoting and
// trailing punctuation, drops scheme and authority, cuts the query, and
// rewrites :name segments to {name}
inline std::optional<std::string> normalize_template_token(std::string tok) {
  while (!tok.empty() && std::string("(\"'`<").find(tok.front()) != std::string::npos)
    tok.erase(tok.begin());
  while (!tok.empty() && std::string(".,;)\"'`>!?").find(tok.back()) != std::string::npos)
    tok.pop_back();
  size_t scheme = tok.find("://");
  if (scheme != std::string::npos) {
    size_t slash = tok.find('/', scheme + 3);
    if (slash == std::string::npos) return std::nullopt;
    tok = tok.substr(slash);
  }
  size_t q = tok.find_first_of("?#");
  if (q != std::string::npos) tok = tok.substr(0, q);
  if (tok.empty() || tok[0] != '/') return std::nullopt;
  auto segs = split_segments(tok);
  bool has_template = false;
  std::string rebuilt;
  for (auto& seg : segs) {
    if (seg.size() >= 2 && seg.front() == ':' && identifier_like(seg.substr(1)))
      seg = "{" + seg.substr(1) + "}";
    if (seg.size() >= 2 && seg.front() == '{' && seg.back() == '}' &&
        identifier_like(seg.substr(1, seg.size() - 2)))
      has_template = true;
    rebuilt += "/" + seg;
  }
  if (!has_template) return std::nullopt;
  return rebuilt;
}

}  // namespace detail

struct PathTemplate {
  std::string path;                                          // with {name} markers
  std::vector<std::pair<std::string, std::string>> params;   // name → example value
};

// names inside {braces} when the example path is already templated
inline std::vector<std::string> brace_params(const std::string& path) {
  std::vector<std::string> out;
  for (const auto& seg : detail::split_segments(path))
    if (seg.size() >= 2 && seg.front() == '{' && seg.back() == '}') {
      std::string name = seg.substr(1, seg.size() - 2);
      if (detail::identifier_like(name)) out.push_back(name);
    }
  return out;
}

// first template in the documentation text whose literal segments match the
// example path segment-for-segment
inline std::optional<PathTemplate> find_path_template(const std::string& doc_text,
                                                      const std::string& example_path) {
  auto example_segs = detail::split_segments(example_path);
  size_t i = 0;
  while (i < doc_text.size()) {
    while (i < doc_text.size() && std::isspace(static_cast<unsigned char>(doc_text[i])))
      ++i;
    size_t start = i;
    while (i < doc_text.size() && !std::isspace(static_cast<unsigned char>(doc_text[i])))
      ++i;
    if (i == start) break;
    auto tmpl = detail::normalize_template_token(doc_text.substr(start, i - start));
    if (!tmpl) continue;
    auto tmpl_segs = detail::split_segments(*tmpl);
    if (tmpl_segs.size() != example_segs.size() || tmpl_segs.empty()) continue;
    PathTemplate result;
    bool ok = true;
    for (size_t k = 0; k < tmpl_segs.size(); ++k) {
      const std::string& ts = tmpl_segs[k];
      if (ts.size() >= 2 && ts.front() == '{' && ts.back() == '}' &&
          detail::identifier_like(ts.substr(1, ts.size() - 2))) {
        result.params.emplace_back(ts.substr(1, ts.size() - 2), example_segs[k]);
      } else if (ts != example_segs[k]) {
        ok = false;
        break;
      }
    }
    if (!ok || result.params.empty()) continue;
    result.path = *tmpl;
    return result;
  }
  return std::nullopt;
}

namespace detail {

inline bool api_key_header(const std::string& lower_name) {
  return lower_name == "x-api-key" || lower_name == "api-key" ||
         lower_name == "apikey" || lower_name == "x-auth-token";
}

inline std::string host_title(const std::string& server) {
  size_t scheme = server.find("://");
  std::string host = scheme == std::string::npos ? server : server.substr(scheme + 3);
  size_t slash = host.find('/');
  if (slash != std::string::npos) host = host.substr(0, slash);
  return host.empty() ? "Generated API" : host + " API";
}

}  // namespace detail

// Maps one parsed request example to the operation skeleton. doc_text is the
// surrounding documentation (enrichment scope text) searched for {name} or
// :name path templates; value shapes alone never template a path.
inline OasSkeleton generate_skeleton(const extract::EndpointExamplePair& pair,
                                     const std::string& doc_text = "") {
  const extract::ParsedRequest& req = pair.request.parsed;
  OasSkeleton sk;
  sk.method = req.method;
  sk.path = req.path.empty() ? "/" : req.path;
  if (sk.path[0] != '/') sk.path = "/" + sk.path;
  if (!req.server.empty()) {
    sk.servers.push_back(req.server);
    sk.title = detail::host_title(req.server);
  }

  auto add_param = [&sk](const std::string& name, const std::string& location,
                         const std::string& type) {
    for (const auto& p : sk.parameters)
      if (p.name == name && p.location == location) return;
    sk.parameters.push_back({name, location, type});
  };

  auto raw_templates = brace_params(sk.path);
  if (!raw_templates.empty()) {
    for (const auto& name : raw_templates) add_param(name, "path", "string");
  } else if (!doc_text.empty()) {
    if (auto tmpl = find_path_template(doc_text, sk.path)) {
      sk.path = tmpl->path;
      for (const auto& [name, value] : tmpl->params)
        add_param(name, "path", infer_primitive_type(value));
    }
  }

  for (const auto& q : req.query_params)
    add_param(q.name, "query", q.has_eq ? infer_primitive_type(q.value) : "string");

  for (const auto& [hname, hvalue] : req.header_params) {
    std::string lower = text::to_lower(hname);
    // media-type negotiation lives in the content structure; OAS ignores
    // these names as header parameters
    if (lower == "content-type" || lower == "accept") continue;
    if (lower == "authorization") {
      if (text::istarts_with(text::trim(hvalue), "bearer")) {
        sk.security_schemes["bearerAuth"] =
            ordered_json{{"type", "http"}, {"scheme", "bearer"}};
      } else if (text::istarts_with(text::trim(hvalue), "basic")) {
        sk.security_schemes["basicAuth"] =
            ordered_json{{"type", "http"}, {"scheme", "basic"}};
      } else {
        sk.security_schemes["apiKeyAuth"] = ordered_json{
            {"type", "apiKey"}, {"in", "header"}, {"name", hname}};
      }
      continue;
    }
    if (detail::api_key_header(lower)) {
      sk.security_schemes["apiKeyAuth"] =
          ordered_json{{"type", "apiKey"}, {"in", "header"}, {"name", hname}};
      continue;
    }
    add_param(hname, "header", infer_primitive_type(hvalue));
  }

  sk.has_request_body = req.body.has_value();
  return sk;
}

// Canonical JSON form of a skeleton, used wherever a skeleton crosses a text
// boundary (provider outputs, fixtures). Field order is fixed.
inline ordered_json skeleton_to_json(const OasSkeleton& sk) {
  ordered_json j;
  j["openapi"] = sk.openapi_version;
  j["title"] = sk.title;
  j["version"] = sk.version;
  j["servers"] = ordered_json::array();
  for (const auto& s : sk.servers) j["servers"].push_back(s);
  j["path"] = sk.path;
  j["method"] = sk.method;
  j["securitySchemes"] = ordered_json::object();
  for (const auto& [name, scheme] : sk.security_schemes)
    j["securitySchemes"][name] = scheme;
  j["parameters"] = ordered_json::array();
  for (const auto& p : sk.parameters)
    j["parameters"].push_back(ordered_json{
        {"name", p.name}, {"in", p.location}, {"type", p.schema_type}});
  j["hasRequestBody"] = sk.has_request_body;
  return j;
}

}  // namespace oasgen::builder
