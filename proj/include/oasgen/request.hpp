// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include <nlohmann/json.hpp>

#include "oasgen/errors.hpp"
#include "oasgen/text.hpp"

namespace oasgen::extract {

struct QueryParam {
  std::string name;
  std::string value;
  bool has_eq = true;  // distinguishes `?flag` from `?flag=`
};

struct ParsedRequest {
  std::string method;  // lowercase
  std::string server;  // scheme+authority, verbatim; may be empty for path-only examples
  std::string path;    // begins with "/"
  std::vector<QueryParam> query_params;
  std::vector<std::pair<std::string, std::string>> header_params;
  std::optional<std::string> body;
  bool body_is_json = false;

  std::string url() const {
    std::string u = server + path;
    if (!query_params.empty()) {
      u.push_back('?');
      bool first = true;
      for (const auto& q : query_params) {
        if (!first) u.push_back('&');
        first = false;
        u += q.name;
        if (q.has_eq) {
          u.push_back('=');
          u += q.value;
        }
      }
    }
    return u;
  }
};

namespace detail {

inline const std::unordered_set<std::string>& http_methods() {
  static const std::unordered_set<std::string> s = {
      "get", "post", "put", "patch", "delete", "head", "options"};
  return s;
}

// shell-like tokenization: quotes, backslash escapes, line continuations
inline std::vector<std::string> shell_tokens(std::string_view s) {
  std::vector<std::string> out;
  std::string cur;
  bool have = false;
  size_t i = 0;
  while (i < s.size()) {
    char c = s[i];
    if (c == '\\') {
      if (i + 1 < s.size()) {
        char nx = s[i + 1];
        if (nx == '\n') {
          i += 2;  // line continuation
          continue;
        }
        if (nx == '\r' && i + 2 < s.size() && s[i + 2] == '\n') {
          i += 3;
          continue;
        }
        cur.push_back(nx);
        have = true;
        i += 2;
        continue;
      }
      ++i;
      continue;
    }
    if (c == '\'') {
      size_t end = s.find('\'', i + 1);
      if (end == std::string_view::npos) end = s.size();
      cur += s.substr(i + 1, end - i - 1);
      have = true;
      i = (end < s.size()) ? end + 1 : s.size();
      continue;
    }
    if (c == '"') {
      ++i;
      while (i < s.size() && s[i] != '"') {
        if (s[i] == '\\' && i + 1 < s.size() &&
            (s[i + 1] == '"' || s[i + 1] == '\\' || s[i + 1] == '$' || s[i + 1] == '`')) {
          cur.push_back(s[i + 1]);
          i += 2;
        } else {
          cur.push_back(s[i++]);
        }
      }
      have = true;
      if (i < s.size()) ++i;
      continue;
    }
    if (text::is_space(c)) {
      if (have) {
        out.push_back(std::move(cur));
        cur.clear();
        have = false;
      }
      ++i;
      continue;
    }
    cur.push_back(c);
    have = true;
    ++i;
  }
  if (have) out.push_back(std::move(cur));
  return out;
}

inline std::string base64(std::string_view in) {
  static const char tbl[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
  std::string out;
  size_t i = 0;
  while (i + 2 < in.size()) {
    uint32_t v = (static_cast<unsigned char>(in[i]) << 16) |
                 (static_cast<unsigned char>(in[i + 1]) << 8) |
                 static_cast<unsigned char>(in[i + 2]);
    out.push_back(tbl[(v >> 18) & 63]);
    out.push_back(tbl[(v >> 12) & 63]);
    out.push_back(tbl[(v >> 6) & 63]);
    out.push_back(tbl[v & 63]);
    i += 3;
  }
  if (i + 1 == in.size()) {
    uint32_t v = static_cast<unsigned char>(in[i]) << 16;
    out.push_back(tbl[(v >> 18) & 63]);
    out.push_back(tbl[(v >> 12) & 63]);
    out += "==";
  } else if (i + 2 == in.size()) {
    uint32_t v = (static_cast<unsigned char>(in[i]) << 16) |
                 (static_cast<unsigned char>(in[i + 1]) << 8);
    out.push_back(tbl[(v >> 18) & 63]);
    out.push_back(tbl[(v >> 12) & 63]);
    out.push_back(tbl[(v >> 6) & 63]);
    out.push_back('=');
  }
  return out;
}

// long options that consume a value we do not model
inline bool skippable_value_option(const std::string& opt) {
  static const std::unordered_set<std::string> s = {
      "-o", "--output", "-w", "--write-out", "--cacert", "--capath", "-E", "--cert",
      "--key", "--connect-timeout", "--max-time", "-m", "--retry", "--limit-rate",
      "-c", "--cookie-jar", "-T", "--upload-file", "-x", "--proxy", "-U",
      "--proxy-user", "--resolve", "--interface", "--max-redirs", "--ciphers"};
  return s.count(opt) > 0;
}

inline bool data_option(const std::string& opt) {
  static const std::unordered_set<std::string> s = {
      "-d", "--data", "--data-raw", "--data-binary", "--data-ascii", "--data-urlencode"};
  return s.count(opt) > 0;
}

struct SplitUrl {
  std::string server;
  std::string path;
  std::vector<QueryParam> query;
};

inline SplitUrl split_url(std::string url) {
  SplitUrl out;
  size_t frag = url.find('#');
  if (frag != std::string::npos) url.resize(frag);
  size_t q = url.find('?');
  std::string query_str;
  if (q != std::string::npos) {
    query_str = url.substr(q + 1);
    url.resize(q);
  }
  size_t scheme_end = url.find("://");
  if (scheme_end != std::string::npos) {
    size_t path_start = url.find('/', scheme_end + 3);
    if (path_start == std::string::npos) {
      out.server = url;
      out.path = "/";
    } else {
      out.server = url.substr(0, path_start);
      out.path = url.substr(path_start);
    }
  } else if (!url.empty() && url[0] == '/') {
    out.path = url;
  } else {
    // scheme-less authority form, e.g. api.example.com/items
    size_t path_start = url.find('/');
    if (path_start == std::string::npos) {
      out.server = url;
      out.path = "/";
    } else {
      out.server = url.substr(0, path_start);
      out.path = url.substr(path_start);
    }
  }
  if (out.path.empty()) out.path = "/";
  if (!query_str.empty()) {
    size_t i = 0;
    while (i <= query_str.size()) {
      size_t amp = query_str.find('&', i);
      if (amp == std::string::npos) amp = query_str.size();
      std::string part = query_str.substr(i, amp - i);
      if (!part.empty()) {
        size_t eq = part.find('=');
        QueryParam p;
        if (eq == std::string::npos) {
          p.name = part;
          p.has_eq = false;
        } else {
          p.name = part.substr(0, eq);
          p.value = part.substr(eq + 1);
        }
        out.query.push_back(std::move(p));
      }
      if (amp == query_str.size()) break;
      i = amp + 1;
    }
  }
  return out;
}

inline bool parse_body_is_json(const std::string& body) {
  std::string t = text::trim(body);
  if (t.empty() || (t[0] != '{' && t[0] != '[')) return false;
  return nlohmann::json::accept(t);
}

// HTTP-message style examples: request line, optional header lines, blank
// line, optional body.
inline ParsedRequest parse_http_lines(const std::string& txt) {
  std::vector<std::string> lines;
  {
    size_t i = 0;
    while (i <= txt.size()) {
      size_t nl = txt.find('\n', i);
      if (nl == std::string::npos) nl = txt.size();
      lines.push_back(txt.substr(i, nl - i));
      if (nl == txt.size()) break;
      i = nl + 1;
    }
  }
  auto first_tokens = shell_tokens(lines[0]);
  if (first_tokens.size() < 2) throw Error(errc::malformed_example, "missing URL");
  ParsedRequest req;
  req.method = text::to_lower(first_tokens[0]);
  if (!http_methods().count(req.method))
    throw Error(errc::malformed_example, "unknown method: " + first_tokens[0]);
  // a bare "GET /path" with no protocol version and no absolute URL is a
  // section heading, not a request example
  bool has_version = first_tokens.size() >= 3 &&
                     text::istarts_with(first_tokens[2], "HTTP/");
  bool absolute = first_tokens[1].find("://") != std::string::npos;
  if (!has_version && !absolute)
    throw Error(errc::malformed_example, "endpoint heading, not a request");
  auto parts = split_url(first_tokens[1]);
  req.server = parts.server;
  req.path = parts.path;
  req.query_params = std::move(parts.query);

  size_t li = 1;
  for (; li < lines.size(); ++li) {
    std::string line = text::trim(lines[li]);
    if (line.empty()) {
      ++li;
      break;
    }
    size_t colon = line.find(':');
    if (colon == std::string::npos || colon == 0) break;
    std::string name = text::trim(line.substr(0, colon));
    bool name_ok = !name.empty();
    for (char c : name)
      if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_'))
        name_ok = false;
    if (!name_ok) break;
    req.header_params.emplace_back(name, text::trim(line.substr(colon + 1)));
  }
  std::string body;
  for (; li < lines.size(); ++li) {
    if (!body.empty()) body.push_back('\n');
    body += lines[li];
  }
  body = text::trim(body);
  if (!body.empty()) {
    req.body = body;
    req.body_is_json = parse_body_is_json(body);
  }
  if (req.server.empty()) {
    for (const auto& [k, v] : req.header_params)
      if (text::iequals(k, "host")) req.server = v;
  }
  return req;
}

}  // namespace detail

// True when the text looks like a request example: a cURL command, or an
// uppercase HTTP method followed by a /-prefixed path or absolute URL.
inline bool matches_request_pattern(std::string_view s) {
  std::string t = text::trim(s);
  if (t.empty()) return false;
  // allow a leading shell prompt
  if ((t[0] == '$' || t[0] == '#') && t.size() > 1 && text::is_space(t[1]))
    t = text::trim(t.substr(1));
  if (text::istarts_with(t, "curl") && (t.size() == 4 || text::is_space(t[4]))) return true;
  size_t sp = t.find_first_of(" \t");
  if (sp == std::string_view::npos) return false;
  std::string word = t.substr(0, sp);
  for (char c : word)
    if (c < 'A' || c > 'Z') return false;
  if (!detail::http_methods().count(text::to_lower(word))) return false;
  std::string rest = text::trim(t.substr(sp));
  return !rest.empty() &&
         (rest[0] == '/' || text::istarts_with(rest, "http://") ||
          text::istarts_with(rest, "https://"));
}

// Parses a cURL command or an HTTP-line example into a request model.
inline ParsedRequest parse_curl(const std::string& input) {
  std::string t = text::trim(input);
  if ((!t.empty()) && (t[0] == '$' || t[0] == '#') && t.size() > 1 && text::is_space(t[1]))
    t = text::trim(t.substr(1));
  if (t.empty()) throw Error(errc::malformed_example, "empty example text");

  if (!(text::istarts_with(t, "curl") && (t.size() == 4 || text::is_space(t[4])))) {
    if (matches_request_pattern(t)) return detail::parse_http_lines(t);
    throw Error(errc::malformed_example, "not a cURL or METHOD-URL example");
  }

  auto tokens = detail::shell_tokens(t);
  ParsedRequest req;
  std::string explicit_method;
  std::string url;
  std::vector<std::string> data_parts;
  bool get_with_query = false;

  for (size_t i = 1; i < tokens.size(); ++i) {
    std::string tok = tokens[i];
    std::string inline_value;
    bool has_inline = false;
    if (text::starts_with(tok, "--")) {
      size_t eq = tok.find('=');
      if (eq != std::string::npos) {
        inline_value = tok.substr(eq + 1);
        tok = tok.substr(0, eq);
        has_inline = true;
      }
    }
    auto take_value = [&]() -> std::string {
      if (has_inline) return inline_value;
      if (i + 1 < tokens.size()) return tokens[++i];
      return "";
    };
    if (tok == "-X" || tok == "--request") {
      explicit_method = text::to_lower(take_value());
    } else if (tok == "-H" || tok == "--header") {
      std::string h = take_value();
      size_t colon = h.find(':');
      if (colon != std::string::npos) {
        req.header_params.emplace_back(text::trim(h.substr(0, colon)),
                                       text::trim(h.substr(colon + 1)));
      }
    } else if (detail::data_option(tok)) {
      data_parts.push_back(take_value());
    } else if (tok == "--url") {
      url = take_value();
    } else if (tok == "-u" || tok == "--user") {
      req.header_params.emplace_back("Authorization",
                                     "Basic " + detail::base64(take_value()));
    } else if (tok == "-A" || tok == "--user-agent") {
      req.header_params.emplace_back("User-Agent", take_value());
    } else if (tok == "-e" || tok == "--referer") {
      req.header_params.emplace_back("Referer", take_value());
    } else if (tok == "-b" || tok == "--cookie") {
      req.header_params.emplace_back("Cookie", take_value());
    } else if (tok == "-F" || tok == "--form") {
      data_parts.push_back(take_value());
    } else if (tok == "-G" || tok == "--get") {
      get_with_query = true;
    } else if (tok == "-I" || tok == "--head") {
      explicit_method = "head";
    } else if (detail::skippable_value_option(tok)) {
      take_value();
    } else if (!tok.empty() && tok[0] == '-') {
      // boolean flag; ignored
    } else if (url.empty()) {
      url = tok;
    }
  }

  if (url.empty()) throw Error(errc::malformed_example, "missing URL");
  auto parts = detail::split_url(url);
  req.server = parts.server;
  req.path = parts.path;
  req.query_params = std::move(parts.query);

  std::string body;
  for (const auto& p : data_parts) {
    if (!body.empty()) body.push_back('&');
    body += p;
  }
  if (get_with_query && !body.empty()) {
    auto extra = detail::split_url("/?" + body);
    for (auto& q : extra.query) req.query_params.push_back(std::move(q));
    body.clear();
  }
  if (!body.empty()) {
    req.body = body;
    req.body_is_json = detail::parse_body_is_json(body);
  }

  if (!explicit_method.empty())
    req.method = explicit_method;
  else
    req.method = req.body ? "post" : "get";
  if (!detail::http_methods().count(req.method))
    throw Error(errc::malformed_example, "unknown method: " + req.method);
  return req;
}

}  // namespace oasgen::extract
