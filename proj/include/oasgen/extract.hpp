// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include <nlohmann/json.hpp>

#include "oasgen/dom.hpp"
#include "oasgen/request.hpp"

namespace oasgen::extract {

struct RequestExample {
  int node_id = 0;
  std::string raw_text;
  ParsedRequest parsed;
};

struct ResponseExample {
  int node_id = 0;
  std::string raw_text;  // preamble stripped
  bool is_json = false;
  std::optional<int> status_code;  // from an HTTP/x preamble when present
};

struct EndpointExamplePair {
  RequestExample request;
  std::optional<ResponseExample> response;
};

namespace detail {

inline bool is_code_tag(const std::string& tag) {
  return tag == "pre" || tag == "code" || tag == "samp" || tag == "kbd";
}

// Finds the minimal elements accepted by `accept`, bottom-up: a node is
// emitted only when nothing in its subtree was. Descendants that merely look
// like examples but fail to parse (a highlighter `<span>curl</span>`) do not
// shadow a parseable ancestor.
template <typename Accept>
inline bool scan_minimal(const dom::DomTree& tree, int id, const Accept& accept,
                         const std::unordered_set<int>& skip,
                         std::vector<int>& out) {
  const dom::DomNode& n = tree.node(id);
  if (!n.visible || skip.count(id)) return false;
  bool child_hit = false;
  for (int c : n.children)
    if (scan_minimal(tree, c, accept, skip, out)) child_hit = true;
  if (child_hit) return true;
  if (!accept(tree.subtree_text(id))) return false;
  out.push_back(id);
  return true;
}

struct ResponseBody {
  std::string body;
  bool has_preamble = false;
  std::optional<int> status;
};

// Strips an `HTTP/1.1 200 OK` style preamble (plus any header lines) in
// front of the payload.
inline ResponseBody strip_preamble(const std::string& t) {
  ResponseBody out;
  std::string trimmed = text::trim(t);
  if (!text::istarts_with(trimmed, "HTTP/")) {
    out.body = trimmed;
    return out;
  }
  out.has_preamble = true;
  std::vector<std::string> lines;
  size_t i = 0;
  while (i <= trimmed.size()) {
    size_t nl = trimmed.find('\n', i);
    if (nl == std::string::npos) nl = trimmed.size();
    lines.push_back(trimmed.substr(i, nl - i));
    if (nl == trimmed.size()) break;
    i = nl + 1;
  }
  // status code is the second token of the status line
  {
    auto toks = text::word_tokens(lines[0]);
    for (const auto& tok : toks) {
      if (tok.size() == 3 && std::isdigit(static_cast<unsigned char>(tok[0]))) {
        out.status = std::stoi(tok);
        break;
      }
    }
  }
  size_t body_start = lines.size();
  for (size_t li = 1; li < lines.size(); ++li) {
    std::string lt = text::trim(lines[li]);
    if (!lt.empty() && (lt[0] == '{' || lt[0] == '[' || lt[0] == '<')) {
      body_start = li;
      break;
    }
  }
  std::string body;
  for (size_t li = body_start; li < lines.size(); ++li) {
    if (!body.empty()) body.push_back('\n');
    body += lines[li];
  }
  out.body = text::trim(body);
  return out;
}

inline bool parses_as_json_value(const std::string& s) {
  std::string t = text::trim(s);
  if (t.empty() || (t[0] != '{' && t[0] != '[')) return false;
  return nlohmann::json::accept(t);
}

}  // namespace detail

// Request-example candidates in document order. Detection fires on the
// minimal elements whose text is a cURL command or METHOD-URL line; each
// candidate must actually parse.
inline std::vector<RequestExample> find_request_examples(const dom::DomTree& tree) {
  auto accepts = [](const std::string& t) {
    if (!matches_request_pattern(t)) return false;
    try {
      parse_curl(text::trim(t));
      return true;
    } catch (const Error&) {
      return false;
    }
  };
  std::vector<int> candidates;
  detail::scan_minimal(tree, tree.root().node_id, accepts, {}, candidates);
  std::vector<RequestExample> out;
  for (int id : candidates) {
    RequestExample ex;
    ex.node_id = id;
    ex.raw_text = text::trim(tree.subtree_text(id));
    ex.parsed = parse_curl(ex.raw_text);
    out.push_back(std::move(ex));
  }
  return out;
}

// Response-example candidates in document order: code-like blocks whose text
// is JSON (optionally with an HTTP status preamble), excluding request nodes.
inline std::vector<ResponseExample> find_response_examples(
    const dom::DomTree& tree, const std::vector<RequestExample>& requests) {
  std::unordered_set<int> request_nodes;
  for (const auto& r : requests) request_nodes.insert(r.node_id);

  auto is_response_text = [](const std::string& t) {
    if (matches_request_pattern(t)) return false;
    auto rb = detail::strip_preamble(t);
    if (rb.has_preamble) return !rb.body.empty();
    return detail::parses_as_json_value(rb.body);
  };

  std::vector<int> candidates;
  detail::scan_minimal(tree, tree.root().node_id, is_response_text, request_nodes,
                       candidates);
  std::vector<ResponseExample> out;
  for (int id : candidates) {
    auto rb = detail::strip_preamble(tree.subtree_text(id));
    ResponseExample ex;
    ex.node_id = id;
    ex.raw_text = rb.body;
    ex.is_json = detail::parses_as_json_value(rb.body);
    ex.status_code = rb.status;
    out.push_back(std::move(ex));
  }
  return out;
}

inline std::vector<ResponseExample> find_response_examples(const dom::DomTree& tree) {
  return find_response_examples(tree, find_request_examples(tree));
}

// Pairs each request with the unpaired response nearest in the DOM (edge
// distance). Requests are processed in document order; ties prefer responses
// occurring after the request, then smaller node_id. A request may end up
// with no response.
inline std::vector<EndpointExamplePair> pair_examples(
    const dom::DomTree& tree, const std::vector<RequestExample>& requests,
    const std::vector<ResponseExample>& responses) {
  std::vector<bool> used(responses.size(), false);
  std::vector<EndpointExamplePair> out;
  for (const auto& req : requests) {
    int best = -1;
    int best_dist = 0;
    bool best_after = false;
    for (size_t i = 0; i < responses.size(); ++i) {
      if (used[i]) continue;
      if (responses[i].node_id == req.node_id) continue;
      int d = tree.distance(req.node_id, responses[i].node_id);
      bool after = responses[i].node_id > req.node_id;
      bool better = false;
      if (best < 0) {
        better = true;
      } else if (d != best_dist) {
        better = d < best_dist;
      } else if (after != best_after) {
        better = after;
      } else {
        better = responses[i].node_id < responses[static_cast<size_t>(best)].node_id;
      }
      if (better) {
        best = static_cast<int>(i);
        best_dist = d;
        best_after = after;
      }
    }
    EndpointExamplePair pair;
    pair.request = req;
    if (best >= 0) {
      used[static_cast<size_t>(best)] = true;
      pair.response = responses[static_cast<size_t>(best)];
    }
    out.push_back(std::move(pair));
  }
  return out;
}

}  // namespace oasgen::extract
