// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <random>
#include <set>
#include <string>
#include <unordered_set>
#include <vector>

#include <nlohmann/json.hpp>

#include "oasgen/dom.hpp"
#include "oasgen/errors.hpp"
#include "oasgen/extract.hpp"

namespace oasgen::scope {

struct ScopeCandidate {
  int anchor_node_id = 0;
  int rank_param_hits = 0;
  bool rank_method_hit = false;
  int subtree_size = 0;
};

enum class ScopeOrigin { multi_request, single_request };

inline const char* scope_origin_name(ScopeOrigin o) {
  return o == ScopeOrigin::multi_request ? "multi-request" : "single-request";
}

// One ancestor node, or a run of siblings when the request examples are too
// close together for a single exclusive ancestor to exist.
struct EnrichmentScope {
  std::vector<int> node_ids;
  ScopeOrigin origin = ScopeOrigin::single_request;
};

struct ProcessedScope {
  std::string cleaned_html;
  std::string visible_text;
  std::vector<std::string> retained_param_names;
  std::vector<int> dropped_children;  // audit of budget-driven removals
};

inline const std::vector<std::string>& parameter_header_templates() {
  static const std::vector<std::string> names = {
      "parameters", "query parameters", "path parameters",
      "request body", "response", "headers"};
  return names;
}

namespace detail {

inline void collect_json_keys(const nlohmann::json& v, std::set<std::string>& out) {
  if (v.is_object()) {
    for (auto it = v.begin(); it != v.end(); ++it) {
      out.insert(it.key());
      collect_json_keys(it.value(), out);
    }
  } else if (v.is_array()) {
    for (const auto& e : v) collect_json_keys(e, out);
  }
}

inline bool is_leaf_element(const dom::DomNode& n) { return n.children.empty(); }

inline bool has_table_structure(const dom::DomTree& tree, int id) {
  const auto& n = tree.node(id);
  if (n.tag == "table" || n.tag == "thead" || n.tag == "tbody" || n.tag == "tr" ||
      n.tag == "dl")
    return true;
  for (int c : n.children)
    if (has_table_structure(tree, c)) return true;
  return false;
}

inline bool matches_header_template(const std::string& collapsed_lower) {
  for (const auto& t : parameter_header_templates())
    if (collapsed_lower == t) return true;
  return false;
}

// serializer that drops attributes, skips excluded and non-visible nodes
inline void serialize_clean(const dom::DomTree& tree, int id,
                            const std::unordered_set<int>& excluded,
                            std::string& out) {
  const dom::DomNode& n = tree.node(id);
  if (!n.visible || excluded.count(id)) return;
  out.push_back('<');
  out += n.tag;
  out.push_back('>');
  size_t run = 0;
  for (size_t slot = 0; slot <= n.children.size(); ++slot) {
    while (run < n.text_runs.size() && n.text_runs[run].slot == static_cast<int>(slot)) {
      out += n.text_runs[run].content;
      ++run;
    }
    if (slot < n.children.size()) serialize_clean(tree, n.children[slot], excluded, out);
  }
  out += "</";
  out += n.tag;
  out.push_back('>');
}

inline void rendered_text_excluding(const dom::DomTree& tree, int id,
                                    const std::unordered_set<int>& excluded,
                                    std::string& out) {
  const dom::DomNode& n = tree.node(id);
  if (!n.visible || excluded.count(id)) return;
  bool block = dom::DomTree::is_block_tag(n.tag);
  if (block) out.push_back(' ');
  size_t run = 0;
  for (size_t slot = 0; slot <= n.children.size(); ++slot) {
    while (run < n.text_runs.size() && n.text_runs[run].slot == static_cast<int>(slot)) {
      out += n.text_runs[run].content;
      ++run;
    }
    if (slot < n.children.size())
      rendered_text_excluding(tree, n.children[slot], excluded, out);
  }
  if (block) out.push_back(' ');
}

}  // namespace detail

// Parameter names tied to an example pair: query and header names, path
// template variables, JSON keys of the request body and the response.
inline std::set<std::string> example_param_names(const extract::EndpointExamplePair& pair) {
  std::set<std::string> names;
  const auto& req = pair.request.parsed;
  for (const auto& q : req.query_params) names.insert(q.name);
  for (const auto& [k, v] : req.header_params) names.insert(k);
  // /users/{id} style template variables
  const std::string& path = req.path;
  for (size_t i = 0; i < path.size(); ++i) {
    if (path[i] != '{') continue;
    size_t close = path.find('}', i);
    if (close == std::string::npos) break;
    names.insert(path.substr(i + 1, close - i - 1));
    i = close;
  }
  if (req.body && req.body_is_json && nlohmann::json::accept(*req.body))
    detail::collect_json_keys(nlohmann::json::parse(*req.body), names);
  if (pair.response && pair.response->is_json &&
      nlohmann::json::accept(pair.response->raw_text))
    detail::collect_json_keys(nlohmann::json::parse(pair.response->raw_text), names);
  names.erase("");
  return names;
}

// Highest ancestor of the target request that contains no other request; if
// siblings at that level separate it from the next request, the scope is the
// run of siblings from the ancestor up to (excluding) the next request's
// ancestor.
inline EnrichmentScope find_scope_multi(
    const dom::DomTree& tree, const extract::EndpointExamplePair& target,
    const std::vector<extract::EndpointExamplePair>& all_pairs) {
  int req = target.request.node_id;
  if (req < 0 || req >= tree.size())
    throw Error(errc::scope_not_found, "request node missing from tree");

  std::vector<int> others;
  for (const auto& p : all_pairs)
    if (p.request.node_id != req) others.push_back(p.request.node_id);

  auto contains_other = [&](int anc) {
    for (int o : others)
      if (tree.in_subtree(anc, o)) return true;
    return false;
  };

  int anchor = req;
  while (tree.node(anchor).parent_id) {
    int parent = *tree.node(anchor).parent_id;
    if (contains_other(parent)) break;
    anchor = parent;
  }

  EnrichmentScope out;
  out.origin = ScopeOrigin::multi_request;
  if (!tree.node(anchor).parent_id) {
    out.node_ids = {anchor};
    return out;
  }
  int parent = *tree.node(anchor).parent_id;
  const auto& sibs = tree.node(parent).children;
  size_t start = 0;
  while (sibs[start] != anchor) ++start;
  size_t end = sibs.size();
  for (size_t j = start + 1; j < sibs.size(); ++j) {
    if (contains_other(sibs[j])) {
      end = j;
      break;
    }
  }
  for (size_t j = start; j < end; ++j) out.node_ids.push_back(sibs[j]);
  return out;
}

// Single-request pages: seed on leaves naming a known parameter or a
// parameter-section heading, then walk upward to the first ancestor that also
// carries the endpoint's URL or path in some leaf.
inline std::vector<ScopeCandidate> find_candidates_single(
    const dom::DomTree& tree, const extract::EndpointExamplePair& target) {
  auto names = example_param_names(target);
  const auto& req = target.request.parsed;
  std::string path_lower = text::to_lower(req.path);
  std::string url_lower = text::to_lower(req.url());
  std::string method_lower = req.method;

  auto leaf_text = [&](int id) {
    return text::collapse_ws(tree.node(id).text);
  };
  auto is_seed_leaf = [&](int id) {
    std::string t = leaf_text(id);
    if (t.empty()) return false;
    std::string lower = text::to_lower(t);
    if (detail::matches_header_template(lower)) return true;
    for (const auto& n : names)
      if (text::iequals(t, n)) return true;
    return false;
  };
  auto is_endpoint_leaf = [&](int id) {
    std::string lower = text::to_lower(leaf_text(id));
    if (lower.empty()) return false;
    return lower.find(path_lower) != std::string::npos ||
           (!url_lower.empty() && lower.find(url_lower) != std::string::npos);
  };

  std::vector<int> endpoint_leaves;
  std::vector<int> seed_leaves;
  for (int id = 0; id < tree.size(); ++id) {
    const auto& n = tree.node(id);
    if (!n.visible || !detail::is_leaf_element(n)) continue;
    if (is_endpoint_leaf(id)) endpoint_leaves.push_back(id);
    if (is_seed_leaf(id)) seed_leaves.push_back(id);
  }

  auto subtree_has_endpoint_leaf = [&](int anc) {
    for (int leaf : endpoint_leaves)
      if (tree.in_subtree(anc, leaf)) return true;
    return false;
  };

  std::vector<int> anchors;
  std::set<int> seen;
  for (int leaf : seed_leaves) {
    int cur = leaf;
    while (true) {
      if (subtree_has_endpoint_leaf(cur)) {
        if (seen.insert(cur).second) anchors.push_back(cur);
        break;
      }
      if (!tree.node(cur).parent_id) break;
      cur = *tree.node(cur).parent_id;
    }
  }

  std::vector<ScopeCandidate> out;
  for (int anchor : anchors) {
    ScopeCandidate c;
    c.anchor_node_id = anchor;
    c.subtree_size = tree.node(anchor).subtree_size;
    std::set<std::string> found;
    for (int id = anchor; id < anchor + tree.node(anchor).subtree_size; ++id) {
      const auto& n = tree.node(id);
      if (!n.visible || !detail::is_leaf_element(n)) continue;
      std::string t = leaf_text(id);
      if (t.empty()) continue;
      for (const auto& nm : names)
        if (text::iequals(t, nm)) found.insert(nm);
      if (!c.rank_method_hit) {
        for (const auto& tok : text::word_tokens(t))
          if (tok == method_lower) c.rank_method_hit = true;
      }
    }
    c.rank_param_hits = static_cast<int>(found.size());
    out.push_back(c);
  }
  return out;
}

// Rank by parameter hits, then method hit; strict ancestors of other
// candidates are discarded; rank ties are broken by the seeded generator.
inline EnrichmentScope rank_and_select(const std::vector<ScopeCandidate>& candidates,
                                       std::uint64_t rng_seed) {
  if (candidates.empty()) throw Error(errc::no_candidates, "no scope candidates");

  auto is_strict_ancestor = [](const ScopeCandidate& a, const ScopeCandidate& b) {
    return a.anchor_node_id < b.anchor_node_id &&
           b.anchor_node_id < a.anchor_node_id + a.subtree_size;
  };
  std::vector<ScopeCandidate> surviving;
  for (const auto& c : candidates) {
    bool drop = false;
    for (const auto& other : candidates)
      if (is_strict_ancestor(c, other)) {
        drop = true;
        break;
      }
    if (!drop) surviving.push_back(c);
  }
  if (surviving.empty()) throw Error(errc::no_candidates, "no scope candidates");

  std::stable_sort(surviving.begin(), surviving.end(),
                   [](const ScopeCandidate& a, const ScopeCandidate& b) {
                     if (a.rank_param_hits != b.rank_param_hits)
                       return a.rank_param_hits > b.rank_param_hits;
                     return a.rank_method_hit && !b.rank_method_hit;
                   });
  size_t tied = 1;
  while (tied < surviving.size() &&
         surviving[tied].rank_param_hits == surviving[0].rank_param_hits &&
         surviving[tied].rank_method_hit == surviving[0].rank_method_hit)
    ++tied;
  size_t pick = 0;
  if (tied > 1) {
    std::mt19937_64 rng(rng_seed);
    pick = static_cast<size_t>(rng() % tied);
  }
  EnrichmentScope out;
  out.origin = ScopeOrigin::single_request;
  out.node_ids = {surviving[pick].anchor_node_id};
  return out;
}

// Cleans a scope for prompting: request/response examples removed, attributes
// stripped, low-relevance children dropped until the serialization fits the
// character budget.
inline ProcessedScope preprocess_scope(const dom::DomTree& tree,
                                       const EnrichmentScope& scope,
                                       const extract::EndpointExamplePair& pair,
                                       int char_budget) {
  auto names = example_param_names(pair);

  std::unordered_set<int> excluded;
  auto exclude_examples = [&](int scope_node) {
    if (tree.in_subtree(scope_node, pair.request.node_id))
      excluded.insert(pair.request.node_id);
    if (pair.response && tree.in_subtree(scope_node, pair.response->node_id))
      excluded.insert(pair.response->node_id);
  };
  for (int id : scope.node_ids) exclude_examples(id);

  // droppable units: sequence members for a sibling-run scope, otherwise the
  // single anchor's direct children
  std::vector<int> units;
  bool units_are_scope_nodes = scope.node_ids.size() > 1;
  if (units_are_scope_nodes) {
    units = scope.node_ids;
  } else {
    for (int c : tree.node(scope.node_ids[0]).children) units.push_back(c);
  }

  auto relevance = [&](int id) {
    if (excluded.count(id)) return -1;  // already gone
    std::string vis;
    detail::rendered_text_excluding(tree, id, excluded, vis);
    vis = text::collapse_ws(vis);
    auto tokens = text::word_token_set(vis);
    int score = 0;
    for (const auto& n : names)
      if (tokens.count(text::to_lower(n))) ++score;
    if (detail::has_table_structure(tree, id)) score += 2;
    if (detail::matches_header_template(text::to_lower(vis))) score += 1;
    return score;
  };

  std::vector<std::pair<int, int>> unit_scores;  // (unit id, score)
  for (int u : units)
    if (!excluded.count(u)) unit_scores.emplace_back(u, relevance(u));

  auto serialize_scope = [&]() {
    std::string html;
    for (int id : scope.node_ids) detail::serialize_clean(tree, id, excluded, html);
    return html;
  };

  std::vector<int> dropped;
  std::string html = serialize_scope();
  while (static_cast<int>(html.size()) > char_budget && !unit_scores.empty()) {
    // drop the lowest score; among equals, the latest in document order
    size_t worst = 0;
    for (size_t i = 1; i < unit_scores.size(); ++i)
      if (unit_scores[i].second <= unit_scores[worst].second) worst = i;
    excluded.insert(unit_scores[worst].first);
    dropped.push_back(unit_scores[worst].first);
    unit_scores.erase(unit_scores.begin() + static_cast<long>(worst));
    html = serialize_scope();
  }
  if (static_cast<int>(html.size()) > char_budget)
    throw Error(errc::budget_impossible, "scope cannot fit character budget");

  ProcessedScope out;
  out.cleaned_html = html;
  std::string vis;
  for (int id : scope.node_ids) detail::rendered_text_excluding(tree, id, excluded, vis);
  out.visible_text = text::collapse_ws(vis);
  out.dropped_children = dropped;
  auto tokens = text::word_token_set(out.visible_text);
  for (const auto& n : names)
    if (tokens.count(text::to_lower(n))) out.retained_param_names.push_back(n);
  return out;
}

}  // namespace oasgen::scope
