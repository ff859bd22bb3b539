// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <variant>
#include <vector>

#include "oasgen/errors.hpp"
#include "oasgen/text.hpp"

namespace oasgen::dom {

// A text fragment interleaved with the children of an element: the run is
// serialized before children[slot] (slot == children.size() means after the
// last child).
struct TextRun {
  int slot = 0;
  std::string content;
};

struct DomNode {
  int node_id = 0;
  std::optional<int> parent_id;
  std::string tag;  // lowercase element name
  std::vector<std::pair<std::string, std::string>> attributes;
  std::string text;  // own text content (all runs concatenated)
  std::vector<int> children;
  std::vector<TextRun> text_runs;
  bool visible = true;  // false for script/style content
  int depth = 0;
  int subtree_size = 1;
};

class DomTree {
public:
  const DomNode& node(int id) const { return nodes_.at(static_cast<size_t>(id)); }
  const DomNode& root() const { return nodes_.front(); }
  int size() const { return static_cast<int>(nodes_.size()); }
  bool contains(int id) const { return id >= 0 && id < size(); }

  // Proper-ancestor test via the pre-order interval [id, id + subtree_size).
  bool is_ancestor(int a, int b) const {
    if (a == b) return false;
    const DomNode& n = node(a);
    return b > a && b < a + n.subtree_size;
  }

  bool in_subtree(int root_id, int id) const {
    return id == root_id || is_ancestor(root_id, id);
  }

  int lca(int a, int b) const {
    while (!in_subtree(a, b)) a = *node(a).parent_id;
    return a;
  }

  // Number of edges on the tree path between two nodes.
  int distance(int a, int b) const {
    int anc = lca(a, b);
    return node(a).depth + node(b).depth - 2 * node(anc).depth;
  }

  // Raw text of the subtree in document order; skips non-visible content.
  std::string subtree_text(int id) const {
    std::string out;
    append_text(id, out);
    return out;
  }

  // Whitespace-collapsed visible text. Block-level boundaries separate words
  // the way rendering would, so `<td>limit</td><td>integer</td>` keeps two
  // tokens instead of fusing into one.
  std::string visible_text(int id) const {
    std::string raw;
    append_rendered_text(id, raw);
    return text::collapse_ws(raw);
  }

  std::string serialize(int id, bool with_attributes) const {
    std::string out;
    serialize_into(id, with_attributes, out);
    return out;
  }

  std::vector<DomNode>& mutable_nodes() { return nodes_; }
  const std::vector<DomNode>& all_nodes() const { return nodes_; }

  static bool is_block_tag(const std::string& tag) {
    static const std::set<std::string> block = {
        "address", "article",  "aside",   "blockquote", "br",     "caption",
        "dd",      "details",  "div",     "dl",         "dt",     "fieldset",
        "figure",  "figcaption", "footer", "form",      "h1",     "h2",
        "h3",      "h4",       "h5",      "h6",         "header", "hr",
        "li",      "main",     "nav",     "ol",         "p",      "pre",
        "section", "summary",  "table",   "tbody",      "td",     "tfoot",
        "th",      "thead",    "tr",      "ul"};
    return block.count(tag) > 0;
  }

private:
  void append_text(int id, std::string& out) const {
    const DomNode& n = node(id);
    if (!n.visible) return;
    size_t run = 0;
    for (size_t slot = 0; slot <= n.children.size(); ++slot) {
      while (run < n.text_runs.size() &&
             n.text_runs[run].slot == static_cast<int>(slot)) {
        out += n.text_runs[run].content;
        ++run;
      }
      if (slot < n.children.size()) append_text(n.children[slot], out);
    }
  }


  void append_rendered_text(int id, std::string& out) const {
    const DomNode& n = node(id);
    if (!n.visible) return;
    bool block = is_block_tag(n.tag);
    if (block) out.push_back(' ');
    size_t run = 0;
    for (size_t slot = 0; slot <= n.children.size(); ++slot) {
      while (run < n.text_runs.size() &&
             n.text_runs[run].slot == static_cast<int>(slot)) {
        out += n.text_runs[run].content;
        ++run;
      }
      if (slot < n.children.size()) append_rendered_text(n.children[slot], out);
    }
    if (block) out.push_back(' ');
  }

  void serialize_into(int id, bool with_attributes, std::string& out) const {
    const DomNode& n = node(id);
    out.push_back('<');
    out += n.tag;
    if (with_attributes) {
      for (const auto& [k, v] : n.attributes) {
        out.push_back(' ');
        out += k;
        out += "=\"";
        out += v;
        out.push_back('"');
      }
    }
    out.push_back('>');
    size_t run = 0;
    for (size_t slot = 0; slot <= n.children.size(); ++slot) {
      while (run < n.text_runs.size() &&
             n.text_runs[run].slot == static_cast<int>(slot)) {
        out += n.text_runs[run].content;
        ++run;
      }
      if (slot < n.children.size()) serialize_into(n.children[slot], with_attributes, out);
    }
    out += "</";
    out += n.tag;
    out.push_back('>');
  }

  std::vector<DomNode> nodes_;  // node_id == index, pre-order
  friend DomTree parse_dom(std::string_view);
};

namespace detail {

struct RawNode {
  std::string tag;
  std::vector<std::pair<std::string, std::string>> attributes;
  std::vector<std::variant<std::string, std::unique_ptr<RawNode>>> content;
  bool visible = true;
};

inline const std::unordered_set<std::string>& void_elements() {
  static const std::unordered_set<std::string> s = {
      "area", "base", "br", "col", "embed", "hr", "img", "input",
      "link", "meta", "param", "source", "track", "wbr"};
  return s;
}

inline const std::unordered_set<std::string>& raw_text_elements() {
  static const std::unordered_set<std::string> s = {"script", "style", "textarea", "title"};
  return s;
}

// opening `key` implicitly closes an innermost open element in the mapped set
inline const std::map<std::string, std::unordered_set<std::string>>& auto_close() {
  static const std::map<std::string, std::unordered_set<std::string>> m = {
      {"p", {"p"}},
      {"li", {"li"}},
      {"dt", {"dt", "dd"}},
      {"dd", {"dt", "dd"}},
      {"tr", {"tr", "td", "th"}},
      {"td", {"td", "th"}},
      {"th", {"td", "th"}},
      {"option", {"option"}},
      {"thead", {"tr", "td", "th"}},
      {"tbody", {"tr", "td", "th", "thead", "tbody"}},
      {"tfoot", {"tr", "td", "th", "thead", "tbody"}},
  };
  return m;
}

inline bool block_closes_p(const std::string& tag) {
  static const std::unordered_set<std::string> s = {
      "p",  "div", "ul", "ol", "dl", "table", "pre", "section", "article",
      "h1", "h2",  "h3", "h4", "h5", "h6",    "form", "blockquote", "main"};
  return s.count(tag) > 0;
}

inline std::string decode_entities(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  size_t i = 0;
  while (i < s.size()) {
    if (s[i] != '&') {
      out.push_back(s[i++]);
      continue;
    }
    size_t semi = s.find(';', i + 1);
    if (semi == std::string_view::npos || semi - i > 12) {
      out.push_back(s[i++]);
      continue;
    }
    std::string_view ent = s.substr(i + 1, semi - i - 1);
    if (ent == "amp") out.push_back('&');
    else if (ent == "lt") out.push_back('<');
    else if (ent == "gt") out.push_back('>');
    else if (ent == "quot") out.push_back('"');
    else if (ent == "apos") out.push_back('\'');
    else if (ent == "nbsp") out.push_back(' ');
    else if (!ent.empty() && ent[0] == '#') {
      uint32_t cp = 0;
      bool ok = ent.size() > 1;
      if (ent.size() > 2 && (ent[1] == 'x' || ent[1] == 'X')) {
        for (size_t k = 2; k < ent.size() && ok; ++k) {
          char c = ent[k];
          cp = cp * 16;
          if (c >= '0' && c <= '9') cp += static_cast<uint32_t>(c - '0');
          else if (c >= 'a' && c <= 'f') cp += static_cast<uint32_t>(c - 'a' + 10);
          else if (c >= 'A' && c <= 'F') cp += static_cast<uint32_t>(c - 'A' + 10);
          else ok = false;
        }
      } else {
        for (size_t k = 1; k < ent.size() && ok; ++k) {
          char c = ent[k];
          if (c < '0' || c > '9') { ok = false; break; }
          cp = cp * 10 + static_cast<uint32_t>(c - '0');
        }
      }
      if (ok && cp > 0 && cp <= 0x10FFFF && !(cp >= 0xD800 && cp <= 0xDFFF)) {
        text::append_utf8(out, cp);
      } else {
        out.push_back(s[i]);
        i += 1;
        continue;
      }
    } else {
      out.push_back(s[i++]);
      continue;
    }
    i = semi + 1;
  }
  return out;
}

inline bool is_tag_name_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) != 0;
}

inline bool is_tag_name_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == ':';
}

struct Tokenizer {
  std::string_view src;
  size_t pos = 0;

  bool done() const { return pos >= src.size(); }
};

}  // namespace detail

// Error-tolerant HTML parsing. Unclosed tags are recovered (a new <p> closes
// an open <p>, stray close tags are matched upward or dropped), script/style
// bodies are kept verbatim but flagged non-visible, and the result is
// normalized to an html/body structure.
inline DomTree parse_dom(std::string_view raw_html) {
  using detail::RawNode;
  auto doc = std::make_unique<RawNode>();
  doc->tag = "#document";

  std::vector<RawNode*> stack = {doc.get()};
  bool saw_element = false;

  auto top = [&]() { return stack.back(); };
  auto add_text = [&](std::string_view t, bool decode) {
    if (t.empty()) return;
    std::string s = decode ? detail::decode_entities(t) : std::string(t);
    top()->content.emplace_back(std::move(s));
  };

  size_t i = 0;
  const size_t n = raw_html.size();
  while (i < n) {
    if (raw_html[i] != '<') {
      size_t lt = raw_html.find('<', i);
      if (lt == std::string_view::npos) lt = n;
      add_text(raw_html.substr(i, lt - i), true);
      i = lt;
      continue;
    }
    // comment
    if (raw_html.substr(i, 4) == "<!--") {
      size_t end = raw_html.find("-->", i + 4);
      i = (end == std::string_view::npos) ? n : end + 3;
      continue;
    }
    // doctype / CDATA / other declarations
    if (i + 1 < n && (raw_html[i + 1] == '!' || raw_html[i + 1] == '?')) {
      size_t end = raw_html.find('>', i + 1);
      i = (end == std::string_view::npos) ? n : end + 1;
      continue;
    }
    // close tag
    if (i + 1 < n && raw_html[i + 1] == '/') {
      size_t j = i + 2;
      std::string name;
      while (j < n && detail::is_tag_name_char(raw_html[j]))
        name.push_back(text::ascii_lower(raw_html[j++]));
      size_t end = raw_html.find('>', j);
      i = (end == std::string_view::npos) ? n : end + 1;
      if (name.empty()) continue;
      // match upward; ignore when not open
      for (size_t k = stack.size(); k-- > 1;) {
        if (stack[k]->tag == name) {
          stack.resize(k);
          break;
        }
      }
      continue;
    }
    // open tag
    if (i + 1 < n && detail::is_tag_name_start(raw_html[i + 1])) {
      size_t j = i + 1;
      std::string name;
      while (j < n && detail::is_tag_name_char(raw_html[j]))
        name.push_back(text::ascii_lower(raw_html[j++]));
      std::vector<std::pair<std::string, std::string>> attrs;
      bool self_closed = false;
      while (j < n && raw_html[j] != '>') {
        if (text::is_space(raw_html[j])) { ++j; continue; }
        if (raw_html[j] == '/') {
          self_closed = true;
          ++j;
          continue;
        }
        std::string aname;
        while (j < n && raw_html[j] != '=' && raw_html[j] != '>' && raw_html[j] != '/' &&
               !text::is_space(raw_html[j]))
          aname.push_back(text::ascii_lower(raw_html[j++]));
        std::string aval;
        while (j < n && text::is_space(raw_html[j])) ++j;
        if (j < n && raw_html[j] == '=') {
          ++j;
          while (j < n && text::is_space(raw_html[j])) ++j;
          if (j < n && (raw_html[j] == '"' || raw_html[j] == '\'')) {
            char q = raw_html[j++];
            size_t endq = raw_html.find(q, j);
            if (endq == std::string_view::npos) endq = n;
            aval = detail::decode_entities(raw_html.substr(j, endq - j));
            j = (endq < n) ? endq + 1 : n;
          } else {
            size_t s0 = j;
            while (j < n && !text::is_space(raw_html[j]) && raw_html[j] != '>' &&
                   raw_html[j] != '/')
              ++j;
            aval = detail::decode_entities(raw_html.substr(s0, j - s0));
          }
        }
        if (!aname.empty()) attrs.emplace_back(std::move(aname), std::move(aval));
      }
      i = (j < n) ? j + 1 : n;

      // implicit closes
      if (detail::block_closes_p(name)) {
        for (size_t k = stack.size(); k-- > 1;) {
          if (stack[k]->tag == "p") {
            stack.resize(k);
            break;
          }
          if (stack[k]->tag == "div" || stack[k]->tag == "td" || stack[k]->tag == "th" ||
              stack[k]->tag == "li" || stack[k]->tag == "body")
            break;  // p not open at this level
        }
      }
      auto ac = detail::auto_close().find(name);
      if (ac != detail::auto_close().end()) {
        while (stack.size() > 1 && ac->second.count(top()->tag)) stack.pop_back();
      }

      auto el = std::make_unique<RawNode>();
      el->tag = name;
      el->attributes = std::move(attrs);
      el->visible = !(name == "script" || name == "style");
      RawNode* raw = el.get();
      top()->content.emplace_back(std::move(el));
      saw_element = true;

      bool is_void = detail::void_elements().count(name) > 0;
      if (!is_void && !self_closed) stack.push_back(raw);

      // raw-text elements consume everything up to their close tag
      if (!self_closed && detail::raw_text_elements().count(name)) {
        std::string close = "</" + name;
        size_t endpos = i;
        size_t found = std::string_view::npos;
        // case-insensitive search for the close tag
        while (endpos < n) {
          size_t lt = raw_html.find('<', endpos);
          if (lt == std::string_view::npos) break;
          if (lt + close.size() <= n &&
              text::iequals(raw_html.substr(lt, close.size()), close)) {
            found = lt;
            break;
          }
          endpos = lt + 1;
        }
        bool decode = (name == "textarea" || name == "title");
        if (found == std::string_view::npos) {
          if (i < n) raw->content.emplace_back(
              decode ? detail::decode_entities(raw_html.substr(i))
                     : std::string(raw_html.substr(i)));
          i = n;
        } else {
          raw->content.emplace_back(
              decode ? detail::decode_entities(raw_html.substr(i, found - i))
                     : std::string(raw_html.substr(i, found - i)));
          size_t gt = raw_html.find('>', found);
          i = (gt == std::string_view::npos) ? n : gt + 1;
        }
        if (stack.back() == raw) stack.pop_back();
      }
      continue;
    }
    // stray '<' becomes text
    add_text(raw_html.substr(i, 1), false);
    ++i;
  }

  // A document from which no element was recovered and which carries no text
  // at all is unusable.
  bool has_text = false;
  for (const auto& c : doc->content)
    if (std::holds_alternative<std::string>(c) &&
        !text::trim(std::get<std::string>(c)).empty())
      has_text = true;
  if (!saw_element && !has_text)
    throw Error(errc::parse_failure, "no element could be recovered from input");

  // Normalize to an html > (head?, body) structure.
  RawNode* html = nullptr;
  for (auto& c : doc->content) {
    if (std::holds_alternative<std::unique_ptr<RawNode>>(c) &&
        std::get<std::unique_ptr<RawNode>>(c)->tag == "html") {
      html = std::get<std::unique_ptr<RawNode>>(c).get();
      break;
    }
  }
  auto html_owner = std::make_unique<RawNode>();
  if (!html) {
    html_owner->tag = "html";
    html_owner->content = std::move(doc->content);
    html = html_owner.get();
  }
  RawNode* body = nullptr;
  RawNode* head = nullptr;
  for (auto& c : html->content) {
    if (!std::holds_alternative<std::unique_ptr<RawNode>>(c)) continue;
    auto* el = std::get<std::unique_ptr<RawNode>>(c).get();
    if (el->tag == "body" && !body) body = el;
    if (el->tag == "head" && !head) head = el;
  }
  if (!body) {
    auto body_owner = std::make_unique<RawNode>();
    body_owner->tag = "body";
    std::vector<std::variant<std::string, std::unique_ptr<RawNode>>> kept;
    for (auto& c : html->content) {
      if (std::holds_alternative<std::unique_ptr<RawNode>>(c)) {
        auto* el = std::get<std::unique_ptr<RawNode>>(c).get();
        if (el->tag == "head") {
          kept.emplace_back(std::move(c));
          continue;
        }
      }
      body_owner->content.emplace_back(std::move(c));
    }
    body = body_owner.get();
    kept.emplace_back(std::move(body_owner));
    html->content = std::move(kept);
  }

  // Flatten pre-order into the arena.
  DomTree tree;
  struct Flattener {
    std::vector<DomNode>& out;
    int flatten(const RawNode& raw, std::optional<int> parent, int depth, bool visible) {
      int id = static_cast<int>(out.size());
      out.emplace_back();
      out[id].node_id = id;
      out[id].parent_id = parent;
      out[id].tag = raw.tag;
      out[id].attributes = raw.attributes;
      out[id].depth = depth;
      out[id].visible = visible && raw.visible;
      for (const auto& c : raw.content) {
        if (std::holds_alternative<std::string>(c)) {
          const auto& t = std::get<std::string>(c);
          out[id].text += t;
          int slot = static_cast<int>(out[id].children.size());
          if (!out[id].text_runs.empty() && out[id].text_runs.back().slot == slot) {
            out[id].text_runs.back().content += t;
          } else {
            out[id].text_runs.push_back({slot, t});
          }
        } else {
          int child = flatten(*std::get<std::unique_ptr<RawNode>>(c), id, depth + 1,
                              out[id].visible);
          out[id].children.push_back(child);
        }
      }
      out[id].subtree_size = static_cast<int>(out.size()) - id;
      return id;
    }
  };
  Flattener f{tree.nodes_};
  f.flatten(*html, std::nullopt, 0, true);
  return tree;
}

// --- tag histograms -------------------------------------------------------

struct TagHistogram {
  std::map<std::string, int> counts;  // no zero entries

  int total() const {
    int t = 0;
    for (const auto& [_, c] : counts) t += c;
    return t;
  }
  bool empty() const { return counts.empty(); }
};

// Counts of element tags in the subtree rooted at `fragment_id`, inclusive.
// Script/style subtrees are not part of the visible documentation and are
// excluded.
inline TagHistogram tag_frequency(const DomTree& tree, int fragment_id) {
  TagHistogram h;
  const DomNode& rootn = tree.node(fragment_id);
  for (int id = fragment_id; id < fragment_id + rootn.subtree_size; ++id) {
    const DomNode& n = tree.node(id);
    if (!n.visible) continue;
    h.counts[n.tag] += 1;
  }
  return h;
}

enum class SimilarityMetric { cosine, kl_divergence };

inline SimilarityMetric metric_from_name(std::string_view name) {
  if (text::iequals(name, "cosine")) return SimilarityMetric::cosine;
  if (text::iequals(name, "kl-divergence") || text::iequals(name, "kl"))
    return SimilarityMetric::kl_divergence;
  throw Error(errc::degenerate_histogram, "unknown similarity metric: " + std::string(name));
}

// Cosine over the union tag vocabulary, in [0,1]; or KL divergence
// sum(p * ln(p/q)) with 1e-9 additive smoothing over the union vocabulary
// (non-negative, lower means more similar).
inline double histogram_similarity(const TagHistogram& a, const TagHistogram& b,
                                   SimilarityMetric metric = SimilarityMetric::cosine) {
  if (a.empty() || b.empty())
    throw Error(errc::degenerate_histogram, "histogram is empty");
  std::map<std::string, std::pair<double, double>> joint;
  for (const auto& [t, c] : a.counts) joint[t].first = c;
  for (const auto& [t, c] : b.counts) joint[t].second = c;
  if (metric == SimilarityMetric::cosine) {
    double dot = 0, na = 0, nb = 0;
    for (const auto& [_, v] : joint) {
      dot += v.first * v.second;
      na += v.first * v.first;
      nb += v.second * v.second;
    }
    return dot / (std::sqrt(na) * std::sqrt(nb));
  }
  const double eps = 1e-9;
  double pa = 0, pb = 0;
  for (const auto& [_, v] : joint) {
    pa += v.first + eps;
    pb += v.second + eps;
  }
  double kl = 0;
  for (const auto& [_, v] : joint) {
    double p = (v.first + eps) / pa;
    double q = (v.second + eps) / pb;
    kl += p * std::log(p / q);
  }
  return kl < 0 ? 0 : kl;  // numeric guard
}

}  // namespace oasgen::dom
