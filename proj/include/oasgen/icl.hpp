// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "oasgen/dom.hpp"
#include "oasgen/errors.hpp"
#include "oasgen/text.hpp"

namespace oasgen::gateway {

enum class GenTask { skeleton, schema, request_enrichment, response_enrichment };

inline const char* task_name(GenTask t) {
  switch (t) {
    case GenTask::skeleton: return "skeleton";
    case GenTask::schema: return "schema";
    case GenTask::request_enrichment: return "request-enrichment";
    case GenTask::response_enrichment: return "response-enrichment";
  }
  return "unknown";
}

inline GenTask task_from_name(std::string_view name) {
  if (text::iequals(name, "skeleton")) return GenTask::skeleton;
  if (text::iequals(name, "schema")) return GenTask::schema;
  if (text::iequals(name, "request-enrichment")) return GenTask::request_enrichment;
  if (text::iequals(name, "response-enrichment"))
    return GenTask::response_enrichment;
  throw Error(errc::malformed_example, "unknown task: " + std::string(name));
}

struct IclExample {
  std::string example_id;
  GenTask task = GenTask::request_enrichment;
  std::string input_html;
  std::string expected_output;
  dom::TagHistogram histogram;     // of input_html
  uint64_t content_hash = 0;       // of input_html, for leave-one-out
  std::string source;              // origin site, informational
};

inline IclExample make_example(std::string example_id, GenTask task,
                               std::string input_html,
                               std::string expected_output,
                               std::string source = "") {
  IclExample e;
  e.example_id = std::move(example_id);
  e.task = task;
  e.input_html = std::move(input_html);
  e.expected_output = std::move(expected_output);
  e.source = std::move(source);
  e.content_hash = text::fnv1a(e.input_html);
  dom::DomTree tree = dom::parse_dom(e.input_html);
  e.histogram = dom::tag_frequency(tree, 0);
  return e;
}

// Immutable after load; shareable across concurrent generation jobs.
class IclLibrary {
public:
  void add(IclExample e) {
    for (const auto& prev : examples_)
      if (prev.example_id == e.example_id)
        throw Error(errc::malformed_example,
                    "duplicate example id: " + e.example_id);
    by_task_[e.task].push_back(examples_.size());
    examples_.push_back(std::move(e));
  }

  const std::vector<IclExample>& examples() const { return examples_; }
  bool empty() const { return examples_.empty(); }

  std::vector<const IclExample*> for_task(GenTask t) const {
    std::vector<const IclExample*> out;
    auto it = by_task_.find(t);
    if (it == by_task_.end()) return out;
    for (size_t idx : it->second) out.push_back(&examples_[idx]);
    return out;
  }

private:
  std::vector<IclExample> examples_;
  std::map<GenTask, std::vector<size_t>> by_task_;
};

namespace detail {

inline std::string read_text_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error(errc::source_unreachable, "cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// `meta` is line-oriented `key: value`; unknown keys are ignored.
inline std::map<std::string, std::string> parse_meta(const std::string& body) {
  std::map<std::string, std::string> out;
  std::istringstream in(body);
  std::string line;
  while (std::getline(in, line)) {
    auto colon = line.find(':');
    if (colon == std::string::npos) continue;
    std::string key = text::trim(line.substr(0, colon));
    std::string val = text::trim(line.substr(colon + 1));
    if (!key.empty()) out[text::to_lower(key)] = val;
  }
  return out;
}

}  // namespace detail

// Loads a library from a directory of example directories, each holding
// `input.html`, `output.tsv` or `output.json`, and a `meta` file naming the
// task. Directory name becomes the example id. Directories are visited in
// name order so loads are reproducible.
inline IclLibrary load_icl_library(const std::filesystem::path& root) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(root))
    throw Error(errc::source_unreachable,
                "ICL library directory not found: " + root.string());
  std::vector<fs::path> dirs;
  for (const auto& entry : fs::directory_iterator(root))
    if (entry.is_directory()) dirs.push_back(entry.path());
  std::sort(dirs.begin(), dirs.end());

  IclLibrary lib;
  for (const auto& dir : dirs) {
    fs::path input = dir / "input.html";
    fs::path meta = dir / "meta";
    if (!fs::exists(input) || !fs::exists(meta))
      throw Error(errc::malformed_example,
                  "example " + dir.string() + " needs input.html and meta");
    fs::path output = dir / "output.tsv";
    if (!fs::exists(output)) output = dir / "output.json";
    if (!fs::exists(output))
      throw Error(errc::malformed_example,
                  "example " + dir.string() + " needs output.tsv or output.json");
    auto fields = detail::parse_meta(detail::read_text_file(meta));
    auto task_it = fields.find("task");
    if (task_it == fields.end())
      throw Error(errc::malformed_example,
                  "example " + dir.string() + " meta lacks a task line");
    std::string source;
    if (auto it = fields.find("source"); it != fields.end()) source = it->second;
    lib.add(make_example(dir.filename().string(), task_from_name(task_it->second),
                         detail::read_text_file(input),
                         detail::read_text_file(output), source));
  }
  return lib;
}

// Top-k task-matching examples ranked most-similar-first against the query
// histogram. Cosine ranks by descending similarity; KL divergence by
// ascending divergence. Ties keep library order. `exclude_hash` drops
// examples whose input matches the query byte-for-byte (leave-one-out).
inline std::vector<IclExample> select_icl_examples(
    const dom::TagHistogram& query, const IclLibrary& library, GenTask task,
    int k = 3, dom::SimilarityMetric metric = dom::SimilarityMetric::cosine,
    std::optional<uint64_t> exclude_hash = std::nullopt,
    std::vector<std::string>* warnings = nullptr) {
  if (k < 1) throw Error(errc::no_candidates, "k must be at least 1");
  auto pool = library.for_task(task);
  if (exclude_hash) {
    pool.erase(std::remove_if(pool.begin(), pool.end(),
                              [&](const IclExample* e) {
                                return e->content_hash == *exclude_hash;
                              }),
               pool.end());
  }
  if (pool.empty())
    throw Error(errc::empty_library,
                std::string("no in-context examples for task ") + task_name(task));

  std::vector<std::pair<double, const IclExample*>> scored;
  scored.reserve(pool.size());
  for (const IclExample* e : pool) {
    double s = dom::histogram_similarity(query, e->histogram, metric);
    // unify so that larger score always means more similar
    if (metric == dom::SimilarityMetric::kl_divergence) s = -s;
    scored.emplace_back(s, e);
  }
  std::stable_sort(scored.begin(), scored.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });

  if (static_cast<int>(scored.size()) < k && warnings)
    warnings->push_back("requested " + std::to_string(k) +
                        " in-context examples but only " +
                        std::to_string(scored.size()) + " exist for task " +
                        task_name(task));
  std::vector<IclExample> out;
  for (const auto& [_, e] : scored) {
    if (static_cast<int>(out.size()) == k) break;
    out.push_back(*e);
  }
  return out;
}

inline std::vector<IclExample> select_icl_examples(
    const dom::DomTree& tree, int fragment_id, const IclLibrary& library,
    GenTask task, int k = 3,
    dom::SimilarityMetric metric = dom::SimilarityMetric::cosine,
    std::optional<uint64_t> exclude_hash = std::nullopt,
    std::vector<std::string>* warnings = nullptr) {
  return select_icl_examples(dom::tag_frequency(tree, fragment_id), library,
                             task, k, metric, exclude_hash, warnings);
}

}  // namespace oasgen::gateway
