// SPDX-License-Identifier: Apache-2.0
#ifndef OASGEN_PIPELINE_HPP
#define OASGEN_PIPELINE_HPP

#include <atomic>
#include <cctype>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "oasgen/dom.hpp"
#include "oasgen/enrich.hpp"
#include "oasgen/errors.hpp"
#include "oasgen/evaluate.hpp"
#include "oasgen/extract.hpp"
#include "oasgen/icl.hpp"
#include "oasgen/oas.hpp"
#include "oasgen/prompt.hpp"
#include "oasgen/provider.hpp"
#include "oasgen/schema.hpp"
#include "oasgen/scope.hpp"
#include "oasgen/skeleton.hpp"
#include "oasgen/snapshot.hpp"
#include "oasgen/text.hpp"
#include "oasgen/validate.hpp"
#include "oasgen/yaml_io.hpp"

namespace oasgen::pipeline {

using ordered_json = nlohmann::ordered_json;

struct IclSettings {
  std::string path;  // empty: prompts carry no worked examples
  int k = 3;
  std::string metric = "cosine";
};

struct RunConfig {
  gateway::ProviderConfig provider;
  IclSettings icl;
  int line_threshold = 40;
  int scope_budget = 4000;
  long long seed = 1;
  bool enrichment_enabled = true;
  std::string output_format = "json";
  int jobs = 1;

  void validate() const {
    provider.validate();
    if (line_threshold <= 0 || scope_budget <= 0 || seed <= 0 ||
        icl.k <= 0 || jobs <= 0)
      throw Error(errc::invalid_threshold,
                  "run config numeric fields must be positive");
    if (output_format != "json" && output_format != "yaml")
      throw Error(errc::provider_error,
                  "output_format must be json or yaml");
    dom::metric_from_name(icl.metric);  // rejects unknown metric names
  }
};

struct StageError {
  std::string stage;
  std::string message;
};

struct EndpointResult {
  std::string method;
  std::string path;
  std::string file_name;  // assigned after deduplication
  builder::OasDocument doc;
  bool complete = false;  // incomplete results are written as .partial
  std::string scope_origin = "none";
  std::size_t hallucinations_filtered = 0;
  std::vector<std::string> warnings;
  std::optional<StageError> error;
  validate::ValidationReport validation;
};

struct RunReport {
  std::string source;
  std::size_t endpoints_found = 0;
  std::size_t pairs_formed = 0;
  std::map<std::string, int> scope_origins;
  std::size_t hallucinations_filtered = 0;
  std::vector<std::string> warnings;
  std::optional<validate::SyntaxSummary> validation;
  ordered_json endpoints = ordered_json::array();
};

struct RunOutput {
  RunReport report;
  std::vector<EndpointResult> endpoints;
};

namespace detail {

inline std::string sanitize_path(const std::string& path) {
  std::string out;
  for (char c : path) {
    if (std::isalnum(static_cast<unsigned char>(c)))
      out.push_back(text::ascii_lower(c));
    else if (!out.empty() && out.back() != '_')
      out.push_back('_');
  }
  while (!out.empty() && out.back() == '_') out.pop_back();
  return out.empty() ? "root" : out;
}

inline dom::TagHistogram merged_histogram(const dom::DomTree& tree,
                                          const std::vector<int>& ids) {
  dom::TagHistogram h;
  for (int id : ids) {
    auto part = dom::tag_frequency(tree, id);
    for (const auto& [tag, n] : part.counts) h.counts[tag] += n;
  }
  return h;
}

inline std::vector<gateway::IclExample> pick_examples(
    const gateway::IclLibrary* library, const dom::TagHistogram& query,
    gateway::GenTask task, const IclSettings& settings,
    std::vector<std::string>& warnings) {
  if (library == nullptr || library->for_task(task).empty()) return {};
  std::vector<std::string> notes;
  auto picked = gateway::select_icl_examples(query, *library, task, settings.k,
                                         dom::metric_from_name(settings.metric),
                                         std::nullopt, &notes);
  for (auto& n : notes) warnings.push_back("gateway: " + n);
  return picked;
}

inline std::string run_generation(const RunConfig& cfg, gateway::GenTask task,
                                  const std::vector<gateway::IclExample>& examples,
                                  const std::string& payload) {
  gateway::GenerationJob job;
  job.task = task;
  job.prompt = gateway::build_prompt(task, examples, payload);
  job.input_payload = payload;
  return gateway::generate(cfg.provider, job, gateway::task_validator(task));
}

}  // namespace detail

inline EndpointResult process_endpoint(
    const dom::DomTree& tree, const std::string& doc_text,
    const extract::EndpointExamplePair& pair,
    const std::vector<extract::EndpointExamplePair>& all_pairs,
    const RunConfig& cfg, const gateway::IclLibrary* library) {
  EndpointResult res;
  std::string stage = "builder";
  try {
    auto sk = builder::generate_skeleton(pair, doc_text);
    res.method = sk.method;
    res.path = sk.path;

    std::optional<schema::JsonSchemaNode> req_schema;
    const auto& parsed = pair.request.parsed;
    if (parsed.body && parsed.body_is_json)
      req_schema =
          schema::infer_value_schema(ordered_json::parse(*parsed.body));

    std::optional<schema::JsonSchemaNode> resp_schema;
    int status = 200;
    if (pair.response && pair.response->is_json) {
      status = pair.response->status_code.value_or(200);
      // long examples are split, inferred per segment, and re-aggregated
      auto segments =
          schema::segment_example(pair.response->raw_text, cfg.line_threshold);
      std::vector<std::pair<std::string, schema::JsonSchemaNode>> parts;
      parts.reserve(segments.size());
      for (const auto& seg : segments)
        parts.emplace_back(seg.json_pointer_prefix,
                           schema::infer_segment_schema(seg));
      auto agg = schema::aggregate_segments(parts);
      resp_schema = agg.root;
      for (auto& w : agg.warnings) res.warnings.push_back("schema: " + w);
    }

    auto doc = builder::build_base_oas(sk, req_schema, resp_schema, status);

    if (cfg.enrichment_enabled) {
      stage = "scope";
      std::optional<scope::EnrichmentScope> sc;
      try {
        if (all_pairs.size() > 1) {
          sc = scope::find_scope_multi(tree, pair, all_pairs);
        } else {
          auto candidates = scope::find_candidates_single(tree, pair);
          sc = scope::rank_and_select(candidates,
                                      static_cast<std::uint64_t>(cfg.seed));
        }
      } catch (const Error& e) {
        res.warnings.push_back("scope: enrichment skipped: " +
                               std::string(e.what()));
      }
      if (sc) {
        res.scope_origin = scope::scope_origin_name(sc->origin);
        auto processed =
            scope::preprocess_scope(tree, *sc, pair, cfg.scope_budget);
        auto query = detail::merged_histogram(tree, sc->node_ids);

        std::vector<std::string> audit;
        std::optional<enrich::EnrichmentTable> table;
        stage = "gateway";
        try {
          auto examples = detail::pick_examples(
              library, query, gateway::GenTask::request_enrichment, cfg.icl,
              res.warnings);
          auto out = detail::run_generation(
              cfg, gateway::GenTask::request_enrichment, examples,
              processed.cleaned_html);
          table = enrich::filter_hallucinations(enrich::parse_request_tsv(out),
                                                processed, &audit);
        } catch (const Error& e) {
          // the base document still ships when generation is unavailable
          res.warnings.push_back("gateway: request enrichment skipped: " +
                                 std::string(e.what()));
        }
        std::optional<enrich::ResponseEnrichmentSchema> rschema;
        try {
          auto examples = detail::pick_examples(
              library, query, gateway::GenTask::response_enrichment, cfg.icl,
              res.warnings);
          auto out = detail::run_generation(
              cfg, gateway::GenTask::response_enrichment, examples,
              processed.cleaned_html);
          rschema = enrich::filter_hallucinations(
              enrich::parse_response_schema(out), processed, &audit);
        } catch (const Error& e) {
          res.warnings.push_back("gateway: response enrichment skipped: " +
                                 std::string(e.what()));
        }
        res.hallucinations_filtered = audit.size();
        if (table || rschema) {
          stage = "enrich";
          doc = enrich::merge_enrichment(doc, table, rschema);
        }
      }
    }

    stage = "validate";
    res.validation = validate::check_document(doc.spec.dump(2));
    for (const auto& w : doc.warnings) res.warnings.push_back(w);
    res.doc = std::move(doc);
    res.complete = true;
  } catch (const Error& e) {
    res.error = StageError{stage, e.what()};
  } catch (const std::exception& e) {
    res.error = StageError{stage, e.what()};
  }
  return res;
}

inline RunOutput run_pipeline(const std::string& source, const RunConfig& cfg) {
  cfg.validate();
  RunOutput out;
  out.report.source = source;

  ingest::DocumentSnapshot snap;
  try {
    snap = ingest::load_snapshot(source, cfg.provider.request_timeout_s);
  } catch (const Error& e) {
    throw Error(e.code(), std::string("ingest: ") + e.what());
  }
  dom::DomTree tree;
  try {
    tree = dom::parse_dom(snap.raw_html);
  } catch (const Error& e) {
    throw Error(e.code(), std::string("ingest: ") + e.what());
  }

  std::vector<extract::EndpointExamplePair> pairs;
  try {
    auto requests = extract::find_request_examples(tree);
    auto responses = extract::find_response_examples(tree);
    pairs = extract::pair_examples(tree, requests, responses);
  } catch (const Error& e) {
    throw Error(e.code(), std::string("extract: ") + e.what());
  }
  out.report.pairs_formed = pairs.size();

  std::optional<gateway::IclLibrary> library;
  if (!cfg.icl.path.empty()) {
    try {
      library = gateway::load_icl_library(cfg.icl.path);
    } catch (const Error& e) {
      out.report.warnings.push_back(
          std::string("gateway: example library unavailable: ") + e.what());
    }
  }
  const gateway::IclLibrary* lib_ptr = library ? &*library : nullptr;
  const std::string doc_text = tree.size() > 0 ? tree.visible_text(0) : "";

  std::vector<EndpointResult> results(pairs.size());
  unsigned n_threads = static_cast<unsigned>(
      std::min<std::size_t>(static_cast<std::size_t>(cfg.jobs), pairs.size()));
  if (n_threads <= 1) {
    for (std::size_t i = 0; i < pairs.size(); ++i)
      results[i] =
          process_endpoint(tree, doc_text, pairs[i], pairs, cfg, lib_ptr);
  } else {
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
      for (;;) {
        std::size_t i = next.fetch_add(1);
        if (i >= pairs.size()) return;
        results[i] =
            process_endpoint(tree, doc_text, pairs[i], pairs, cfg, lib_ptr);
      }
    };
    std::vector<std::thread> threads;
    threads.reserve(n_threads);
    for (unsigned t = 0; t < n_threads; ++t) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
  }

  const std::string ext =
      cfg.output_format == "yaml" ? ".oas.yaml" : ".oas.json";
  std::set<std::pair<std::string, std::string>> seen;
  std::set<std::string> names;
  std::vector<validate::ValidationReport> reports;
  std::size_t index = 0;
  for (auto& r : results) {
    ++index;
    if (r.complete) {
      auto key = std::make_pair(r.method, r.path);
      if (!seen.insert(key).second) {
        out.report.warnings.push_back("duplicate endpoint " + r.method + " " +
                                      r.path + " skipped");
        continue;
      }
    }
    std::string base = r.method.empty()
                           ? "endpoint_" + std::to_string(index)
                           : r.method + "_" + detail::sanitize_path(r.path);
    std::string name = base;
    for (int n = 2; !names.insert(name).second; ++n)
      name = base + "_" + std::to_string(n);
    r.file_name = name + ext;

    out.report.scope_origins[r.scope_origin] += 1;
    out.report.hallucinations_filtered += r.hallucinations_filtered;
    if (r.complete) reports.push_back(r.validation);

    ordered_json entry;
    entry["method"] = r.method;
    entry["path"] = r.path;
    entry["file"] = r.file_name + (r.complete ? "" : ".partial");
    entry["scope_origin"] = r.scope_origin;
    entry["hallucinations_filtered"] = r.hallucinations_filtered;
    entry["valid_oas"] = r.complete && r.validation.is_valid_oas;
    entry["warning_count"] =
        r.complete ? r.validation.warning_count() : std::size_t{0};
    entry["warnings"] = r.warnings;
    if (r.error) {
      entry["error"] =
          ordered_json{{"stage", r.error->stage}, {"message", r.error->message}};
    } else {
      entry["error"] = nullptr;
    }
    out.report.endpoints.push_back(std::move(entry));
    out.endpoints.push_back(std::move(r));
  }
  out.report.endpoints_found = out.endpoints.size();
  if (!reports.empty()) out.report.validation = validate::summarize(reports);
  return out;
}

inline ordered_json report_to_json(const RunReport& r) {
  ordered_json j;
  j["source"] = r.source;
  j["endpoints_found"] = r.endpoints_found;
  j["pairs_formed"] = r.pairs_formed;
  j["scope_origins"] = ordered_json::object();
  for (const auto& [origin, count] : r.scope_origins)
    j["scope_origins"][origin] = count;
  j["hallucinations_filtered"] = r.hallucinations_filtered;
  if (r.validation)
    j["validation"] = validate::summary_to_json(*r.validation);
  else
    j["validation"] = nullptr;
  j["warnings"] = r.warnings;
  j["endpoints"] = r.endpoints;
  return j;
}

inline std::string render_document(const builder::OasDocument& doc,
                                   const std::string& format) {
  if (format == "yaml") return yamlio::to_yaml(doc.spec);
  return doc.spec.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// command entry points

inline int cmd_generate(const std::string& source, const std::string& out_dir,
                        const RunConfig& cfg, std::ostream& out,
                        std::ostream& err) {
  RunOutput run;
  try {
    run = run_pipeline(source, cfg);
  } catch (const Error& e) {
    err << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "ingest: " << e.what() << "\n";
    return 2;
  }

  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) {
    err << "cannot create output directory " << out_dir << ": " << ec.message()
        << "\n";
    return 2;
  }

  bool any_error = false;
  bool all_valid = true;
  for (const auto& ep : run.endpoints) {
    fs::path target = fs::path(out_dir) / ep.file_name;
    if (!ep.complete) {
      any_error = true;
      target += ".partial";
    } else if (!ep.validation.is_valid_oas) {
      all_valid = false;
    }
    std::ofstream f(target, std::ios::binary);
    if (!f) {
      err << "cannot write " << target.string() << "\n";
      return 2;
    }
    f << render_document(ep.doc, cfg.output_format);
  }

  auto report_json = report_to_json(run.report);
  {
    std::ofstream f(fs::path(out_dir) / "run_report.json", std::ios::binary);
    if (!f) {
      err << "cannot write run_report.json\n";
      return 2;
    }
    f << report_json.dump(2) << "\n";
  }
  out << report_json.dump(2) << "\n";
  if (any_error) return 2;
  return all_valid ? 0 : 1;
}

inline int cmd_validate(const std::vector<std::string>& files,
                        std::ostream& out, std::ostream& err) {
  if (files.empty()) {
    err << "EmptyCorpus: no input files\n";
    return 2;
  }
  std::vector<validate::ValidationReport> reports;
  ordered_json per_file = ordered_json::array();
  for (const auto& file : files) {
    std::string body;
    try {
      body = ingest::detail::read_file(file);
    } catch (const Error& e) {
      err << e.what() << "\n";
      return 2;
    }
    validate::ValidationReport rep;
    if (yamlio::has_yaml_extension(file)) {
      try {
        rep = validate::check_document(yamlio::parse_yaml(body).dump(2));
      } catch (const Error&) {
        rep = {};  // undecodable input: neither valid JSON nor valid OAS
      }
    } else {
      rep = validate::check_document(body);
    }
    ordered_json entry = validate::report_to_json(rep);
    ordered_json row;
    row["file"] = file;
    for (auto it = entry.begin(); it != entry.end(); ++it)
      row[it.key()] = it.value();
    per_file.push_back(std::move(row));
    reports.push_back(std::move(rep));
  }
  auto summary = validate::summarize(reports);
  ordered_json j;
  j["files"] = per_file;
  j["summary"] = validate::summary_to_json(summary);
  out << j.dump(2) << "\n";
  return summary.valid_oas_ratio == 1.0 ? 0 : 1;
}

namespace detail {

inline std::string eval_stem(const std::filesystem::path& p) {
  std::string name = p.filename().string();
  for (const char* suffix : {".json", ".yaml", ".yml"}) {
    if (name.size() > std::strlen(suffix) &&
        name.compare(name.size() - std::strlen(suffix), std::string::npos,
                     suffix) == 0) {
      name.resize(name.size() - std::strlen(suffix));
      break;
    }
  }
  const char* oas = ".oas";
  if (name.size() > 4 && name.compare(name.size() - 4, 4, oas) == 0)
    name.resize(name.size() - 4);
  return name;
}

inline std::map<std::string, std::filesystem::path> docs_in(
    const std::string& dir) {
  namespace fs = std::filesystem;
  std::map<std::string, std::filesystem::path> out;
  if (!fs::is_directory(dir))
    throw Error(errc::source_unreachable, dir + " is not a directory");
  std::vector<fs::path> entries;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_regular_file()) entries.push_back(e.path());
  std::sort(entries.begin(), entries.end());
  for (const auto& p : entries) {
    std::string name = p.filename().string();
    if (name == "run_report.json") continue;
    bool structured = yamlio::has_yaml_extension(name) ||
                      (name.size() > 5 &&
                       name.compare(name.size() - 5, 5, ".json") == 0);
    if (!structured) continue;
    out.emplace(eval_stem(p), p);  // first file per stem wins
  }
  return out;
}

inline builder::OasDocument load_doc(const std::filesystem::path& p) {
  builder::OasDocument d;
  d.spec = yamlio::parse_structured(p.string(),
                                    ingest::detail::read_file(p.string()));
  return d;
}

inline std::vector<evaluate::EvalCase> pair_cases(
    const std::string& pred_dir, const std::string& truth_dir,
    std::vector<std::string>& warnings, std::size_t& missed) {
  auto preds = docs_in(pred_dir);
  auto truths = docs_in(truth_dir);
  std::vector<evaluate::EvalCase> cases;
  for (const auto& [stem, truth_path] : truths) {
    auto it = preds.find(stem);
    if (it == preds.end()) {
      warnings.push_back("no prediction found for " + stem);
      continue;
    }
    auto truth = load_doc(truth_path);
    auto pred = load_doc(it->second);
    if (!truth.spec.contains("paths") || !truth.spec["paths"].is_object())
      continue;
    for (auto pit = truth.spec["paths"].begin();
         pit != truth.spec["paths"].end(); ++pit) {
      if (!pit.value().is_object()) continue;
      for (auto mit = pit.value().begin(); mit != pit.value().end(); ++mit) {
        if (!enrich::detail::is_http_method(mit.key())) continue;
        if (evaluate::detail::find_operation(pred.spec, pit.key(),
                                             mit.key()) == nullptr) {
          ++missed;
          warnings.push_back("prediction " + stem + " lacks endpoint " +
                             mit.key() + " " + pit.key());
          continue;
        }
        cases.push_back(evaluate::EvalCase{pred, truth, pit.key(), mit.key()});
      }
    }
  }
  return cases;
}

}  // namespace detail

inline int cmd_evaluate(const std::string& pred_dir,
                        const std::string& truth_dir,
                        const std::string& base_dir,  // "" when absent
                        const std::string& out_path, std::ostream& out,
                        std::ostream& err) {
  std::vector<std::string> warnings;
  std::size_t missed = 0;
  std::vector<evaluate::EvalCase> cases;
  try {
    cases = detail::pair_cases(pred_dir, truth_dir, warnings, missed);
  } catch (const Error& e) {
    err << e.what() << "\n";
    return 2;
  }
  if (cases.empty()) {
    err << "EmptyCorpus: no evaluable endpoint cases\n";
    return 2;
  }

  ordered_json j;
  try {
    auto report = evaluate::e2e_report(cases);
    j["report"] = evaluate::report_to_json(report);
    std::optional<evaluate::MetricsReport> base_report;
    if (!base_dir.empty()) {
      std::vector<std::string> base_warnings;
      std::size_t base_missed = 0;
      auto base_cases =
          detail::pair_cases(base_dir, truth_dir, base_warnings, base_missed);
      if (!base_cases.empty())
        base_report = evaluate::e2e_report(base_cases);
      for (auto& w : base_warnings) warnings.push_back("baseline: " + w);
      j["comparison"] = evaluate::comparison_to_json(base_report, report);
    }
  } catch (const Error& e) {
    err << e.what() << "\n";
    return 2;
  }
  j["missed_endpoints"] = missed;
  j["warnings"] = warnings;

  if (!out_path.empty()) {
    std::ofstream f(out_path, std::ios::binary);
    if (!f) {
      err << "cannot write " << out_path << "\n";
      return 2;
    }
    f << j.dump(2) << "\n";
  }
  out << j.dump(2) << "\n";
  return 0;
}

}  // namespace oasgen::pipeline

#endif  // OASGEN_PIPELINE_HPP
