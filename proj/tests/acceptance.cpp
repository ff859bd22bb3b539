// SPDX-License-Identifier: Apache-2.0
// Release gate. Each criterion runs as one scenario and prints a single
// pass/fail line; the exit status is the number of failures. Everything
// here runs offline against the bundled sample corpus and seed library.
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "oasgen/enrich.hpp"
#include "oasgen/evaluate.hpp"
#include "oasgen/icl.hpp"
#include "oasgen/pipeline.hpp"
#include "oasgen/schema.hpp"
#include "oasgen/scope.hpp"
#include "oasgen/validate.hpp"
#include "support/icl_oracle.hpp"
#include "support/random_dom.hpp"
#include "support/random_json.hpp"
#include "support/schema_oracle.hpp"
#include "support/scope_oracle.hpp"

using namespace oasgen;
using ordered_json = nlohmann::ordered_json;
namespace fs = std::filesystem;

namespace {

struct Check {
  bool ok = true;
  std::string detail;

  void expect(bool cond, const std::string& what) {
    if (!cond && ok) {
      ok = false;
      detail = what;
    }
  }
};

fs::path repo_root() { return fs::path(OASGEN_REPO_DIR); }

std::vector<fs::path> corpus_pages() {
  std::vector<fs::path> out;
  for (const auto& e : fs::directory_iterator(repo_root() / "samples" / "pages"))
    if (e.path().extension() == ".html") out.push_back(e.path());
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<extract::EndpointExamplePair> pairs_of(const dom::DomTree& tree) {
  auto reqs = extract::find_request_examples(tree);
  auto resps = extract::find_response_examples(tree, reqs);
  return extract::pair_examples(tree, reqs, resps);
}

bool near(double a, double b) { return std::fabs(a - b) <= 1e-9; }

// ---- criterion 1: the bundled corpus converts to clean documents ----

void pipeline_soundness(Check& c, std::string& note) {
  auto pages = corpus_pages();
  c.expect(pages.size() >= 10, "corpus holds fewer than 10 pages");
  auto t0 = std::chrono::steady_clock::now();
  std::size_t endpoints = 0;
  bool saw_multi = false, saw_single = false;
  pipeline::RunConfig cfg;
  cfg.seed = 11;
  for (const auto& page : pages) {
    auto run = pipeline::run_pipeline(page.string(), cfg);
    endpoints += run.endpoints.size();
    for (const auto& ep : run.endpoints) {
      c.expect(ep.complete && !ep.error,
               page.filename().string() + ": endpoint did not complete");
      c.expect(ep.validation.is_valid_json,
               page.filename().string() + ": emitted document is not JSON");
      c.expect(ep.validation.is_valid_oas,
               page.filename().string() + ": emitted document fails the meta-schema");
      c.expect(ep.validation.warning_count() == 0,
               page.filename().string() + ": emitted document carries warnings");
      if (ep.scope_origin == "multi-request") saw_multi = true;
      if (ep.scope_origin == "single-request") saw_single = true;
    }
  }
  double secs = std::chrono::duration<double>(
                    std::chrono::steady_clock::now() - t0).count();
  c.expect(endpoints >= 20, "corpus yields fewer than 20 endpoints");
  c.expect(saw_multi && saw_single,
           "corpus must exercise both multi- and single-endpoint pages");
  c.expect(secs < 60.0, "corpus run exceeded 60 seconds");
  std::ostringstream n;
  n << pages.size() << " pages, " << endpoints << " endpoints, "
    << std::fixed << std::setprecision(1) << secs << "s, offline provider";
  note = n.str();
}

// ---- criteria 2 and 3 share one batch of random documents ----

// pins property and required-name ordering, which a sorted-key comparison
// cannot see
std::string ordering_trace(const ordered_json& j) {
  std::string out;
  if (!j.is_object()) return out;
  if (j.contains("properties")) {
    out += "(";
    for (auto it = j["properties"].begin(); it != j["properties"].end(); ++it) {
      out += it.key();
      out += ":";
      out += ordering_trace(it.value());
      out += ",";
    }
    out += ")";
  }
  if (j.contains("required")) {
    out += "req{";
    for (const auto& r : j["required"]) {
      out += r.get<std::string>();
      out += ",";
    }
    out += "}";
  }
  if (j.contains("items")) {
    out += "[";
    out += ordering_trace(j["items"]);
    out += "]";
  }
  return out;
}

nlohmann::json semantic(const ordered_json& j) {
  return nlohmann::json::parse(j.dump());
}

std::vector<ordered_json> random_documents() {
  std::mt19937_64 rng(424242);
  std::vector<ordered_json> docs;
  docs.reserve(200);
  for (int i = 0; i < 200; ++i)
    docs.push_back(testgen::random_json_document(rng));
  return docs;
}

void inference_oracle_equivalence(Check& c, const std::vector<ordered_json>& docs) {
  for (std::size_t i = 0; i < docs.size(); ++i) {
    ordered_json got = schema::infer_value_schema(docs[i]).to_json();
    ordered_json want = oracles::oracle_infer(docs[i]);
    c.expect(semantic(got) == semantic(want),
             "inference diverges from the oracle on document " + std::to_string(i));
    c.expect(ordering_trace(got) == ordering_trace(want),
             "inference ordering diverges on document " + std::to_string(i));
  }
}

void segmentation_round_trip(Check& c, const std::vector<ordered_json>& docs) {
  const int thresholds[] = {1, 5, 40};
  for (std::size_t i = 0; i < docs.size(); ++i) {
    std::string text = docs[i].dump(2);
    schema::Segment whole_seg{0, text, ""};
    schema::JsonSchemaNode whole = schema::infer_segment_schema(whole_seg);
    for (int t : thresholds) {
      auto segs = schema::segment_example(text, t);
      std::vector<std::pair<std::string, schema::JsonSchemaNode>> parts;
      for (const auto& s : segs)
        parts.emplace_back(s.json_pointer_prefix, schema::infer_segment_schema(s));
      auto agg = schema::aggregate_segments(parts);
      c.expect(agg.root == whole && agg.warnings.empty(),
               "round trip failed on document " + std::to_string(i) +
                   " at threshold " + std::to_string(t));
    }
  }
}

// ---- criterion 4: scope selection against exhaustive oracles ----

void scope_correctness(Check& c, std::string& note) {
  std::mt19937_64 rng(20260816);
  for (int iter = 0; iter < 50; ++iter) {
    int n = 2 + static_cast<int>(rng() % 4);
    auto page = testgen::random_page(rng, n);
    auto tree = dom::parse_dom(page.html);
    auto pairs = pairs_of(tree);
    c.expect(pairs.size() == static_cast<std::size_t>(n),
             "planted page lost endpoints in extraction");
    if (pairs.size() != static_cast<std::size_t>(n)) return;
    for (std::size_t t = 0; t < pairs.size(); ++t) {
      std::vector<int> others;
      for (std::size_t o = 0; o < pairs.size(); ++o)
        if (o != t) others.push_back(pairs[o].request.node_id);
      auto got = scope::find_scope_multi(tree, pairs[t], pairs);
      auto want = oracles::oracle_scope_multi(tree, pairs[t].request.node_id, others);
      c.expect(got.node_ids == want,
               "multi-request scope diverges on page " + std::to_string(iter));
    }
  }

  std::mt19937_64 srng(31337);
  int top_picked = 0;
  for (int iter = 0; iter < 50; ++iter) {
    auto page = testgen::single_reference_page(srng);
    auto tree = dom::parse_dom(page.html);
    auto pairs = pairs_of(tree);
    c.expect(pairs.size() == 1, "single-endpoint page lost its request");
    if (pairs.size() != 1) return;
    auto cands = scope::find_candidates_single(tree, pairs[0]);
    c.expect(!cands.empty(), "planted parameter table produced no candidates");
    if (cands.empty()) return;

    // survivors after the strict-ancestor rule, then the lexicographic best
    auto is_strict_ancestor = [](const scope::ScopeCandidate& a,
                                 const scope::ScopeCandidate& b) {
      return a.anchor_node_id < b.anchor_node_id &&
             b.anchor_node_id < a.anchor_node_id + a.subtree_size;
    };
    std::pair<int, int> best{-1, -1};
    for (const auto& cand : cands) {
      bool ancestor = false;
      for (const auto& other : cands)
        if (is_strict_ancestor(cand, other)) ancestor = true;
      if (ancestor) continue;
      best = std::max(best, {cand.rank_param_hits, cand.rank_method_hit ? 1 : 0});
    }

    std::uint64_t seed = 7000 + static_cast<std::uint64_t>(iter);
    auto pick = scope::rank_and_select(cands, seed);
    auto again = scope::rank_and_select(cands, seed);
    c.expect(pick.node_ids == again.node_ids,
             "tie-break is not reproducible for one seed");
    const scope::ScopeCandidate* chosen = nullptr;
    for (const auto& cand : cands)
      if (!pick.node_ids.empty() && cand.anchor_node_id == pick.node_ids[0])
        chosen = &cand;
    c.expect(chosen != nullptr, "selected scope is not one of the candidates");
    if (chosen &&
        std::pair<int, int>{chosen->rank_param_hits,
                            chosen->rank_method_hit ? 1 : 0} == best)
      ++top_picked;
  }
  c.expect(top_picked == 50, "selection missed the oracle's top rank " +
                                 std::to_string(50 - top_picked) + " times");
  note = "50 multi-endpoint pages, top rank picked " +
         std::to_string(top_picked) + "/50";
}

// ---- criterion 5: few-shot selection over the bundled library ----

void icl_selection(Check& c) {
  auto lib = gateway::load_icl_library((repo_root() / "icl").string());
  c.expect(lib.examples().size() == 15,
           "seed library must hold exactly 15 examples");

  auto pool_of = [&](gateway::GenTask task) {
    std::vector<gateway::IclExample> pool;
    for (const auto* e : lib.for_task(task)) pool.push_back(*e);
    return pool;
  };

  std::mt19937_64 rng(555);
  for (int q = 0; q < 30; ++q) {
    auto frag = oracles::random_fragment_html(rng);
    auto hist = dom::tag_frequency(dom::parse_dom(frag), 0);
    auto task = q % 2 ? gateway::GenTask::response_enrichment
                      : gateway::GenTask::request_enrichment;
    auto got = gateway::select_icl_examples(hist, lib, task, 3);
    auto want = oracles::oracle_top_k(hist, pool_of(task),
                                      dom::SimilarityMetric::cosine, 3);
    std::vector<std::string> got_ids;
    for (const auto& e : got) got_ids.push_back(e.example_id);
    c.expect(got_ids == want,
             "selection diverges from the exhaustive ranking on query " +
                 std::to_string(q));
  }

  for (const auto& held : lib.examples()) {
    auto got = gateway::select_icl_examples(held.histogram, lib, held.task, 15,
                                            dom::SimilarityMetric::cosine,
                                            held.content_hash);
    for (const auto& e : got)
      c.expect(e.content_hash != held.content_hash,
               "leave-one-out returned the held-out example " + held.example_id);
  }
}

// ---- criterion 6: metric definitions and the closed loop ----

evaluate::ParamMatchSet counted_match(int tp, int fp, int fn) {
  evaluate::ParamMatchSet m;
  for (int i = 0; i < tp; ++i)
    m.matched.emplace_back(evaluate::ParamRef{"m" + std::to_string(i)},
                           evaluate::ParamRef{"m" + std::to_string(i)});
  for (int i = 0; i < fp; ++i) m.pred_only.push_back({"p" + std::to_string(i)});
  for (int i = 0; i < fn; ++i) m.truth_only.push_back({"t" + std::to_string(i)});
  return m;
}

builder::OasDocument doc_with_params(const std::vector<builder::SkeletonParameter>& ps) {
  builder::OasSkeleton sk;
  sk.method = "get";
  sk.path = "/v1/things";
  sk.parameters = ps;
  return builder::build_base_oas(sk, std::nullopt, std::nullopt);
}

void metrics_harness(Check& c) {
  // twelve match-count grids against the closed-form definitions
  const int grid[][3] = {{3, 1, 2}, {0, 0, 0}, {5, 0, 0}, {0, 4, 0},
                         {0, 0, 7}, {2, 2, 2}, {1, 0, 3}, {4, 3, 0},
                         {1, 1, 1}, {6, 2, 5}, {0, 1, 1}, {2, 5, 3}};
  for (const auto& g : grid) {
    auto m = counted_match(g[0], g[1], g[2]);
    auto got = evaluate::prf1(m);
    double tp = g[0], fp = g[1], fn = g[2];
    double p = tp + fp > 0 ? tp / (tp + fp) : 0.0;
    double r = tp + fn > 0 ? tp / (tp + fn) : 0.0;
    double f = p + r > 0 ? 2 * p * r / (p + r) : 0.0;
    c.expect(near(got.precision, p) && near(got.recall, r) && near(got.f1, f),
             "counts " + std::to_string(g[0]) + "/" + std::to_string(g[1]) +
                 "/" + std::to_string(g[2]) + " disagree with the definitions");
  }

  // four field-precision cases, one per agreement shape
  using evaluate::ParamField;
  auto pair_of = [](evaluate::ParamRef a, evaluate::ParamRef b) {
    return std::make_pair(std::move(a), std::move(b));
  };
  evaluate::ParamMatchSet fm;
  fm.matched.push_back(pair_of({"a", "integer", true, "query", {}},
                               {"a", "integer", true, "query", {}}));
  fm.matched.push_back(pair_of({"b", "string", false, "query", {}},
                               {"b", "integer", true, "path", {}}));
  fm.matched.push_back(pair_of({"c", "int", {}, "query", {}},
                               {"c", "integer", false, "query", {}}));
  c.expect(near(evaluate::field_precision(fm, ParamField::type), 2.0 / 3.0),
           "type synonyms must count as agreement");
  c.expect(near(evaluate::field_precision(fm, ParamField::location), 2.0 / 3.0),
           "location precision over three pairs");
  // unstated prediction flags normalize to optional, so pair c agrees
  c.expect(near(evaluate::field_precision(fm, ParamField::required), 2.0 / 3.0),
           "absent predicted required must compare as false");
  evaluate::ParamMatchSet no_truth;
  no_truth.matched.push_back(pair_of({"a", {}, true, {}, {}}, {"a", {}, {}, {}, {}}));
  bool raised = false;
  try {
    evaluate::field_precision(no_truth, ParamField::required);
  } catch (const Error& e) {
    raised = e.code() == errc::no_eligible_pairs;
  }
  c.expect(raised, "truth without the field must leave no eligible pairs");

  // four similarity cases with hand-derived values
  c.expect(near(evaluate::description_similarity("alpha beta", "beta  alpha"), 1.0),
           "orderless identical token bags must score 1");
  c.expect(near(evaluate::description_similarity("a b", "a c"), 0.5),
           "half-overlapping bags must score one half");
  c.expect(near(evaluate::description_similarity("", ""), 1.0),
           "two empty descriptions must score 1");
  c.expect(near(evaluate::description_similarity("words", ""), 0.0),
           "one empty description must score 0");

  // swapping prediction and truth flips precision and recall exactly
  auto a = doc_with_params({{"a", "query", "string"},
                            {"b", "query", "string"},
                            {"c", "query", "string"}});
  auto b = doc_with_params({{"b", "query", "string"}});
  evaluate::EvalCase fwd{a, b, "/v1/things", "get"};
  evaluate::EvalCase rev{b, a, "/v1/things", "get"};
  auto pf = evaluate::prf1(evaluate::match_params(fwd, evaluate::Side::request));
  auto pr = evaluate::prf1(evaluate::match_params(rev, evaluate::Side::request));
  c.expect(pf.precision == pr.recall && pf.recall == pr.precision &&
               pf.f1 == pr.f1,
           "prediction/truth swap must flip precision and recall exactly");

  // closed loop: the corpus evaluated against itself scores 1.0 everywhere
  pipeline::RunConfig cfg;
  cfg.seed = 11;
  std::vector<evaluate::EvalCase> cases;
  for (const auto& page : corpus_pages()) {
    auto run = pipeline::run_pipeline(page.string(), cfg);
    for (const auto& ep : run.endpoints)
      cases.push_back({ep.doc, ep.doc, ep.path, ep.method});
  }
  auto rep = evaluate::e2e_report(cases);
  auto all_ones = [&](const evaluate::SideMetrics& s, bool with_location,
                      const char* side) {
    c.expect(near(s.precision, 1.0) && near(s.recall, 1.0) && near(s.f1, 1.0),
             std::string(side) + " match metrics must all be 1.0");
    c.expect(s.required_precision && near(*s.required_precision, 1.0),
             std::string(side) + " required precision must be 1.0");
    c.expect(s.type_precision && near(*s.type_precision, 1.0),
             std::string(side) + " type precision must be 1.0");
    if (with_location)
      c.expect(s.location_precision && near(*s.location_precision, 1.0),
               std::string(side) + " location precision must be 1.0");
    c.expect(s.desc_similarity && near(*s.desc_similarity, 1.0),
             std::string(side) + " description similarity must be 1.0");
  };
  all_ones(rep.request, true, "request");
  all_ones(rep.response, false, "response");
}

// ---- criterion 7: merge precedence and idempotence ----

void merge_precedence(Check& c) {
  std::mt19937_64 rng(314159);
  const char* types[] = {"string", "integer", "number", "boolean"};
  const char* locs[] = {"query", "path", "header"};
  for (int iter = 0; iter < 100; ++iter) {
    int n_params = 1 + static_cast<int>(rng() % 4);
    std::vector<builder::SkeletonParameter> params;
    for (int i = 0; i < n_params; ++i) {
      std::string loc = locs[rng() % 3];
      params.push_back({"p" + std::to_string(i), loc, types[rng() % 4]});
    }
    builder::OasSkeleton sk;
    sk.method = rng() % 2 ? "get" : "post";
    sk.path = "/v1/things";
    sk.parameters = params;

    ordered_json resp = ordered_json::parse(R"({"type": "object"})");
    resp["properties"] = ordered_json::object();
    ordered_json resp_req = ordered_json::array();
    int n_props = 1 + static_cast<int>(rng() % 3);
    for (int i = 0; i < n_props; ++i) {
      std::string name = "r" + std::to_string(i);
      resp["properties"][name] = ordered_json{{"type", types[rng() % 4]}};
      if (rng() % 2) resp_req.push_back(name);
    }
    if (!resp_req.empty()) resp["required"] = resp_req;
    auto base = builder::build_base_oas(
        sk, std::nullopt, schema::JsonSchemaNode::from_json(resp));

    enrich::EnrichmentTable table;
    std::map<std::string, enrich::ParameterRow> claims;
    for (int i = 0; i < n_params; ++i) {
      if (rng() % 4 == 0) continue;  // leave some parameters untouched
      enrich::ParameterRow row;
      row.name = "p" + std::to_string(i);
      row.type = types[rng() % 4];
      row.required = rng() % 3 ? std::optional<bool>(rng() % 2 == 0) : std::nullopt;
      row.location = locs[rng() % 3];
      row.description = rng() % 3 ? "claim " + std::to_string(iter) : "";
      table.rows.push_back(row);
      claims[row.name] = row;
    }
    enrich::ParameterRow extra{"extra" + std::to_string(iter), "string", true,
                               rng() % 2 ? "query" : "header", "added row"};
    table.rows.push_back(extra);
    claims[extra.name] = extra;

    ordered_json enr = ordered_json::parse(R"({"type": "object"})");
    enr["properties"] = ordered_json::object();
    enr["properties"]["r0"] =
        ordered_json{{"type", types[rng() % 4]},
                     {"description", "resp claim " + std::to_string(iter)}};
    enr["properties"]["resp_extra"] = ordered_json{{"type", "string"}};
    enr["required"] = ordered_json::array({"r0"});
    enrich::ResponseEnrichmentSchema resp_enr;
    resp_enr.root = schema::JsonSchemaNode::from_json(enr);

    auto merged = enrich::merge_enrichment(base, table, resp_enr);
    const auto& op = merged.spec["paths"]["/v1/things"][sk.method];
    const auto& base_op = base.spec["paths"]["/v1/things"][sk.method];

    std::set<std::string> base_names;
    for (const auto& bp : base_op["parameters"])
      base_names.insert(bp["name"].get<std::string>());
    for (const auto& bp : base_op["parameters"]) {
      std::string name = bp["name"];
      const ordered_json* mp = nullptr;
      for (const auto& candidate : op["parameters"])
        if (candidate["name"] == name) mp = &candidate;
      c.expect(mp != nullptr, "merge dropped base parameter " + name);
      if (!mp) continue;
      c.expect((*mp)["schema"]["type"] == bp["schema"]["type"],
               "merge changed the base type of " + name);
      c.expect((*mp)["in"] == bp["in"], "merge changed the base location of " + name);
      auto it = claims.find(name);
      if (it != claims.end()) {
        if (!it->second.description.empty())
          c.expect((*mp)["description"] == it->second.description,
                   "merge ignored the claimed description of " + name);
        if (it->second.required.has_value()) {
          // path parameters stay mandatory no matter what the table claims,
          // since optional path parameters are not representable
          bool expected = bp["in"] == "path" ? true : *it->second.required;
          c.expect((*mp)["required"] == expected,
                   "merge mishandled the required flag of " + name);
        }
      }
    }
    for (const auto& [name, row] : claims) {
      if (base_names.count(name)) continue;
      const ordered_json* mp = nullptr;
      for (const auto& candidate : op["parameters"])
        if (candidate["name"] == name) mp = &candidate;
      c.expect(mp && (*mp)["in"] == row.location &&
                   (*mp)["schema"]["type"] == row.type,
               "enrichment-only parameter " + name + " must arrive unchanged");
    }
    const auto& ms =
        op["responses"]["200"]["content"]["application/json"]["schema"];
    const auto& bs =
        base_op["responses"]["200"]["content"]["application/json"]["schema"];
    c.expect(ms["properties"]["r0"]["type"] == bs["properties"]["r0"]["type"],
             "merge changed the base type of response property r0");
    c.expect(ms["properties"]["r0"]["description"] ==
                 "resp claim " + std::to_string(iter),
             "merge ignored the response description claim");
    c.expect(ms["properties"].contains("resp_extra"),
             "enrichment-only response property must be added");
    c.expect(ms["required"] == ordered_json::array({"r0"}),
             "supplied response required list must replace the base list");

    auto twice = enrich::merge_enrichment(merged, table, resp_enr);
    c.expect(twice.spec == merged.spec, "merge must be idempotent");
  }
}

// ---- criterion 8: hallucination filter removes exactly the planted names ----

void hallucination_filter(Check& c) {
  scope::ProcessedScope ps;
  ps.cleaned_html =
      "<section><table><tr><td>limit</td><td>cursor</td><td>page</td>"
      "</tr></table><p>The user object carries an id and a status.</p></section>";
  ps.visible_text = "limit cursor page The user object carries an id and a status.";

  const std::vector<std::string> in_scope = {"limit", "cursor", "page"};
  const std::vector<std::string> planted = {"wibble", "flux_capacity", "zork"};
  enrich::EnrichmentTable table;
  for (const auto& n : in_scope) table.rows.push_back({n, "string", true, "query", ""});
  for (const auto& n : planted) table.rows.push_back({n, "string", true, "query", ""});

  std::vector<std::string> audit;
  auto kept = enrich::filter_hallucinations(table, ps, &audit);
  std::set<std::string> kept_names;
  for (const auto& r : kept.rows) kept_names.insert(r.name);
  for (const auto& n : in_scope)
    c.expect(kept_names.count(n) == 1, "in-scope row " + n + " was removed");
  for (const auto& n : planted)
    c.expect(kept_names.count(n) == 0, "planted row " + n + " survived");
  c.expect(audit.size() == planted.size(), "audit must list every removed name");

  enrich::ResponseEnrichmentSchema schema_in;
  schema_in.root = schema::JsonSchemaNode::from_json(ordered_json::parse(R"({
    "type": "object",
    "properties": {
      "user": {
        "type": "object",
        "properties": {
          "id": {"type": "integer"},
          "phantom_field": {"type": "string"}
        }
      },
      "status": {"type": "string"},
      "zork": {"type": "string"}
    }
  })"));
  std::vector<std::string> saudit;
  auto fs_out = enrich::filter_hallucinations(schema_in, ps, &saudit);
  ordered_json filtered = fs_out.root.to_json();
  c.expect(filtered["properties"].contains("user") &&
               filtered["properties"]["user"]["properties"].contains("id"),
           "nested in-scope property user.id was removed");
  c.expect(filtered["properties"].contains("status"),
           "in-scope property status was removed");
  c.expect(!filtered["properties"]["user"]["properties"].contains("phantom_field"),
           "planted nested property survived");
  c.expect(!filtered["properties"].contains("zork"),
           "planted top-level property survived");
  c.expect(saudit.size() == 2, "schema audit must list both removed names");
}

// ---- criterion 9: byte-identical reruns ----

std::map<std::string, std::string> snapshot_tree(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (!e.is_regular_file()) continue;
    std::ifstream in(e.path(), std::ios::binary);
    std::ostringstream body;
    body << in.rdbuf();
    out[fs::relative(e.path(), root).string()] = body.str();
  }
  return out;
}

void determinism(Check& c, std::string& note) {
  pipeline::RunConfig cfg;
  cfg.seed = 11;
  cfg.icl.path = (repo_root() / "icl").string();
  fs::path base = fs::temp_directory_path() / "oasgen-acceptance";
  fs::remove_all(base);
  std::ostringstream sink;
  for (const auto& run_dir : {"run1", "run2"}) {
    for (const auto& page : corpus_pages()) {
      fs::path out = base / run_dir / page.stem();
      fs::create_directories(out);
      int rc = pipeline::cmd_generate(page.string(), out.string(), cfg, sink, sink);
      c.expect(rc == 0, std::string(run_dir) + " exited nonzero on " +
                            page.filename().string());
    }
  }
  auto one = snapshot_tree(base / "run1");
  auto two = snapshot_tree(base / "run2");
  c.expect(one.size() == two.size(), "reruns produced different file sets");
  std::size_t files = 0;
  for (const auto& [rel, body] : one) {
    auto it = two.find(rel);
    c.expect(it != two.end(), "second run is missing " + rel);
    if (it != two.end())
      c.expect(it->second == body, rel + " differs between reruns");
    ++files;
  }
  fs::remove_all(base);
  note = std::to_string(files) + " files compared byte for byte";
}

}  // namespace

int main() {
  struct Row {
    int number;
    std::string label;
    Check check;
    std::string note;
  };
  std::vector<Row> rows;
  auto docs = random_documents();

  auto run = [&](int number, const std::string& label, auto&& fn) {
    Row row{number, label, {}, {}};
    try {
      fn(row.check, row.note);
    } catch (const std::exception& e) {
      row.check.expect(false, std::string("unhandled error: ") + e.what());
    }
    rows.push_back(std::move(row));
  };

  run(1, "sample corpus converts to valid documents",
      [&](Check& c, std::string& n) { pipeline_soundness(c, n); });
  run(2, "schema inference matches the brute-force oracle",
      [&](Check& c, std::string&) { inference_oracle_equivalence(c, docs); });
  run(3, "segment-infer-aggregate equals unsplit inference",
      [&](Check& c, std::string&) { segmentation_round_trip(c, docs); });
  run(4, "scope selection matches the exhaustive oracles",
      [&](Check& c, std::string& n) { scope_correctness(c, n); });
  run(5, "few-shot selection matches the all-pairs ranking",
      [&](Check& c, std::string&) { icl_selection(c); });
  run(6, "metrics match hand-computed values and close the loop",
      [&](Check& c, std::string&) { metrics_harness(c); });
  run(7, "merge keeps base type and location and is idempotent",
      [&](Check& c, std::string&) { merge_precedence(c); });
  run(8, "hallucination filter removes exactly the planted names",
      [&](Check& c, std::string&) { hallucination_filter(c); });
  run(9, "reruns with one seed are byte-identical",
      [&](Check& c, std::string& n) { determinism(c, n); });

  int failures = 0;
  for (const auto& row : rows) {
    std::string status = row.check.ok ? "PASS" : "FAIL";
    std::string tail;
    if (!row.check.ok)
      tail = " (" + row.check.detail + ")";
    else if (!row.note.empty())
      tail = " (" + row.note + ")";
    std::cout << "criterion " << row.number << ": " << status << "  "
              << row.label << tail << "\n";
    if (!row.check.ok) ++failures;
  }
  return failures;
}
