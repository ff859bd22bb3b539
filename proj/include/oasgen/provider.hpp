// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <atomic>
#include <cstdlib>
#include <functional>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "oasgen/enrich.hpp"
#include "oasgen/errors.hpp"
#include "oasgen/icl.hpp"
#include "oasgen/request.hpp"
#include "oasgen/schema.hpp"
#include "oasgen/skeleton.hpp"

namespace oasgen::gateway {

using ordered_json = nlohmann::ordered_json;

enum class ProviderKind { remote_http, reference_oracle };

inline const char* provider_kind_name(ProviderKind k) {
  return k == ProviderKind::remote_http ? "remote-http" : "reference-oracle";
}

inline ProviderKind provider_kind_from_name(std::string_view name) {
  if (text::iequals(name, "remote-http")) return ProviderKind::remote_http;
  if (text::iequals(name, "reference-oracle")) return ProviderKind::reference_oracle;
  throw Error(errc::provider_error, "unknown provider kind: " + std::string(name));
}

struct ProviderConfig {
  ProviderKind kind = ProviderKind::reference_oracle;
  std::optional<std::string> endpoint;
  std::optional<std::string> model_name;
  std::optional<std::string> auth_env_var;  // token comes from here, never a file
  int request_timeout_s = 30;
  int max_retries = 2;
  int parallelism = 4;

  void validate() const {
    if (kind == ProviderKind::remote_http && (!endpoint || !model_name))
      throw Error(errc::provider_error,
                  "remote-http provider needs endpoint and model_name");
    if (request_timeout_s <= 0 || max_retries <= 0 || parallelism <= 0)
      throw Error(errc::provider_error,
                  "timeout, max_retries, and parallelism must be positive");
  }
};

struct DecodingParams {
  int max_new_tokens = 2048;
  double temperature = 0.0;
  std::vector<std::string> stop_sequences;
};

struct GenerationJob {
  GenTask task = GenTask::request_enrichment;
  std::string prompt;
  // The raw pre-prompt payload. Remote providers see only the prompt; the
  // reference oracle computes from this directly instead of re-parsing the
  // rendered prompt.
  std::string input_payload;
  DecodingParams decoding;
};

namespace detail {

// --- table extraction for the oracle's enrichment tasks -------------------

inline std::string subtree_text(const dom::DomTree& tree, int id) {
  const auto& root = tree.node(id);
  std::string out;
  for (int i = id; i < id + root.subtree_size; ++i) {
    const auto& n = tree.node(i);
    if (!n.visible || n.text.empty()) continue;
    if (!out.empty()) out += " ";
    out += n.text;
  }
  return text::collapse_ws(out);
}

using Column = enrich::Column;
using enrich::detail::column_from_header;

// classification for headerless tables: first column is the name, the rest
// are recognized by value shape
inline Column column_from_value(const std::string& cell) {
  std::string c = text::to_lower(text::collapse_ws(cell));
  static const std::vector<std::string> types = {
      "string", "integer", "number",  "boolean", "int",
      "bool",   "float",   "double",  "array",   "object"};
  static const std::vector<std::string> reqs = {"yes",      "no",      "true",
                                                "false",    "required", "optional"};
  static const std::vector<std::string> locs = {"query", "path",   "header",
                                                "body",  "cookie", "form"};
  for (const auto& t : types)
    if (c == t) return Column::type;
  for (const auto& r : reqs)
    if (c == r) return Column::required;
  for (const auto& l : locs)
    if (c == l) return Column::location;
  return Column::none;
}

struct ParamRow {
  std::string name;
  std::string type;
  std::string required;
  std::string location;
  std::string description;
};

inline void assign(ParamRow& row, Column col, const std::string& value) {
  switch (col) {
    case Column::name: row.name = value; break;
    case Column::type: row.type = value; break;
    case Column::required: row.required = value; break;
    case Column::location: row.location = value; break;
    case Column::description: row.description = value; break;
    case Column::none: break;
  }
}

// Cell texts of every <tr>, grouped by the row's nearest <table> ancestor in
// document order. Rows outside any table share one synthetic group.
inline std::vector<std::vector<std::vector<std::string>>> collect_tables(
    const dom::DomTree& tree) {
  std::map<int, std::vector<std::vector<std::string>>> grouped;
  for (int id = 0; id < tree.size(); ++id) {
    const auto& n = tree.node(id);
    if (n.tag != "tr") continue;
    std::vector<std::string> cells;
    for (int c : n.children) {
      const auto& cell = tree.node(c);
      if (cell.tag == "td" || cell.tag == "th")
        cells.push_back(subtree_text(tree, c));
    }
    if (cells.empty()) continue;
    int table_id = -1;
    for (std::optional<int> up = n.parent_id; up; up = tree.node(*up).parent_id) {
      if (tree.node(*up).tag == "table") {
        table_id = *up;
        break;
      }
    }
    grouped[table_id].push_back(std::move(cells));
  }
  std::vector<std::vector<std::vector<std::string>>> out;
  out.reserve(grouped.size());
  for (auto& [id, rows] : grouped) out.push_back(std::move(rows));
  return out;
}

inline std::vector<ParamRow> params_from_rows(
    const std::vector<std::vector<std::string>>& rows) {
  // header detection: a first row naming at least the parameter column plus
  // one other known column
  std::vector<Column> header;
  size_t first_data = 0;
  {
    int known = 0;
    bool has_name = false;
    std::vector<Column> cols;
    for (const auto& cell : rows[0]) {
      Column c = column_from_header(cell);
      cols.push_back(c);
      if (c != Column::none) ++known;
      if (c == Column::name) has_name = true;
    }
    if (has_name && known >= 2) {
      header = cols;
      first_data = 1;
    }
  }

  std::vector<ParamRow> out;
  for (size_t r = first_data; r < rows.size(); ++r) {
    const auto& cells = rows[r];
    ParamRow row;
    if (!header.empty()) {
      for (size_t i = 0; i < cells.size() && i < header.size(); ++i)
        assign(row, header[i], cells[i]);
    } else {
      row.name = cells.front();
      for (size_t i = 1; i < cells.size(); ++i) {
        Column c = column_from_value(cells[i]);
        if (c == Column::none && row.description.empty())
          c = Column::description;
        assign(row, c, cells[i]);
      }
    }
    row.name = text::collapse_ws(row.name);
    if (!row.name.empty()) out.push_back(std::move(row));
  }
  return out;
}

// A table with location data reads as request documentation, one with dotted
// field paths as response documentation; anything else could be either.
enum class TableKind { request_like, response_like, ambiguous };

inline TableKind table_kind(const std::vector<ParamRow>& rows) {
  bool dotted = false;
  bool located = false;
  for (const auto& r : rows) {
    if (r.name.find('.') != std::string::npos) dotted = true;
    if (!text::collapse_ws(r.location).empty()) located = true;
  }
  if (dotted && !located) return TableKind::response_like;
  if (located && !dotted) return TableKind::request_like;
  return TableKind::ambiguous;
}

inline std::vector<ParamRow> extract_task_rows(const std::string& html,
                                               TableKind excluded) {
  dom::DomTree tree = dom::parse_dom(html);
  std::vector<ParamRow> out;
  for (const auto& rows : collect_tables(tree)) {
    auto params = params_from_rows(rows);
    if (params.empty() || table_kind(params) == excluded) continue;
    out.insert(out.end(), params.begin(), params.end());
  }
  if (out.empty())
    throw Error(errc::oracle_unsupported, "no usable parameter table in the input");
  return out;
}

inline std::string rows_to_tsv(const std::vector<ParamRow>& rows) {
  std::string out = "name\ttype\trequired\tlocation\tdescription\n";
  for (const auto& r : rows) {
    out += text::collapse_ws(r.name) + "\t" + text::collapse_ws(r.type) + "\t" +
           text::collapse_ws(r.required) + "\t" + text::collapse_ws(r.location) +
           "\t" + text::collapse_ws(r.description) + "\n";
  }
  return out;
}

inline std::string normalize_type_word(const std::string& raw) {
  std::string t = enrich::detail::normalize_type_cell(raw);
  return t.empty() ? "string" : t;  // schemas need a concrete type
}

inline bool required_word(const std::string& raw) {
  return enrich::detail::parse_required_cell(raw).value_or(false);
}

// Dotted names nest: "user.id" lands as property id of object property user.
inline std::string rows_to_response_schema(const std::vector<ParamRow>& rows) {
  schema::JsonSchemaNode root;
  root.type = "object";
  for (const auto& r : rows) {
    std::vector<std::string> segs;
    std::string cur;
    for (char ch : r.name) {
      if (ch == '.') {
        if (!cur.empty()) segs.push_back(cur);
        cur.clear();
      } else {
        cur += ch;
      }
    }
    if (!cur.empty()) segs.push_back(cur);
    if (segs.empty()) continue;

    schema::JsonSchemaNode* node = &root;
    for (size_t i = 0; i + 1 < segs.size(); ++i) {
      schema::JsonSchemaNode* child = node->find_property(segs[i]);
      if (!child) {
        node->properties.emplace_back(segs[i], schema::JsonSchemaNode{});
        child = &node->properties.back().second;
        child->type = "object";
      }
      node = child;
    }
    const std::string& leaf = segs.back();
    schema::JsonSchemaNode* prop = node->find_property(leaf);
    if (!prop) {
      node->properties.emplace_back(leaf, schema::JsonSchemaNode{});
      prop = &node->properties.back().second;
    }
    prop->type = normalize_type_word(r.type);
    std::string desc = text::collapse_ws(r.description);
    if (!desc.empty()) prop->description = desc;
    if (required_word(r.required)) {
      bool seen = false;
      for (const auto& q : node->required) seen = seen || q == leaf;
      if (!seen) node->required.push_back(leaf);
    }
  }
  return root.to_json().dump(2);
}

// --- remote transport ------------------------------------------------------

struct SplitUrl {
  std::string base;  // scheme://host[:port]
  std::string path;
};

inline SplitUrl split_url(const std::string& url) {
  auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos)
    throw Error(errc::provider_error, "endpoint URL needs a scheme: " + url);
  auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

inline std::string remote_complete(const ProviderConfig& provider,
                                   const GenerationJob& job) {
  SplitUrl u = split_url(*provider.endpoint);
  httplib::Client cli(u.base);
  cli.set_connection_timeout(provider.request_timeout_s);
  cli.set_read_timeout(provider.request_timeout_s);

  httplib::Headers headers;
  if (provider.auth_env_var) {
    const char* token = std::getenv(provider.auth_env_var->c_str());
    if (!token || !*token)
      throw Error(errc::provider_error,
                  "auth env var " + *provider.auth_env_var + " is not set");
    headers.emplace("Authorization", std::string("Bearer ") + token);
  }

  ordered_json body;
  body["model"] = *provider.model_name;
  body["prompt"] = job.prompt;
  body["max_new_tokens"] = job.decoding.max_new_tokens;
  body["temperature"] = job.decoding.temperature;
  body["stop_sequences"] = job.decoding.stop_sequences;

  auto res = cli.Post(u.path, headers, body.dump(), "application/json");
  if (!res)
    throw Error(errc::provider_error,
                "cannot reach provider at " + *provider.endpoint);
  if (res->status < 200 || res->status >= 300)
    throw Error(errc::provider_error,
                "provider returned status " + std::to_string(res->status));
  ordered_json parsed;
  try {
    parsed = ordered_json::parse(res->body);
  } catch (const nlohmann::json::exception&) {
    throw Error(errc::provider_error, "provider response is not JSON");
  }
  if (!parsed.contains("text") || !parsed["text"].is_string())
    throw Error(errc::provider_error, "provider response lacks a text field");
  return parsed["text"].get<std::string>();
}

}  // namespace detail

// Deterministic stand-in provider. Skeleton and schema answers follow the
// builder contracts exactly; enrichment answers come from table extraction
// over the cleaned HTML.
inline std::string reference_oracle(GenTask task, const std::string& input_payload) {
  switch (task) {
    case GenTask::skeleton: {
      extract::ParsedRequest parsed;
      try {
        parsed = extract::parse_curl(input_payload);
      } catch (const Error&) {
        throw Error(errc::oracle_unsupported,
                    "skeleton input is not a request example");
      }
      extract::EndpointExamplePair pair;
      pair.request = extract::RequestExample{0, input_payload, parsed};
      return builder::skeleton_to_json(builder::generate_skeleton(pair)).dump(2);
    }
    case GenTask::schema: {
      ordered_json doc;
      try {
        doc = ordered_json::parse(input_payload);
      } catch (const nlohmann::json::exception&) {
        throw Error(errc::oracle_unsupported, "schema input is not JSON");
      }
      return schema::infer_value_schema(doc).to_json().dump(2);
    }
    case GenTask::request_enrichment:
      return detail::rows_to_tsv(detail::extract_task_rows(
          input_payload, detail::TableKind::response_like));
    case GenTask::response_enrichment:
      return detail::rows_to_response_schema(detail::extract_task_rows(
          input_payload, detail::TableKind::request_like));
  }
  throw Error(errc::oracle_unsupported, "unknown task");
}

using OutputValidator = std::function<bool(const std::string&)>;
using Transport =
    std::function<std::string(const ProviderConfig&, const GenerationJob&)>;

// Structural acceptance per task. These call the same parsers the pipeline
// later runs on accepted outputs, so anything the validator passes is
// guaranteed to parse downstream.
inline OutputValidator task_validator(GenTask task) {
  switch (task) {
    case GenTask::skeleton:
      return [](const std::string& out) {
        try {
          auto j = ordered_json::parse(out);
          return j.is_object() && j.contains("path") && j.contains("method");
        } catch (const nlohmann::json::exception&) {
          return false;
        }
      };
    case GenTask::schema:
    case GenTask::response_enrichment:
      return [](const std::string& out) {
        try {
          enrich::parse_response_schema(out);
          return true;
        } catch (const Error&) {
          return false;
        }
      };
    case GenTask::request_enrichment:
      return [](const std::string& out) {
        try {
          enrich::parse_request_tsv(out);
          return true;
        } catch (const Error&) {
          return false;
        }
      };
  }
  return {};
}

// Runs the job until the validator accepts an output, retrying the unchanged
// prompt up to max_retries attempts in total. `transport` replaces the real
// provider call when given (tests script it).
inline std::string generate(const ProviderConfig& provider,
                            const GenerationJob& job,
                            const OutputValidator& validator = {},
                            const Transport& transport = {}) {
  provider.validate();
  if (job.prompt.empty())
    throw Error(errc::provider_error, "generation job has an empty prompt");
  if (job.decoding.temperature < 0)
    throw Error(errc::provider_error, "temperature must be non-negative");

  int attempts = provider.max_retries < 1 ? 1 : provider.max_retries;
  for (int attempt = 0; attempt < attempts; ++attempt) {
    std::string out;
    if (transport)
      out = transport(provider, job);
    else if (provider.kind == ProviderKind::reference_oracle)
      out = reference_oracle(job.task, job.input_payload);
    else
      out = detail::remote_complete(provider, job);
    if (!validator || validator(out)) return out;
  }
  throw Error(errc::validation_exhausted,
              "no valid output after " + std::to_string(attempts) + " attempts");
}

// Runs jobs concurrently, bounded by provider.parallelism. Results keep job
// order; the first failure (by job index) is rethrown after all workers stop.
inline std::vector<std::string> generate_batch(
    const ProviderConfig& provider, const std::vector<GenerationJob>& jobs,
    const OutputValidator& validator = {}, const Transport& transport = {}) {
  provider.validate();
  std::vector<std::string> results(jobs.size());
  std::vector<std::exception_ptr> errors(jobs.size());
  std::atomic<size_t> next{0};

  auto worker = [&]() {
    while (true) {
      size_t i = next.fetch_add(1);
      if (i >= jobs.size()) return;
      try {
        results[i] = generate(provider, jobs[i], validator, transport);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };

  size_t n_threads = jobs.size() < static_cast<size_t>(provider.parallelism)
                         ? jobs.size()
                         : static_cast<size_t>(provider.parallelism);
  std::vector<std::thread> pool;
  for (size_t i = 0; i < n_threads; ++i) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return results;
}

}  // namespace oasgen::gateway
