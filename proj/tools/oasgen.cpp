// SPDX-License-Identifier: Apache-2.0
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "oasgen/pipeline.hpp"

namespace {

using oasgen::pipeline::RunConfig;

void apply_config_file(const std::string& path, RunConfig& cfg) {
  auto body = oasgen::ingest::detail::read_file(path);
  auto j = oasgen::yamlio::parse_structured(path, body);
  if (!j.is_object())
    throw oasgen::Error(oasgen::errc::parse_failure,
                        "config file must hold an object");
  if (j.contains("provider") && j["provider"].is_object()) {
    const auto& p = j["provider"];
    if (p.contains("kind"))
      cfg.provider.kind =
          oasgen::gateway::provider_kind_from_name(p["kind"].get<std::string>());
    if (p.contains("endpoint"))
      cfg.provider.endpoint = p["endpoint"].get<std::string>();
    if (p.contains("model_name"))
      cfg.provider.model_name = p["model_name"].get<std::string>();
    if (p.contains("auth_env_var"))
      cfg.provider.auth_env_var = p["auth_env_var"].get<std::string>();
    if (p.contains("request_timeout_s"))
      cfg.provider.request_timeout_s = p["request_timeout_s"].get<int>();
    if (p.contains("max_retries"))
      cfg.provider.max_retries = p["max_retries"].get<int>();
    if (p.contains("parallelism"))
      cfg.provider.parallelism = p["parallelism"].get<int>();
  }
  if (j.contains("icl") && j["icl"].is_object()) {
    const auto& i = j["icl"];
    if (i.contains("path")) cfg.icl.path = i["path"].get<std::string>();
    if (i.contains("k")) cfg.icl.k = i["k"].get<int>();
    if (i.contains("metric")) cfg.icl.metric = i["metric"].get<std::string>();
  }
  if (j.contains("line_threshold"))
    cfg.line_threshold = j["line_threshold"].get<int>();
  if (j.contains("scope_budget"))
    cfg.scope_budget = j["scope_budget"].get<int>();
  if (j.contains("seed")) cfg.seed = j["seed"].get<long long>();
  if (j.contains("enrichment_enabled"))
    cfg.enrichment_enabled = j["enrichment_enabled"].get<bool>();
  if (j.contains("output_format"))
    cfg.output_format = j["output_format"].get<std::string>();
  if (j.contains("jobs")) cfg.jobs = j["jobs"].get<int>();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Generate, validate, and evaluate OpenAPI specifications "
               "derived from HTML API documentation"};
  app.require_subcommand(1);

  // generate ----------------------------------------------------------------
  auto* gen = app.add_subcommand(
      "generate", "Run the documentation-to-OAS pipeline over one page");
  std::string source;
  std::string out_dir = ".";
  std::string config_path;
  gen->add_option("source", source, "HTML file path or http(s) URL")
      ->required();
  gen->add_option("--out", out_dir, "Output directory");
  gen->add_option("--config", config_path, "JSON or YAML config file");

  std::string provider_kind = "reference-oracle";
  std::string endpoint, model_name, auth_env;
  int timeout = 0, retries = 0, parallelism = 0;
  gen->add_option("--provider", provider_kind,
                  "Text generation provider: reference-oracle or remote-http");
  gen->add_option("--endpoint", endpoint, "Remote provider completion URL");
  gen->add_option("--model", model_name, "Remote provider model name");
  gen->add_option("--auth-env", auth_env,
                  "Environment variable holding the bearer token");
  gen->add_option("--timeout", timeout, "Request timeout in seconds");
  gen->add_option("--retries", retries, "Generation attempts per task");
  gen->add_option("--parallelism", parallelism,
                  "Concurrent generation requests");

  std::string icl_path, icl_metric;
  int icl_k = 0;
  gen->add_option("--icl-path", icl_path, "Directory of worked examples");
  gen->add_option("--icl-k", icl_k, "Worked examples per prompt");
  gen->add_option("--icl-metric", icl_metric,
                  "Example ranking metric: cosine or kl-divergence");

  int line_threshold = 0, scope_budget = 0, jobs = 0;
  long long seed = 0;
  std::string format;
  bool enrichment_flag = true;
  gen->add_option("--line-threshold", line_threshold,
                  "Max example lines before segmentation");
  gen->add_option("--scope-budget", scope_budget,
                  "Character budget for enrichment scopes");
  gen->add_option("--seed", seed, "RNG seed for tie-breaking");
  gen->add_flag("--enrichment,!--no-enrichment", enrichment_flag,
                "Toggle the enrichment stages");
  gen->add_option("--format", format, "Output format: json or yaml");
  gen->add_option("--jobs", jobs, "Concurrent per-endpoint pipelines");

  // validate ----------------------------------------------------------------
  auto* val = app.add_subcommand(
      "validate", "Check documents against the OAS structural meta-schema");
  std::vector<std::string> val_files;
  val->add_option("files", val_files, "OAS documents (JSON or YAML)")
      ->required();

  // evaluate ----------------------------------------------------------------
  auto* eva = app.add_subcommand(
      "evaluate", "Score predicted specifications against ground truth");
  std::string pred_dir, truth_dir, base_dir, report_path;
  eva->add_option("--pred", pred_dir, "Directory of predicted documents")
      ->required();
  eva->add_option("--truth", truth_dir, "Directory of ground-truth documents")
      ->required();
  eva->add_option("--pred-base", base_dir,
                  "Directory of enrichment-free predictions for comparison");
  eva->add_option("--out", report_path, "Where to write the metrics report");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      RunConfig cfg;  // defaults, then config file, then explicit flags
      if (!config_path.empty()) apply_config_file(config_path, cfg);
      if (gen->count("--provider"))
        cfg.provider.kind =
            oasgen::gateway::provider_kind_from_name(provider_kind);
      if (gen->count("--endpoint")) cfg.provider.endpoint = endpoint;
      if (gen->count("--model")) cfg.provider.model_name = model_name;
      if (gen->count("--auth-env")) cfg.provider.auth_env_var = auth_env;
      if (gen->count("--timeout")) cfg.provider.request_timeout_s = timeout;
      if (gen->count("--retries")) cfg.provider.max_retries = retries;
      if (gen->count("--parallelism")) cfg.provider.parallelism = parallelism;
      if (gen->count("--icl-path")) cfg.icl.path = icl_path;
      if (gen->count("--icl-k")) cfg.icl.k = icl_k;
      if (gen->count("--icl-metric")) cfg.icl.metric = icl_metric;
      if (gen->count("--line-threshold")) cfg.line_threshold = line_threshold;
      if (gen->count("--scope-budget")) cfg.scope_budget = scope_budget;
      if (gen->count("--seed")) cfg.seed = seed;
      if (gen->count("--enrichment") || gen->count("--no-enrichment"))
        cfg.enrichment_enabled = enrichment_flag;
      if (gen->count("--format")) cfg.output_format = format;
      if (gen->count("--jobs")) cfg.jobs = jobs;
      return oasgen::pipeline::cmd_generate(source, out_dir, cfg, std::cout,
                                            std::cerr);
    }
    if (val->parsed())
      return oasgen::pipeline::cmd_validate(val_files, std::cout, std::cerr);
    if (eva->parsed())
      return oasgen::pipeline::cmd_evaluate(pred_dir, truth_dir, base_dir,
                                            report_path, std::cout, std::cerr);
  } catch (const oasgen::Error& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return 2;
  }
  return 2;
}
