// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace oasgen {

enum class errc {
  source_unreachable,
  empty_document,
  parse_failure,
  degenerate_histogram,
  malformed_example,
  scope_not_found,
  no_candidates,
  budget_impossible,
  empty_library,
  provider_error,
  validation_exhausted,
  oracle_unsupported,
  invalid_threshold,
  not_json,
  inconsistent_prefixes,
  malformed_tsv,
  malformed_schema,
  selector_miss,
  no_eligible_pairs,
  empty_corpus,
};

inline const char* errc_name(errc c) {
  switch (c) {
    case errc::source_unreachable: return "SourceUnreachable";
    case errc::empty_document: return "EmptyDocument";
    case errc::parse_failure: return "ParseFailure";
    case errc::degenerate_histogram: return "DegenerateHistogram";
    case errc::malformed_example: return "MalformedExample";
    case errc::scope_not_found: return "ScopeNotFound";
    case errc::no_candidates: return "NoCandidates";
    case errc::budget_impossible: return "BudgetImpossible";
    case errc::empty_library: return "EmptyLibrary";
    case errc::provider_error: return "ProviderError";
    case errc::validation_exhausted: return "ValidationExhausted";
    case errc::oracle_unsupported: return "OracleUnsupported";
    case errc::invalid_threshold: return "InvalidThreshold";
    case errc::not_json: return "NotJson";
    case errc::inconsistent_prefixes: return "InconsistentPrefixes";
    case errc::malformed_tsv: return "MalformedTsv";
    case errc::malformed_schema: return "MalformedSchema";
    case errc::selector_miss: return "SelectorMiss";
    case errc::no_eligible_pairs: return "NoEligiblePairs";
    case errc::empty_corpus: return "EmptyCorpus";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
public:
  Error(errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  errc code() const noexcept { return code_; }

private:
  errc code_;
};

}  // namespace oasgen
