// End-to-end query pipeline: dual-path extraction, search, max-merge,
// context assembly, synthesis. One code path serves the REPL, one-shot
// queries, and the tests.
#pragma once

#include <optional>
#include <string>

#include "lectern/book_index.hpp"
#include "lectern/retrieval.hpp"
#include "lectern/synthesis.hpp"
#include "lectern/term_extract.hpp"

namespace lectern {

struct QueryOptions {
  double threshold = 10.0;
  int context_k = 5;
  bool use_llm = true;
  // The pattern result proceeds alone when the LLM extractor has not
  // answered within this window.
  double llm_extract_timeout_s = 30.0;
};

struct QueryTrace {
  TermSet pattern_terms;
  std::optional<TermSet> llm_terms;
  std::vector<MergedMatch> merged;  // filtered and ordered
  ContextBlock context;
  GroundedAnswer answer;
  bool gateway_failed = false;  // an LLM step fell back
};

// gateway may be null (forces pattern-only extraction and the
// deterministic fallback answer).
QueryTrace answer_query(const std::string& query, const std::vector<IndexEntry>& index,
                        const NavNode& nav, const PhraseLexicon& lexicon,
                        const LlmGateway* gateway, const QueryOptions& options = {});

}  // namespace lectern
