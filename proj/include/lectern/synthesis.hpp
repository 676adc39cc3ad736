// Grounded answer synthesis from an assembled context block, with a
// deterministic no-LLM fallback.
#pragma once

#include <string>
#include <vector>

#include "lectern/llm_gateway.hpp"
#include "lectern/retrieval.hpp"

namespace lectern {

enum class AnswerMode { Llm, Fallback };

struct Reference {
  std::string topic;    // full topic path
  std::string pages;    // rendered
  std::string chapter;  // number, may be empty when location unknown
  std::string section;  // number, may be empty
};

struct GroundedAnswer {
  std::string body;
  std::vector<Reference> references;  // always a subset of the context entries
  AnswerMode mode = AnswerMode::Fallback;
};

// Sends the query plus the rendered context (never the full index) to the
// model at temperature 0.6, then extracts references by matching page
// numbers in the reply against the context entries — model text citing
// anything else never reaches the reference list. An empty context
// short-circuits to the no-match answer without any gateway call; an
// unreachable gateway falls through to fallback_answer.
GroundedAnswer synthesize(const std::string& query, const ContextBlock& ctx,
                          const LlmGateway& gateway,
                          std::vector<DecodeNote>* notes = nullptr);

// Deterministic template over the top-ranked entry:
//   Check out "<topic>" on pages <pages>.
GroundedAnswer fallback_answer(const ContextBlock& ctx);

// Renders body plus the References trailer.
std::string render_answer(const GroundedAnswer& answer);

}  // namespace lectern
