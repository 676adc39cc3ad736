#include "lectern/pipeline.hpp"

#include <chrono>
#include <future>
#include <thread>

namespace lectern {

QueryTrace answer_query(const std::string& query, const std::vector<IndexEntry>& index,
                        const NavNode& nav, const PhraseLexicon& lexicon,
                        const LlmGateway* gateway, const QueryOptions& options) {
  QueryTrace trace;
  bool use_llm = options.use_llm && gateway != nullptr;

  // The LLM extractor runs in parallel with the pattern path. The worker
  // owns copies of everything it touches, so an abandoned extraction can
  // finish harmlessly after we have moved on.
  std::future<std::optional<TermSet>> llm_future;
  if (use_llm) {
    std::promise<std::optional<TermSet>> promise;
    llm_future = promise.get_future();
    std::thread(
        [](std::promise<std::optional<TermSet>> p, GatewayConfig config, std::string q) {
          try {
            LlmGateway worker_gateway(std::move(config));
            p.set_value(extract_llm(q, worker_gateway));
          } catch (...) {
            p.set_value(std::nullopt);
          }
        },
        std::move(promise), gateway->config(), query)
        .detach();
  }

  trace.pattern_terms = extract_pattern(query, lexicon);
  std::vector<ScoredMatch> pattern_matches = search_index(trace.pattern_terms, index, nav);

  std::vector<ScoredMatch> llm_matches;
  if (use_llm) {
    auto deadline = std::chrono::duration<double>(options.llm_extract_timeout_s);
    if (llm_future.wait_for(deadline) == std::future_status::ready) {
      trace.llm_terms = llm_future.get();
      if (trace.llm_terms) {
        llm_matches = search_index(*trace.llm_terms, index, nav);
      } else {
        trace.gateway_failed = true;
      }
    } else {
      trace.gateway_failed = true;  // timed out; pattern result proceeds alone
    }
  }

  trace.merged = filter_and_order(merge_max(pattern_matches, llm_matches), options.threshold);
  trace.context = assemble_context(trace.merged, nav, options.context_k);

  if (use_llm) {
    trace.answer = synthesize(query, trace.context, *gateway);
    if (trace.answer.mode == AnswerMode::Fallback && !trace.context.entries.empty())
      trace.gateway_failed = true;
  } else {
    trace.answer = fallback_answer(trace.context);
  }
  return trace;
}

}  // namespace lectern
