#include "lectern/synthesis.hpp"

#include <set>

#include "lectern/errors.hpp"
#include "lectern/text_util.hpp"

namespace lectern {

namespace {

const char* kSynthesisSystemPrompt =
    "You are a helpful teaching assistant for an undergraduate thermodynamics course. "
    "Answer the student's question in 3 to 5 sentences using ONLY the numbered context "
    "entries provided. Every topic you mention must carry its specific page reference "
    "from the context. Never invent chapter numbers, section numbers, or page numbers "
    "that do not appear in the context. If the context does not cover the question, "
    "say so and point the student at the closest listed topic.";

Reference reference_from(const ContextEntry& entry) {
  Reference ref;
  ref.topic = entry.topic_path;
  ref.pages = entry.pages;
  if (entry.location) {
    ref.chapter = entry.location->chapter_number;
    if (entry.location->section_number) ref.section = *entry.location->section_number;
  }
  return ref;
}

}  // namespace

GroundedAnswer fallback_answer(const ContextBlock& ctx) {
  GroundedAnswer answer;
  answer.mode = AnswerMode::Fallback;
  if (ctx.entries.empty()) {
    answer.body = "No matching topics found in the index.";
    return answer;
  }
  const ContextEntry& top = ctx.entries.front();
  answer.body = "Check out \"" + top.topic_path + "\" on pages " + top.pages + ".";
  answer.references.push_back(reference_from(top));
  return answer;
}

GroundedAnswer synthesize(const std::string& query, const ContextBlock& ctx,
                          const LlmGateway& gateway, std::vector<DecodeNote>* notes) {
  if (ctx.entries.empty()) return fallback_answer(ctx);

  std::string user_prompt = "Question: " + query + "\n\nContext entries:\n" + ctx.rendered_text;
  GenerateResult reply;
  try {
    GenerateOptions opts;
    opts.temperature = 0.6;
    reply = gateway.generate(kSynthesisSystemPrompt, user_prompt, opts);
  } catch (const GatewayError&) {
    return fallback_answer(ctx);
  }
  if (notes) {
    notes->insert(notes->end(), reply.exchange.decode_notes.begin(),
                  reply.exchange.decode_notes.end());
  }

  GroundedAnswer answer;
  answer.mode = AnswerMode::Llm;
  answer.body = text::trim(reply.text);

  // A context entry becomes a reference when the reply mentions any of its
  // page endpoints. Pages the model made up match nothing and are dropped.
  std::set<long long> mentioned;
  for (long long n : text::extract_integers(reply.text)) mentioned.insert(n);
  for (const auto& entry : ctx.entries) {
    bool cited = false;
    for (long long n : text::extract_integers(entry.pages)) {
      if (mentioned.count(n)) {
        cited = true;
        break;
      }
    }
    if (cited) answer.references.push_back(reference_from(entry));
  }
  return answer;
}

std::string render_answer(const GroundedAnswer& answer) {
  std::string out = answer.body;
  if (!answer.references.empty()) {
    out += "\n\nReferences:\n";
    for (const auto& ref : answer.references) {
      out += "  " + ref.topic + ": pages " + ref.pages;
      if (!ref.chapter.empty()) {
        out += " in Chapter " + ref.chapter;
        if (!ref.section.empty()) out += ", Section " + ref.section;
      }
      out += ".\n";
    }
  }
  return out;
}

}  // namespace lectern
