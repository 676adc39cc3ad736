// Dual-path search-term extraction: a deterministic pattern extractor over
// a phrase lexicon, and an LLM extractor that degrades to nothing rather
// than to partial output.
#pragma once

#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "lectern/llm_gateway.hpp"

namespace lectern {

enum class TermOrigin { Pattern, Llm };

struct TermSet {
  std::vector<std::string> terms;  // lowercased, deduplicated, order-preserving
  TermOrigin origin = TermOrigin::Pattern;
  bool expanded = false;  // LLM added related concepts
};

struct PhraseLexicon {
  std::vector<std::string> phrases;  // each >= 2 words (hyphens count as separators)
  std::set<std::string> stopwords;   // lowercase
};

// One phrase per line, '#' comments, blank lines ignored. Single-word
// phrases are rejected.
std::vector<std::string> load_phrase_file(const std::filesystem::path& path);
std::set<std::string> load_stopword_file(const std::filesystem::path& path);

// Longest-match phrase recognition first (case-insensitive, word-boundary,
// hyphens treated as spaces), then remaining non-stopword words as single
// terms. Pure and deterministic.
TermSet extract_pattern(const std::string& query, const PhraseLexicon& lexicon);

// Asks the model for {"terms": [...], "related": [...]} in JSON mode and
// returns the normalized union. nullopt when the gateway is unavailable or
// its output stays undecodable after the single repair attempt — the
// caller proceeds with the pattern result alone.
std::optional<TermSet> extract_llm(const std::string& query, const LlmGateway& gateway);

}  // namespace lectern
