#include "lectern/term_extract.hpp"

#include <algorithm>
#include <fstream>
#include <map>

#include "lectern/errors.hpp"
#include "lectern/text_util.hpp"

namespace lectern {

namespace {

std::vector<std::string> read_lines(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = text::trim(line);
    if (!line.empty()) lines.push_back(line);
  }
  return lines;
}

}  // namespace

std::vector<std::string> load_phrase_file(const std::filesystem::path& path) {
  std::vector<std::string> phrases = read_lines(path);
  for (const auto& p : phrases) {
    if (text::words(p).size() < 2)
      throw ParseError(path.string() + ": phrase \"" + p + "\" has fewer than two words");
  }
  return phrases;
}

std::set<std::string> load_stopword_file(const std::filesystem::path& path) {
  std::set<std::string> out;
  for (const auto& line : read_lines(path)) out.insert(text::to_lower(line));
  return out;
}

namespace {

void push_term(TermSet& set, std::map<std::string, bool>& seen, std::string term) {
  term = text::trim(text::to_lower(term));
  if (term.empty() || seen.count(term)) return;
  seen[term] = true;
  set.terms.push_back(std::move(term));
}

}  // namespace

TermSet extract_pattern(const std::string& query, const PhraseLexicon& lexicon) {
  std::vector<std::string> query_words = text::words(query);

  // Tokenized lexicon, longest phrase first so the most specific match wins.
  struct TokenizedPhrase {
    std::vector<std::string> tokens;
    const std::string* display;
  };
  std::vector<TokenizedPhrase> phrases;
  for (const auto& p : lexicon.phrases) phrases.push_back({text::words(p), &p});
  std::stable_sort(phrases.begin(), phrases.end(),
                   [](const auto& a, const auto& b) { return a.tokens.size() > b.tokens.size(); });

  TermSet result;
  result.origin = TermOrigin::Pattern;
  std::map<std::string, bool> seen;

  size_t i = 0;
  while (i < query_words.size()) {
    const TokenizedPhrase* hit = nullptr;
    for (const auto& phrase : phrases) {
      if (phrase.tokens.size() <= query_words.size() - i &&
          std::equal(phrase.tokens.begin(), phrase.tokens.end(), query_words.begin() + i)) {
        hit = &phrase;
        break;
      }
    }
    if (hit) {
      push_term(result, seen, *hit->display);
      i += hit->tokens.size();
    } else {
      if (!lexicon.stopwords.count(query_words[i])) push_term(result, seen, query_words[i]);
      ++i;
    }
  }
  return result;
}

namespace {

const char* kExtractionSystemPrompt =
    "You extract textbook search terms from a student's question about "
    "thermodynamics. Respond with JSON of the shape "
    "{\"terms\": [\"entropy\"], \"related\": [\"entropy balance\", \"entropy generation\"]}: "
    "'terms' holds the technical terms named in the question, 'related' holds closely "
    "related concepts a student should also look up. Use lowercase terms as they would "
    "appear in a textbook index. Return only the JSON object.";

}  // namespace

std::optional<TermSet> extract_llm(const std::string& query, const LlmGateway& gateway) {
  SchemaSpec schema;
  schema.fields = {
      {"terms", {"search_terms", "keywords"}, FieldKind::Array, ElementKind::Strings, true},
      {"related", {"related_concepts", "related_terms", "expansions"}, FieldKind::Array,
       ElementKind::Strings, false},
  };

  StructuredResult decoded;
  try {
    decoded = gateway.generate_structured(kExtractionSystemPrompt, query, schema);
  } catch (const GatewayError&) {
    return std::nullopt;  // unavailable or undecodable: no partial result
  }

  TermSet result;
  result.origin = TermOrigin::Llm;
  std::map<std::string, bool> seen;
  for (const auto& t : decoded.record["terms"]) push_term(result, seen, t.get<std::string>());
  if (decoded.record.contains("related")) {
    for (const auto& t : decoded.record["related"]) {
      std::string term = text::trim(text::to_lower(t.get<std::string>()));
      if (!term.empty()) result.expanded = true;
      push_term(result, seen, term);
    }
  }
  return result;
}

}  // namespace lectern
