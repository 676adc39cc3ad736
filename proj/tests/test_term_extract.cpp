#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>

#include "lectern/errors.hpp"
#include "lectern/term_extract.hpp"
#include "support/fixtures.hpp"
#include "support/mock_llm.hpp"

using namespace lectern;
using lectern::testing::MockLlm;
using lectern::testing::TempDir;

namespace {

PhraseLexicon demo_lexicon() {
  PhraseLexicon lex;
  lex.phrases = {"van der Waals", "equation of state", "chemical potential",
                 "Peng-Robinson equation of state", "fugacity coefficient"};
  lex.stopwords = {"what", "is", "the", "explain", "a", "an", "of", "how", "does", "do",
                   "to", "and", "in"};
  return lex;
}

}  // namespace

TEST_CASE("query verbs are stopwords; technical words survive") {
  TermSet terms = extract_pattern("Explain fugacity.", demo_lexicon());
  CHECK(terms.terms == std::vector<std::string>{"fugacity"});
  CHECK(terms.origin == TermOrigin::Pattern);
  CHECK_FALSE(terms.expanded);
}

TEST_CASE("longest phrase match wins and consumes its words") {
  PhraseLexicon lex = demo_lexicon();

  TermSet terms = extract_pattern("What is the van der Waals equation of state?", lex);
  CHECK(terms.terms == std::vector<std::string>{"van der waals", "equation of state"});

  // The five-word phrase outranks its three-word suffix.
  TermSet pr = extract_pattern("How does the Peng-Robinson equation of state work?", lex);
  REQUIRE(!pr.terms.empty());
  CHECK(pr.terms[0] == "peng-robinson equation of state");
  for (const auto& t : pr.terms) CHECK(t != "equation of state");
}

TEST_CASE("hyphen and space variants match the same phrase") {
  PhraseLexicon lex = demo_lexicon();
  TermSet spaced = extract_pattern("peng robinson equation of state", lex);
  TermSet hyphened = extract_pattern("Peng-Robinson equation of state", lex);
  CHECK(spaced.terms == hyphened.terms);
}

TEST_CASE("empty query, dedup, and stopword-free output") {
  PhraseLexicon lex = demo_lexicon();
  CHECK(extract_pattern("", lex).terms.empty());

  TermSet terms = extract_pattern("entropy, ENTROPY, entropy!", lex);
  CHECK(terms.terms == std::vector<std::string>{"entropy"});

  TermSet mixed = extract_pattern("What is what IS the THE entropy", lex);
  for (const auto& t : mixed.terms) {
    CHECK(lex.stopwords.find(t) == lex.stopwords.end());
  }
}

TEST_CASE("extract_pattern is pure") {
  PhraseLexicon lex = demo_lexicon();
  std::string query = "Explain the fugacity coefficient and chemical potential.";
  TermSet a = extract_pattern(query, lex);
  TermSet b = extract_pattern(query, lex);
  CHECK(a.terms == b.terms);
  CHECK(a.terms == std::vector<std::string>{"fugacity coefficient", "chemical potential"});
}

TEST_CASE("phrase precedence: constituents never appear alongside the phrase") {
  PhraseLexicon lex = demo_lexicon();
  TermSet terms = extract_pattern("Tell me about the equation of state please", lex);
  CHECK(std::find(terms.terms.begin(), terms.terms.end(), "equation") == terms.terms.end());
  CHECK(std::find(terms.terms.begin(), terms.terms.end(), "state") == terms.terms.end());
  CHECK(std::find(terms.terms.begin(), terms.terms.end(), "equation of state") !=
        terms.terms.end());
}

TEST_CASE("lexicon and stopword files load with comments; one-word phrases rejected") {
  TempDir dir("lexicon");
  auto phrases = dir.path() / "phrases.txt";
  {
    std::ofstream out(phrases);
    out << "# comment line\n\nvan der Waals\nequation of state  # trailing comment\n";
  }
  auto loaded = load_phrase_file(phrases);
  REQUIRE(loaded.size() == 2);
  CHECK(loaded[0] == "van der Waals");

  auto stopwords = dir.path() / "stop.txt";
  {
    std::ofstream out(stopwords);
    out << "The\nIS\n# nope\n";
  }
  auto stops = load_stopword_file(stopwords);
  CHECK(stops.count("the") == 1);
  CHECK(stops.count("is") == 1);
  CHECK(stops.size() == 2);

  auto bad = dir.path() / "bad.txt";
  {
    std::ofstream out(bad);
    out << "fugacity\n";
  }
  CHECK_THROWS_WITH_AS(load_phrase_file(bad), doctest::Contains("fewer than two words"),
                       ParseError);

  // "Clausius-Clapeyron" counts as two words thanks to the hyphen.
  auto hyphen = dir.path() / "hyphen.txt";
  {
    std::ofstream out(hyphen);
    out << "Clausius-Clapeyron\n";
  }
  CHECK(load_phrase_file(hyphen).size() == 1);
}

TEST_CASE("extract_llm unions terms and related, normalized") {
  MockLlm mock;
  LlmGateway gateway({.base_url = mock.url()});

  mock.script(R"({"terms": ["Entropy", "entropy"],
                  "related": ["Entropy change", "entropy generation", "entropy balance"]})");
  auto terms = extract_llm("What is entropy?", gateway);
  REQUIRE(terms);
  CHECK(terms->origin == TermOrigin::Llm);
  CHECK(terms->expanded);
  CHECK(terms->terms == std::vector<std::string>{"entropy", "entropy change",
                                                 "entropy generation", "entropy balance"});
}

TEST_CASE("extract_llm tolerates a missing related array") {
  MockLlm mock;
  LlmGateway gateway({.base_url = mock.url()});
  mock.script(R"({"terms": ["fugacity"]})");
  auto terms = extract_llm("Explain fugacity.", gateway);
  REQUIRE(terms);
  CHECK_FALSE(terms->expanded);
  CHECK(terms->terms == std::vector<std::string>{"fugacity"});
}

TEST_CASE("extract_llm repairs once, then signals unavailable") {
  MockLlm mock;
  LlmGateway gateway({.base_url = mock.url()});

  SUBCASE("repair succeeds") {
    mock.script("not json at all");
    mock.script(R"({"terms": ["fugacity"], "related": []})");
    auto terms = extract_llm("Explain fugacity.", gateway);
    REQUIRE(terms);
    CHECK(terms->terms == std::vector<std::string>{"fugacity"});
    CHECK(mock.request_count() == 2);
  }

  SUBCASE("two bad outputs give no partial result") {
    mock.script("still not json");
    mock.script("also broken {{{");
    CHECK_FALSE(extract_llm("Explain fugacity.", gateway));
    CHECK(mock.request_count() == 2);
  }
}

TEST_CASE("extract_llm signals unavailable when the endpoint is down") {
  LlmGateway gateway({.base_url = lectern::testing::dead_endpoint(),
                      .request_timeout_s = 0.2,
                      .retry_count = 0});
  CHECK_FALSE(extract_llm("What is entropy?", gateway));
}
