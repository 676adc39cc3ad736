#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "lectern/text_util.hpp"

using namespace lectern;

TEST_CASE("words tokenizes case-insensitively with hyphens as separators") {
  CHECK(text::words("Peng-Robinson equation") ==
        std::vector<std::string>{"peng", "robinson", "equation"});
  CHECK(text::words("  Entropy, entropy!  ") == std::vector<std::string>{"entropy", "entropy"});
  CHECK(text::words("") == std::vector<std::string>{});
}

TEST_CASE("normalize_ws collapses runs") {
  CHECK(text::normalize_ws("  a\t b\n\nc ") == "a b c");
  CHECK(text::normalize_ws("") == "");
}

TEST_CASE("alnum_count ignores punctuation") {
  CHECK(text::alnum_count("fugacity") == 8);
  CHECK(text::alnum_count("van der waals") == 11);
  CHECK(text::alnum_count("Peng-Robinson") == 12);
}

TEST_CASE("sequence search is word-boundary exact") {
  auto hay = text::words("the peng robinson equation of state");
  CHECK(text::contains_seq(hay, text::words("equation of state")));
  CHECK_FALSE(text::contains_seq(hay, text::words("state equation")));
  CHECK_FALSE(text::contains_seq(hay, {}));
  CHECK(text::starts_with_seq(text::words("fugacity of"), text::words("fugacity")));
  CHECK_FALSE(text::starts_with_seq(text::words("of fugacity"), text::words("fugacity")));
}

TEST_CASE("hms round trip") {
  CHECK(text::format_hms(942.0) == "0:15:42");
  CHECK(text::format_hms(35999.0) == "9:59:59");
  CHECK(text::parse_hms("0:15:42") == 942.0);
  CHECK(text::parse_hms("9:59:59") == 35999.0);

  std::string reason;
  CHECK_FALSE(text::parse_hms("15:42", &reason));
  CHECK_FALSE(text::parse_hms("H:MM:SS"));
  CHECK_FALSE(text::parse_hms("0:75:10"));
  CHECK_FALSE(text::parse_hms("0:5:42"));
  CHECK_FALSE(text::parse_hms(""));
}

TEST_CASE("format_thousands") {
  CHECK(text::format_thousands(20361) == "20,361");
  CHECK(text::format_thousands(826) == "826");
  CHECK(text::format_thousands(0) == "0");
  CHECK(text::format_thousands(1000000) == "1,000,000");
}

TEST_CASE("extract_integers pulls digit runs") {
  auto ns = text::extract_integers("pages 314--317, 440--442");
  CHECK(ns == std::vector<long long>{314, 317, 440, 442});
}
