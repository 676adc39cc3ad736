// Small text helpers: word tokenization, whitespace normalization,
// H:MM:SS timestamps, number formatting.
#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace lectern::text {

// Word characters are ASCII alphanumerics plus any non-ASCII byte, so UTF-8
// letters stay inside words. Hyphens and punctuation act as separators,
// which is what makes "Peng-Robinson" and "Peng Robinson" tokenize alike.
bool is_word_char(unsigned char c);

std::string trim(std::string_view s);
std::string to_lower(std::string_view s);

// Collapses whitespace runs to single spaces and trims. Used for the
// verbatim-grounding checks on quotes.
std::string normalize_ws(std::string_view s);

// Lowercased word tokens of `s`.
std::vector<std::string> words(std::string_view s);

// Number of word characters in `s` (term-length weighting for scoring).
std::size_t alnum_count(std::string_view s);

// True when `needle` occurs as a contiguous run inside `haystack`.
bool contains_seq(const std::vector<std::string>& haystack,
                  const std::vector<std::string>& needle);

bool starts_with_seq(const std::vector<std::string>& haystack,
                     const std::vector<std::string>& needle);

// Seconds -> "H:MM:SS" with an unpadded hour group.
std::string format_hms(double seconds);

// Strict "H:MM:SS" parse (three groups, two-digit minutes/seconds < 60).
// Returns seconds, or nullopt with a reason.
std::optional<double> parse_hms(std::string_view s, std::string* reason = nullptr);

// 20361 -> "20,361"
std::string format_thousands(long long n);

// All non-negative integers appearing as digit runs in `s`.
std::vector<long long> extract_integers(std::string_view s);

std::string iso8601_utc_now();

}  // namespace lectern::text
