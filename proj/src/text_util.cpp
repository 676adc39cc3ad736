#include "lectern/text_util.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cstdio>
#include <ctime>

namespace lectern::text {

bool is_word_char(unsigned char c) {
  return std::isalnum(c) != 0 || c >= 0x80;
}

std::string trim(std::string_view s) {
  size_t b = 0;
  size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::string to_lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::string normalize_ws(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  bool in_space = true;  // leading whitespace dropped
  for (char c : s) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      if (!in_space) out.push_back(' ');
      in_space = true;
    } else {
      out.push_back(c);
      in_space = false;
    }
  }
  while (!out.empty() && out.back() == ' ') out.pop_back();
  return out;
}

std::vector<std::string> words(std::string_view s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (is_word_char(static_cast<unsigned char>(c))) {
      cur.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    } else if (!cur.empty()) {
      out.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

std::size_t alnum_count(std::string_view s) {
  std::size_t n = 0;
  for (char c : s) {
    if (is_word_char(static_cast<unsigned char>(c))) ++n;
  }
  return n;
}

bool contains_seq(const std::vector<std::string>& haystack,
                  const std::vector<std::string>& needle) {
  if (needle.empty() || needle.size() > haystack.size()) return false;
  for (size_t i = 0; i + needle.size() <= haystack.size(); ++i) {
    if (std::equal(needle.begin(), needle.end(), haystack.begin() + i)) return true;
  }
  return false;
}

bool starts_with_seq(const std::vector<std::string>& haystack,
                     const std::vector<std::string>& needle) {
  if (needle.empty() || needle.size() > haystack.size()) return false;
  return std::equal(needle.begin(), needle.end(), haystack.begin());
}

std::string format_hms(double seconds) {
  if (seconds < 0) seconds = 0;
  long long total = static_cast<long long>(seconds);
  long long h = total / 3600;
  long long m = (total % 3600) / 60;
  long long s = total % 60;
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%lld:%02lld:%02lld", h, m, s);
  return buf;
}

std::optional<double> parse_hms(std::string_view s, std::string* reason) {
  auto fail = [&](const char* why) -> std::optional<double> {
    if (reason) *reason = why;
    return std::nullopt;
  };
  size_t c1 = s.find(':');
  if (c1 == std::string_view::npos) return fail("expected H:MM:SS");
  size_t c2 = s.find(':', c1 + 1);
  if (c2 == std::string_view::npos) return fail("expected three colon-separated groups");
  if (s.find(':', c2 + 1) != std::string_view::npos) return fail("too many groups");
  std::string_view hs = s.substr(0, c1);
  std::string_view ms = s.substr(c1 + 1, c2 - c1 - 1);
  std::string_view ss = s.substr(c2 + 1);
  auto all_digits = [](std::string_view v) {
    return !v.empty() && std::all_of(v.begin(), v.end(), [](unsigned char c) {
      return std::isdigit(c) != 0;
    });
  };
  if (!all_digits(hs) || !all_digits(ms) || !all_digits(ss))
    return fail("non-digit character in timestamp");
  if (ms.size() != 2 || ss.size() != 2)
    return fail("minutes and seconds must be two digits");
  long long h = std::stoll(std::string(hs));
  long long m = std::stoll(std::string(ms));
  long long sec = std::stoll(std::string(ss));
  if (m >= 60 || sec >= 60) return fail("minutes and seconds must be below 60");
  return static_cast<double>(h * 3600 + m * 60 + sec);
}

std::string format_thousands(long long n) {
  std::string digits = std::to_string(n < 0 ? -n : n);
  std::string out;
  int count = 0;
  for (auto it = digits.rbegin(); it != digits.rend(); ++it) {
    if (count != 0 && count % 3 == 0) out.push_back(',');
    out.push_back(*it);
    ++count;
  }
  if (n < 0) out.push_back('-');
  std::reverse(out.begin(), out.end());
  return out;
}

std::vector<long long> extract_integers(std::string_view s) {
  std::vector<long long> out;
  size_t i = 0;
  while (i < s.size()) {
    if (std::isdigit(static_cast<unsigned char>(s[i]))) {
      size_t j = i;
      while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
      // Digit runs longer than 12 are not page numbers or counts we care about.
      if (j - i <= 12) out.push_back(std::stoll(std::string(s.substr(i, j - i))));
      i = j;
    } else {
      ++i;
    }
  }
  return out;
}

std::string iso8601_utc_now() {
  auto now = std::chrono::system_clock::now();
  std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace lectern::text
