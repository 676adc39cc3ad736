#include "lectern/report.hpp"

#include <algorithm>
#include <cstdio>
#include <map>

#include "lectern/errors.hpp"
#include "lectern/text_util.hpp"

namespace lectern {

using nlohmann::ordered_json;

namespace {

struct TermWord {
  std::string word;       // lowercase, without the (s) marker
  bool fold_plural = false;
};

// "thermodynamic(s)" -> [{thermodynamic, fold}], "equation of state" ->
// [{equation}, {of}, {state}].
std::vector<TermWord> parse_term(const std::string& term) {
  std::vector<TermWord> out;
  std::string cur;
  auto flush = [&] {
    if (cur.empty()) return;
    bool fold = false;
    if (cur.size() > 3 && cur.compare(cur.size() - 3, 3, "(s)") == 0) {
      fold = true;
      cur.erase(cur.size() - 3);
    }
    size_t before = out.size();
    for (const auto& w : text::words(cur)) out.push_back({w, false});
    // Only the final word of the chunk carries the fold marker.
    if (fold && out.size() > before) out.back().fold_plural = true;
    cur.clear();
  };
  for (char c : term) {
    if (std::isspace(static_cast<unsigned char>(c)))
      flush();
    else
      cur.push_back(c);
  }
  flush();
  return out;
}

bool word_matches(const std::string& token, const TermWord& tw) {
  if (token == tw.word) return true;
  return tw.fold_plural && token == tw.word + "s";
}

}  // namespace

long long count_term(const std::string& text_body, const std::string& term) {
  std::vector<TermWord> needle = parse_term(term);
  if (needle.empty()) throw ValidationError("count_term: empty term");
  std::vector<std::string> tokens = text::words(text_body);

  long long count = 0;
  if (needle.size() > tokens.size()) return 0;
  for (size_t i = 0; i + needle.size() <= tokens.size(); ++i) {
    bool all = true;
    for (size_t j = 0; j < needle.size(); ++j) {
      if (!word_matches(tokens[i + j], needle[j])) {
        all = false;
        break;
      }
    }
    if (all) ++count;
  }
  return count;
}

namespace {

long long whitespace_word_count(const std::string& s) {
  long long n = 0;
  bool in_word = false;
  for (char c : s) {
    bool space = std::isspace(static_cast<unsigned char>(c)) != 0;
    if (!space && !in_word) ++n;
    in_word = !space;
  }
  return n;
}

}  // namespace

ComparisonReport compare_corpora(const std::vector<Transcript>& a,
                                 const std::vector<Transcript>& b,
                                 const std::vector<std::string>& terms) {
  std::map<std::string, const Transcript*> by_id_b;
  for (const auto& t : b) by_id_b[t.lecture_id] = &t;
  std::map<std::string, bool> matched_b;

  ComparisonReport report;
  for (const auto& term : terms) report.term_rows.push_back({term, 0, 0});

  for (const auto& ta : a) {
    auto it = by_id_b.find(ta.lecture_id);
    if (it == by_id_b.end()) {
      report.orphans_a.push_back(ta.lecture_id);
      continue;
    }
    matched_b[ta.lecture_id] = true;
    const Transcript& tb = *it->second;

    std::string text_a = ta.full_text();
    std::string text_b = tb.full_text();
    LecturePair pair;
    pair.lecture_id = ta.lecture_id;
    pair.words_a = whitespace_word_count(text_a);
    pair.words_b = whitespace_word_count(text_b);
    if (pair.words_a == 0) {
      report.orphans_a.push_back(ta.lecture_id + " (no words)");
      continue;
    }
    pair.ratio = static_cast<double>(pair.words_b) / static_cast<double>(pair.words_a);
    report.pairs.push_back(pair);

    for (auto& row : report.term_rows) {
      row.count_a += count_term(text_a, row.term);
      row.count_b += count_term(text_b, row.term);
    }
  }
  for (const auto& tb : b) {
    if (!matched_b.count(tb.lecture_id)) report.orphans_b.push_back(tb.lecture_id);
  }
  if (report.pairs.empty())
    throw ValidationError("compare_corpora: no lecture pairs matched by id");
  return report;
}

namespace {

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

void append_row(std::string& out, const std::string& label, const std::string& value) {
  out += label;
  out += ": ";
  out += value;
  out += "\n";
}

}  // namespace

RenderedReport render_reports(const CorpusStats& stats,
                              const std::optional<ComparisonReport>& comparison,
                              const std::optional<RunReport>& analyses) {
  RenderedReport out;

  out.text += "Transcript quality\n";
  out.text += "------------------\n";
  append_row(out.text, "Lectures", std::to_string(stats.lecture_count));
  append_row(out.text, "Raw segments", text::format_thousands(stats.total_raw_segments));
  append_row(out.text, "Hallucination loops", std::to_string(stats.total_loops));
  append_row(out.text, "Segments removed", text::format_thousands(stats.total_removed_segments));
  append_row(out.text, "Time lost to loops", fixed(stats.total_removed_duration, 1) + " s");
  append_row(out.text, "Segments after cleaning",
             text::format_thousands(stats.total_clean_segments));

  out.machine["stats"] = {{"lectures", stats.lecture_count},
                          {"raw_segments", stats.total_raw_segments},
                          {"loops", stats.total_loops},
                          {"removed_segments", stats.total_removed_segments},
                          {"removed_duration_s", stats.total_removed_duration},
                          {"clean_segments", stats.total_clean_segments}};

  if (comparison) {
    out.text += "\nTranscript comparison (A vs B)\n";
    out.text += "------------------------------\n";
    ordered_json cmp;
    cmp["pairs"] = ordered_json::array();
    for (const auto& pair : comparison->pairs) {
      out.text += pair.lecture_id + ": words " + text::format_thousands(pair.words_a) + " vs " +
                  text::format_thousands(pair.words_b) + " (ratio " + fixed(pair.ratio, 2) +
                  ")\n";
      cmp["pairs"].push_back({{"lecture_id", pair.lecture_id},
                              {"words_a", pair.words_a},
                              {"words_b", pair.words_b},
                              {"ratio", pair.ratio}});
    }
    cmp["terms"] = ordered_json::array();
    for (const auto& row : comparison->term_rows) {
      out.text += "\"" + row.term + "\" (total): " + std::to_string(row.count_a) + " vs " +
                  std::to_string(row.count_b) + "\n";
      cmp["terms"].push_back(
          {{"term", row.term}, {"count_a", row.count_a}, {"count_b", row.count_b}});
    }
    cmp["orphans_a"] = comparison->orphans_a;
    cmp["orphans_b"] = comparison->orphans_b;
    for (const auto& orphan : comparison->orphans_a)
      out.text += "unmatched in A: " + orphan + "\n";
    for (const auto& orphan : comparison->orphans_b)
      out.text += "unmatched in B: " + orphan + "\n";
    out.machine["comparison"] = std::move(cmp);
  }

  if (analyses) {
    out.text += "\nAnalysis digest\n";
    out.text += "---------------\n";
    std::map<std::string, std::pair<int, int>> per_kind;  // kind -> (ok, failed)
    for (const auto& item : analyses->items) {
      auto& slot = per_kind[to_string(item.kind)];
      if (item.ok)
        ++slot.first;
      else
        ++slot.second;
    }
    append_row(out.text, "Lectures analyzed", std::to_string(analyses->lecture_count));
    for (const auto& [kind, counts] : per_kind) {
      append_row(out.text, kind,
                 std::to_string(counts.first) + " ok, " + std::to_string(counts.second) +
                     " failed");
    }
    if (analyses->bimodal_suspicion) {
      append_row(out.text, "Bimodal suspicion",
                 std::to_string(analyses->modal_lecture_count) + " lectures with exactly " +
                     std::to_string(analyses->modal_question_count) + " questions");
    }
    out.machine["analysis"] = to_json(*analyses);
  }

  return out;
}

}  // namespace lectern
