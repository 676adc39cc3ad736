// Instructor-facing reporting: transcript quality tables, ASR-to-ASR
// comparison, and analysis digests.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "lectern/analysis.hpp"
#include "lectern/transcript.hpp"

namespace lectern {

struct TermCountRow {
  std::string term;  // as declared, e.g. "thermodynamic(s)"
  long long count_a = 0;
  long long count_b = 0;
};

struct LecturePair {
  std::string lecture_id;
  long long words_a = 0;
  long long words_b = 0;
  double ratio = 0.0;  // words_b / words_a
};

struct ComparisonReport {
  std::vector<LecturePair> pairs;
  std::vector<TermCountRow> term_rows;
  std::vector<std::string> orphans_a;  // lecture ids present on one side only
  std::vector<std::string> orphans_b;
};

// Case-insensitive word-boundary occurrence count; hyphens act as spaces
// and multi-word terms match as contiguous word runs. A "(s)" suffix on a
// term word opts that word into plural-s folding ("thermodynamic(s)").
long long count_term(const std::string& text, const std::string& term);

// Pairs lectures of the two corpora by lecture_id, computes
// whitespace-token word counts and ratios, and sums the term rows over the
// matched pairs. Unmatched lectures are listed, not fatal; zero matched
// pairs is an error.
ComparisonReport compare_corpora(const std::vector<Transcript>& a,
                                 const std::vector<Transcript>& b,
                                 const std::vector<std::string>& terms);

struct RenderedReport {
  std::string text;
  nlohmann::ordered_json machine;  // report.json payload
};

// Deterministic rendering: same inputs, same bytes.
RenderedReport render_reports(const CorpusStats& stats,
                              const std::optional<ComparisonReport>& comparison,
                              const std::optional<RunReport>& analyses);

}  // namespace lectern
