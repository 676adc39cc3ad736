// Index search and the max-score merge of the two extraction paths,
// plus filtering, page-ordered ranking, and context assembly.
#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "lectern/book_index.hpp"
#include "lectern/term_extract.hpp"

namespace lectern {

struct ScoredMatch {
  std::vector<std::string> topic_path;  // root -> leaf
  std::vector<PageRange> pages;
  double score = 0.0;
  TermOrigin origin = TermOrigin::Pattern;
  std::vector<std::string> matched_terms;
};

struct MergedMatch {
  std::vector<std::string> topic_path;
  std::vector<PageRange> pages;
  double score = 0.0;  // max of the per-path scores, never a blend
  std::set<TermOrigin> sources;

  std::optional<int> first_page() const;
};

struct ContextEntry {
  int rank = 0;
  std::string topic_path;  // joined with " > "
  std::string pages;       // rendered, e.g. "314--317, 440--442"
  std::optional<PageContext> location;
};

struct ContextBlock {
  std::vector<ContextEntry> entries;
  std::string rendered_text;
};

// Walks the index recursively. An entry matches when >= 1 term occurs
// word-boundary (case-insensitive, hyphens as spaces) in its joined topic
// path. Score: sum over distinct matched terms t of charlen(t), +5 per
// term the entry's own topic starts with; LLM-origin terms add a one-off
// page bonus round(5 * (1 - first_page / max_page)) favoring earlier
// pages. Entries without pages are still returned; they are dropped later.
std::vector<ScoredMatch> search_index(const TermSet& terms, const std::vector<IndexEntry>& index,
                                      const NavNode& nav);

// Groups by (topic path, first page) and keeps the maximum score with the
// union of sources. Deliberately asymmetric: an entry found by one path
// only keeps its full score.
std::vector<MergedMatch> merge_max(const std::vector<ScoredMatch>& pattern_results,
                                   const std::vector<ScoredMatch>& llm_results);

// Drops matches below the threshold and matches without pages, then sorts
// by first page ascending, score descending, topic path — a total order.
std::vector<MergedMatch> filter_and_order(std::vector<MergedMatch> matches, double threshold);

// Renders the top k matches with chapter/section enrichment:
//   N. <path joined by " > "> (pages A--B[, C--D])
//      Location: Chapter X, Section X.Y (<title>)
ContextBlock assemble_context(const std::vector<MergedMatch>& matches, const NavNode& nav,
                              int k = 5);

// The scored-match debug dump ("why was this returned").
std::string merged_matches_to_json(const std::vector<MergedMatch>& matches);

}  // namespace lectern
