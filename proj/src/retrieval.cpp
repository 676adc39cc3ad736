#include "lectern/retrieval.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <json.hpp>

#include "lectern/text_util.hpp"

namespace lectern {

std::optional<int> MergedMatch::first_page() const {
  std::optional<int> best;
  for (const auto& r : pages) {
    if (!best || r.first < *best) best = r.first;
  }
  return best;
}

namespace {

std::string join_path(const std::vector<std::string>& path) {
  std::string out;
  for (const auto& p : path) {
    if (!out.empty()) out += " > ";
    out += p;
  }
  return out;
}

std::optional<int> entry_first_page(const std::vector<PageRange>& pages) {
  std::optional<int> best;
  for (const auto& r : pages) {
    if (!best || r.first < *best) best = r.first;
  }
  return best;
}

void score_entry(const IndexEntry& entry, const TermSet& terms,
                 const std::vector<std::vector<std::string>>& term_tokens, int max_page,
                 std::vector<ScoredMatch>& out) {
  std::vector<std::string> path_tokens = text::words(join_path(entry.full_path()));
  std::vector<std::string> topic_tokens = text::words(entry.topic);

  double score = 0.0;
  std::vector<std::string> matched;
  for (size_t i = 0; i < terms.terms.size(); ++i) {
    const auto& tokens = term_tokens[i];
    if (tokens.empty() || !text::contains_seq(path_tokens, tokens)) continue;
    matched.push_back(terms.terms[i]);
    score += static_cast<double>(text::alnum_count(terms.terms[i]));
    if (text::starts_with_seq(topic_tokens, tokens)) score += 5.0;
  }

  if (!matched.empty()) {
    if (terms.origin == TermOrigin::Llm && max_page > 0) {
      if (auto fp = entry_first_page(entry.pages)) {
        score += static_cast<double>(
            std::lround(5.0 * (1.0 - static_cast<double>(*fp) / max_page)));
      }
    }
    ScoredMatch match;
    match.topic_path = entry.full_path();
    match.pages = entry.pages;
    match.score = score;
    match.origin = terms.origin;
    match.matched_terms = std::move(matched);
    out.push_back(std::move(match));
  }

  for (const auto& sub : entry.subtopics) score_entry(sub, terms, term_tokens, max_page, out);
}

}  // namespace

std::vector<ScoredMatch> search_index(const TermSet& terms, const std::vector<IndexEntry>& index,
                                      const NavNode& nav) {
  std::vector<std::vector<std::string>> term_tokens;
  term_tokens.reserve(terms.terms.size());
  for (const auto& t : terms.terms) term_tokens.push_back(text::words(t));

  std::vector<ScoredMatch> out;
  for (const auto& entry : index) score_entry(entry, terms, term_tokens, nav.last_page, out);
  return out;
}

namespace {

struct MergeKey {
  std::string path;
  int first_page;

  bool operator<(const MergeKey& other) const {
    if (path != other.path) return path < other.path;
    return first_page < other.first_page;
  }
};

MergeKey key_of(const ScoredMatch& m) {
  return {join_path(m.topic_path), entry_first_page(m.pages).value_or(0)};
}

}  // namespace

std::vector<MergedMatch> merge_max(const std::vector<ScoredMatch>& pattern_results,
                                   const std::vector<ScoredMatch>& llm_results) {
  std::map<MergeKey, MergedMatch> merged;
  auto absorb = [&](const std::vector<ScoredMatch>& results) {
    for (const auto& m : results) {
      MergeKey key = key_of(m);
      auto it = merged.find(key);
      if (it == merged.end()) {
        MergedMatch mm;
        mm.topic_path = m.topic_path;
        mm.pages = m.pages;
        mm.score = m.score;
        mm.sources.insert(m.origin);
        merged.emplace(std::move(key), std::move(mm));
      } else {
        it->second.score = std::max(it->second.score, m.score);
        it->second.sources.insert(m.origin);
      }
    }
  };
  absorb(pattern_results);
  absorb(llm_results);

  std::vector<MergedMatch> out;
  out.reserve(merged.size());
  for (auto& [key, mm] : merged) out.push_back(std::move(mm));
  return out;
}

std::vector<MergedMatch> filter_and_order(std::vector<MergedMatch> matches, double threshold) {
  matches.erase(std::remove_if(matches.begin(), matches.end(),
                               [&](const MergedMatch& m) {
                                 return m.score < threshold || !m.first_page().has_value();
                               }),
                matches.end());
  std::sort(matches.begin(), matches.end(), [](const MergedMatch& a, const MergedMatch& b) {
    int pa = *a.first_page();
    int pb = *b.first_page();
    if (pa != pb) return pa < pb;
    if (a.score != b.score) return a.score > b.score;
    return a.topic_path < b.topic_path;
  });
  return matches;
}

ContextBlock assemble_context(const std::vector<MergedMatch>& matches, const NavNode& nav, int k) {
  ContextBlock block;
  int n = std::min<int>(k, static_cast<int>(matches.size()));
  for (int i = 0; i < n; ++i) {
    const MergedMatch& m = matches[i];
    ContextEntry entry;
    entry.rank = i + 1;
    entry.topic_path = join_path(m.topic_path);
    entry.pages = render_pages(m.pages);
    if (auto fp = m.first_page()) entry.location = locate_page(nav, *fp);

    block.rendered_text += std::to_string(entry.rank) + ". " + entry.topic_path + " (pages " +
                           entry.pages + ")\n";
    if (entry.location) {
      const PageContext& loc = *entry.location;
      block.rendered_text += "   Location: Chapter " + loc.chapter_number;
      if (loc.section_number) block.rendered_text += ", Section " + *loc.section_number;
      if (loc.section_title)
        block.rendered_text += " (" + *loc.section_title + ")";
      else if (!loc.chapter_title.empty())
        block.rendered_text += " (" + loc.chapter_title + ")";
      block.rendered_text += "\n";
    } else {
      block.rendered_text += "   Location: unknown\n";
    }
    block.entries.push_back(std::move(entry));
  }
  return block;
}

std::string merged_matches_to_json(const std::vector<MergedMatch>& matches) {
  nlohmann::ordered_json doc = nlohmann::ordered_json::array();
  for (const auto& m : matches) {
    nlohmann::ordered_json sources = nlohmann::ordered_json::array();
    if (m.sources.count(TermOrigin::Pattern)) sources.push_back("pattern");
    if (m.sources.count(TermOrigin::Llm)) sources.push_back("llm");
    nlohmann::ordered_json pages = nlohmann::ordered_json::array();
    for (const auto& r : m.pages) pages.push_back({r.first, r.last});
    doc.push_back({{"topic_path", join_path(m.topic_path)},
                   {"pages", std::move(pages)},
                   {"score", m.score},
                   {"sources", std::move(sources)}});
  }
  return doc.dump(2) + "\n";
}

}  // namespace lectern
