// Hierarchical textbook index (bindex_tab.json) and TOC navigation tree
// (ftoc_nav_tree.json): parsing, page-to-chapter lookup, vocabulary prompts.
#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace lectern {

struct PageRange {
  int first = 0;
  int last = 0;

  bool intersects(const PageRange& other) const {
    return first <= other.last && other.first <= last;
  }
};

struct IndexEntry {
  std::string topic;
  std::vector<PageRange> pages;
  std::vector<IndexEntry> subtopics;
  std::vector<std::string> path;  // ancestor topics, root first (excludes self)

  // Smallest first page across ranges; nullopt when the entry has none.
  std::optional<int> first_page() const;
  std::vector<std::string> full_path() const;
};

enum class NavKind { Book, Chapter, Section };

struct NavNode {
  NavKind kind = NavKind::Chapter;
  std::string number;  // "7", "7.4"
  std::string title;
  int first_page = 0;
  int last_page = 0;
  std::vector<NavNode> children;
};

struct PageContext {
  std::string chapter_number;
  std::string chapter_title;
  std::optional<std::string> section_number;
  std::optional<std::string> section_title;
};

// Parses bindex_tab.json: an array of nodes
// {topic, pages: [[first,last] | page, ...], subtopics: [...]}.
// A bare integer page p is shorthand for [p, p]. Errors name the node path.
std::vector<IndexEntry> parse_index(const std::filesystem::path& path);
std::vector<IndexEntry> parse_index_json(const std::string& content, const std::string& origin);

// Total number of entries including subtopics.
int index_entry_count(const std::vector<IndexEntry>& index);

// Re-serializes an index in the canonical list-of-pairs form.
std::string index_to_json(const std::vector<IndexEntry>& index);

// Parses ftoc_nav_tree.json: an array of chapter nodes
// {number, title, first_page, last_page?, children: [...]}. A chapter
// without last_page is closed by the next sibling's first_page - 1; the
// final chapter must state it. Sections close the same way, with the last
// one inheriting its parent's last page. The returned root is a synthetic
// Book node spanning all chapters. Invariants (child spans inside parents,
// ordered non-overlapping siblings) are validated here.
NavNode parse_nav_tree(const std::filesystem::path& path);
NavNode parse_nav_tree_json(const std::string& content, const std::string& origin);

// Deepest node containing the page decides the section fields; the
// enclosing chapter fills the chapter fields. Not-found is a normal result.
std::optional<PageContext> locate_page(const NavNode& root, int page);

// "314--317, 440--442"; a single-page range collapses to "320".
std::string render_pages(const std::vector<PageRange>& pages);

// Comma-separated topic list for an ASR vocabulary prompt: topics whose
// pages intersect the window (all topics when absent), deduplicated
// case-insensitively, ordered by first page then alphabetically, cut off
// so the result stays within budget * 4 characters. Topics are never
// split mid-phrase.
std::string vocabulary_prompt(const std::vector<IndexEntry>& index,
                              const std::optional<PageRange>& page_window, int budget_tokens);

}  // namespace lectern
