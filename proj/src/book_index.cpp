#include "lectern/book_index.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include <json.hpp>

#include "lectern/errors.hpp"
#include "lectern/text_util.hpp"

namespace lectern {

using nlohmann::json;
using nlohmann::ordered_json;

std::optional<int> IndexEntry::first_page() const {
  std::optional<int> best;
  for (const auto& r : pages) {
    if (!best || r.first < *best) best = r.first;
  }
  return best;
}

std::vector<std::string> IndexEntry::full_path() const {
  std::vector<std::string> out = path;
  out.push_back(topic);
  return out;
}

namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

constexpr int kMaxIndexDepth = 32;

IndexEntry parse_index_node(const json& node, const std::string& node_path,
                            const std::vector<std::string>& ancestors, int depth) {
  if (depth > kMaxIndexDepth)
    throw ParseError("index node " + node_path + ": nesting deeper than " +
                     std::to_string(kMaxIndexDepth) + " levels");
  if (!node.is_object()) throw ParseError("index node " + node_path + " must be an object");
  if (!node.contains("topic") || !node["topic"].is_string() ||
      node["topic"].get<std::string>().empty())
    throw ParseError("index node " + node_path + ": missing non-empty 'topic'");

  IndexEntry entry;
  entry.topic = node["topic"].get<std::string>();
  entry.path = ancestors;
  std::string here = node_path + "/" + entry.topic;

  if (node.contains("pages")) {
    if (!node["pages"].is_array()) throw ParseError("index node " + here + ": 'pages' must be an array");
    for (const auto& p : node["pages"]) {
      PageRange range;
      if (p.is_number_integer()) {
        range.first = range.last = p.get<int>();
      } else if (p.is_array() && p.size() == 2 && p[0].is_number_integer() &&
                 p[1].is_number_integer()) {
        range.first = p[0].get<int>();
        range.last = p[1].get<int>();
      } else {
        throw ParseError("index node " + here + ": page entry must be an integer or [first, last]");
      }
      if (range.first < 1 || range.last < 1)
        throw ParseError("index node " + here + ": page numbers must be positive");
      if (range.first > range.last)
        throw ParseError("index node " + here + ": inverted range [" +
                         std::to_string(range.first) + ", " + std::to_string(range.last) + "]");
      entry.pages.push_back(range);
    }
  }

  if (node.contains("subtopics")) {
    if (!node["subtopics"].is_array())
      throw ParseError("index node " + here + ": 'subtopics' must be an array");
    std::vector<std::string> child_ancestors = ancestors;
    child_ancestors.push_back(entry.topic);
    for (const auto& sub : node["subtopics"]) {
      entry.subtopics.push_back(parse_index_node(sub, here, child_ancestors, depth + 1));
    }
  }
  return entry;
}

}  // namespace

std::vector<IndexEntry> parse_index_json(const std::string& content, const std::string& origin) {
  json doc;
  try {
    doc = json::parse(content);
  } catch (const json::parse_error& e) {
    throw ParseError(origin + ": JSON parse error at byte " + std::to_string(e.byte) + ": " +
                     e.what());
  }
  if (!doc.is_array()) throw ParseError(origin + ": top level must be an array of index nodes");
  std::vector<IndexEntry> index;
  for (const auto& node : doc) index.push_back(parse_index_node(node, origin, {}, 0));
  return index;
}

std::vector<IndexEntry> parse_index(const std::filesystem::path& path) {
  return parse_index_json(read_file(path), path.string());
}

int index_entry_count(const std::vector<IndexEntry>& index) {
  int n = 0;
  for (const auto& e : index) {
    n += 1 + index_entry_count(e.subtopics);
  }
  return n;
}

namespace {

ordered_json index_entry_to_json(const IndexEntry& entry) {
  ordered_json node;
  node["topic"] = entry.topic;
  node["pages"] = ordered_json::array();
  for (const auto& r : entry.pages) node["pages"].push_back({r.first, r.last});
  node["subtopics"] = ordered_json::array();
  for (const auto& sub : entry.subtopics) node["subtopics"].push_back(index_entry_to_json(sub));
  return node;
}

}  // namespace

std::string index_to_json(const std::vector<IndexEntry>& index) {
  ordered_json doc = ordered_json::array();
  for (const auto& e : index) doc.push_back(index_entry_to_json(e));
  return doc.dump(2) + "\n";
}

namespace {

std::string nav_label(const NavNode& n) {
  return (n.kind == NavKind::Chapter ? "chapter " : "section ") + n.number + " (" +
         std::to_string(n.first_page) + "-" + std::to_string(n.last_page) + ")";
}

NavNode parse_nav_node(const json& node, const std::string& origin, int depth) {
  std::string where = origin + ": nav node";
  if (!node.is_object()) throw ParseError(where + " must be an object");
  NavNode out;
  out.kind = depth == 0 ? NavKind::Chapter : NavKind::Section;
  if (node.contains("kind")) {
    std::string k = node["kind"].get<std::string>();
    if (k == "chapter")
      out.kind = NavKind::Chapter;
    else if (k == "section")
      out.kind = NavKind::Section;
    else
      throw ParseError(where + ": unknown kind '" + k + "'");
  }
  if (!node.contains("number") || !node["number"].is_string())
    throw ParseError(where + ": missing string 'number'");
  out.number = node["number"].get<std::string>();
  if (!node.contains("title") || !node["title"].is_string())
    throw ParseError(origin + ": node " + out.number + ": missing string 'title'");
  out.title = node["title"].get<std::string>();
  if (!node.contains("first_page") || !node["first_page"].is_number_integer())
    throw ParseError(origin + ": node " + out.number + ": missing integer 'first_page'");
  out.first_page = node["first_page"].get<int>();
  if (out.first_page < 1)
    throw ParseError(origin + ": node " + out.number + ": first_page must be positive");
  out.last_page = node.contains("last_page") ? node["last_page"].get<int>() : 0;  // 0 = open

  if (node.contains("children")) {
    if (!node["children"].is_array())
      throw ParseError(origin + ": node " + out.number + ": 'children' must be an array");
    for (const auto& c : node["children"]) out.children.push_back(parse_nav_node(c, origin, depth + 1));
  }
  return out;
}

// Closes open spans against the next sibling and validates the tree.
void finalize_nav_children(NavNode& parent, const std::string& origin) {
  auto& kids = parent.children;
  for (size_t i = 0; i < kids.size(); ++i) {
    if (kids[i].last_page == 0) {
      if (i + 1 < kids.size()) {
        kids[i].last_page = kids[i + 1].first_page - 1;
      } else if (parent.kind != NavKind::Book) {
        kids[i].last_page = parent.last_page;
      } else {
        throw ParseError(origin + ": final chapter " + kids[i].number +
                         " needs an explicit last_page");
      }
    }
    if (kids[i].first_page > kids[i].last_page)
      throw ValidationError(origin + ": " + nav_label(kids[i]) + " has an inverted span");
  }
  for (size_t i = 0; i + 1 < kids.size(); ++i) {
    if (kids[i + 1].first_page <= kids[i].last_page)
      throw ValidationError(origin + ": sibling spans overlap or are out of order: " +
                            nav_label(kids[i]) + " and " + nav_label(kids[i + 1]));
  }
  for (auto& kid : kids) {
    if (parent.kind != NavKind::Book &&
        (kid.first_page < parent.first_page || kid.last_page > parent.last_page))
      throw ValidationError(origin + ": " + nav_label(kid) + " extends beyond its parent " +
                            nav_label(parent));
    finalize_nav_children(kid, origin);
  }
}

}  // namespace

NavNode parse_nav_tree_json(const std::string& content, const std::string& origin) {
  json doc;
  try {
    doc = json::parse(content);
  } catch (const json::parse_error& e) {
    throw ParseError(origin + ": JSON parse error at byte " + std::to_string(e.byte) + ": " +
                     e.what());
  }
  if (!doc.is_array()) throw ParseError(origin + ": top level must be an array of chapters");

  NavNode root;
  root.kind = NavKind::Book;
  for (const auto& node : doc) root.children.push_back(parse_nav_node(node, origin, 0));
  finalize_nav_children(root, origin);
  if (!root.children.empty()) {
    root.first_page = root.children.front().first_page;
    root.last_page = root.children.back().last_page;
  }
  return root;
}

NavNode parse_nav_tree(const std::filesystem::path& path) {
  return parse_nav_tree_json(read_file(path), path.string());
}

namespace {

// Deepest descendant of `node` containing `page`, or null.
const NavNode* deepest_containing(const NavNode& node, int page) {
  for (const auto& child : node.children) {
    if (page >= child.first_page && page <= child.last_page) {
      const NavNode* deeper = deepest_containing(child, page);
      return deeper ? deeper : &child;
    }
  }
  return nullptr;
}

}  // namespace

std::optional<PageContext> locate_page(const NavNode& root, int page) {
  const NavNode* chapter = nullptr;
  for (const auto& ch : root.children) {
    if (page >= ch.first_page && page <= ch.last_page) {
      chapter = &ch;
      break;
    }
  }
  if (!chapter) return std::nullopt;

  PageContext ctx;
  ctx.chapter_number = chapter->number;
  ctx.chapter_title = chapter->title;
  if (const NavNode* deepest = deepest_containing(*chapter, page)) {
    ctx.section_number = deepest->number;
    ctx.section_title = deepest->title;
  }
  return ctx;
}

std::string render_pages(const std::vector<PageRange>& pages) {
  std::string out;
  for (const auto& r : pages) {
    if (!out.empty()) out += ", ";
    out += std::to_string(r.first);
    if (r.last != r.first) out += "--" + std::to_string(r.last);
  }
  return out;
}

std::string vocabulary_prompt(const std::vector<IndexEntry>& index,
                              const std::optional<PageRange>& page_window, int budget_tokens) {
  if (budget_tokens <= 0) throw ValidationError("vocabulary_prompt: budget must be positive");

  struct Candidate {
    int first_page;
    std::string sort_key;  // lowercased topic
    const IndexEntry* entry;
  };
  std::vector<Candidate> candidates;

  auto visit = [&](auto&& self, const std::vector<IndexEntry>& entries) -> void {
    for (const auto& e : entries) {
      bool keep;
      if (page_window) {
        keep = std::any_of(e.pages.begin(), e.pages.end(),
                           [&](const PageRange& r) { return r.intersects(*page_window); });
      } else {
        keep = true;
      }
      if (keep) {
        int fp = e.first_page().value_or(std::numeric_limits<int>::max());
        candidates.push_back({fp, text::to_lower(e.topic), &e});
      }
      self(self, e.subtopics);
    }
  };
  visit(visit, index);

  std::stable_sort(candidates.begin(), candidates.end(), [](const auto& a, const auto& b) {
    if (a.first_page != b.first_page) return a.first_page < b.first_page;
    return a.sort_key < b.sort_key;
  });

  const size_t char_budget = static_cast<size_t>(budget_tokens) * 4;
  std::string out;
  std::map<std::string, bool> seen;
  for (const auto& c : candidates) {
    if (seen.count(c.sort_key)) continue;
    size_t needed = c.entry->topic.size() + (out.empty() ? 0 : 2);
    if (out.size() + needed > char_budget) break;
    if (!out.empty()) out += ", ";
    out += c.entry->topic;
    seen[c.sort_key] = true;
  }
  return out;
}

}  // namespace lectern
