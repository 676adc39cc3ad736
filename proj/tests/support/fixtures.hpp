// Shared fixture builders: the baseline and 39-lecture corpora modeled on
// the transcript-quality table, the textbook index and nav tree used by the
// retrieval tests, and a small analyzable lecture.
#pragma once

#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "lectern/book_index.hpp"
#include "lectern/transcript.hpp"

namespace lectern::testing {

// 826 raw segments containing the four uncontrolled-decoder loops:
// "Elizabeth." x37, "That's a lot." x10, "You told me to." x3, "Okay." x3.
inline Transcript baseline_transcript() {
  Transcript t;
  t.lecture_id = "lecture-baseline";
  double clock = 0.0;

  auto push_normal = [&](int i) {
    TranscriptSegment seg;
    seg.start = clock;
    seg.end = clock + 3.9;
    seg.text = "baseline segment " + std::to_string(i) + " discussing course material";
    clock = seg.end + 0.1;
    t.segments.push_back(std::move(seg));
  };
  auto push_loop = [&](const std::string& word, int count) {
    for (int i = 0; i < count; ++i) {
      TranscriptSegment seg;
      seg.start = clock;
      seg.end = clock + 1.0;  // the fabricated-timestamp signature
      seg.text = word;
      clock = seg.end;
      t.segments.push_back(std::move(seg));
    }
  };

  int normal = 0;
  auto normals_until = [&](int limit) {
    while (normal < limit) push_normal(normal++);
  };
  normals_until(120);
  push_loop("Elizabeth.", 37);
  normals_until(400);
  push_loop("That's a lot.", 10);
  normals_until(600);
  push_loop("You told me to.", 3);
  normals_until(700);
  push_loop("Okay.", 3);
  normals_until(773);
  return t;
}

// 39 lectures totaling 20,361 raw segments; the only loop is "What?" x5 in
// lecture-030, whose four removed segments last 1.25 s each (5.0 s total).
// Sessions 010 and 025 are exams (2 and 5 segments); 003 and 023 are empty.
inline std::vector<Transcript> corpus_39() {
  std::vector<Transcript> corpus;
  for (int n = 1; n <= 39; ++n) {
    Transcript t;
    char id[16];
    std::snprintf(id, sizeof(id), "lecture-%03d", n);
    t.lecture_id = id;

    int segment_count;
    if (n == 3 || n == 23)
      segment_count = 0;
    else if (n == 10)
      segment_count = 2;
    else if (n == 25)
      segment_count = 5;
    else if (n == 30)
      segment_count = 595;
    else
      segment_count = 581;

    double clock = 0.0;
    for (int i = 0; i < segment_count; ++i) {
      TranscriptSegment seg;
      seg.start = clock;
      seg.end = clock + 4.0;
      seg.text = "lecture " + std::to_string(n) + " segment " + std::to_string(i);
      clock = seg.end + 0.2;
      t.segments.push_back(std::move(seg));
      if (n == 30 && i == 299) {
        for (int k = 0; k < 5; ++k) {
          TranscriptSegment loop;
          loop.start = clock;
          loop.end = clock + 1.25;
          loop.text = "What?";
          clock = loop.end;
          t.segments.push_back(std::move(loop));
        }
      }
    }
    corpus.push_back(std::move(t));
  }
  return corpus;
}

// The retrieval fixture index. The five fugacity entries reproduce the
// worked example; Activity coefficient and Chemical potential sit past page
// 425 so LLM-expanded queries rank them sixth and later.
inline std::string fixture_index_json() {
  return R"json([
  {"topic": "Acidity of solutions", "subtopics": [
     {"topic": "buffer", "pages": [[516, 518]]},
     {"topic": "Henderson-Hasselbalch equation", "pages": [519]},
     {"topic": "strong acid with strong base", "pages": [[521, 523]]}
  ]},
  {"topic": "Activity coefficient", "pages": [[426, 430]]},
  {"topic": "Chemical potential", "pages": [[436, 438]]},
  {"topic": "Corresponding states", "pages": [[238, 243]], "subtopics": [
     {"topic": "fugacity coefficient", "pages": [[315, 316]]}
  ]},
  {"topic": "Entropy", "pages": [[100, 112]], "subtopics": [
     {"topic": "Entropy balance", "pages": [[130, 135]]},
     {"topic": "Entropy change", "pages": [[116, 120]]},
     {"topic": "Entropy generation", "pages": [[958, 962]]}
  ]},
  {"topic": "Equations of state", "pages": [[200, 210]]},
  {"topic": "Liquid(s)", "subtopics": [
     {"topic": "fugacity of", "pages": [[316, 317]]}
  ]},
  {"topic": "Peng-Robinson equation of state", "pages": [[250, 260]], "subtopics": [
     {"topic": "fugacity coefficient from", "pages": [[314, 317], [440, 442]]}
  ]},
  {"topic": "Phase equilibrium", "pages": [[420, 423]], "subtopics": [
     {"topic": "fugacity in", "pages": [[424, 425]]}
  ]},
  {"topic": "Solid(s)", "subtopics": [
     {"topic": "fugacity of", "pages": [320]}
  ]},
  {"topic": "van der Waals equation of state", "pages": [[225, 232]]}
])json";
}

inline std::string fixture_nav_json() {
  return R"json([
  {"number": "1", "title": "Introduction and Definitions", "first_page": 1},
  {"number": "4", "title": "Entropy: An Additional Balance Equation",
   "first_page": 100, "last_page": 160, "children": [
     {"number": "4.1", "title": "Entropy: A New Concept", "first_page": 100, "last_page": 115},
     {"number": "4.2", "title": "The Entropy Balance and Reversibility",
      "first_page": 116, "last_page": 135}
  ]},
  {"number": "7", "title": "Equilibrium and Stability in One-Component Systems",
   "first_page": 263, "last_page": 419, "children": [
     {"number": "7.4", "title": "The Molar Gibbs Energy and Fugacity of a Pure Component",
      "first_page": 310, "last_page": 345}
  ]},
  {"number": "9",
   "title": "Estimation of the Gibbs Energy and Fugacity of a Component in a Mixture",
   "first_page": 420, "last_page": 480, "children": [
     {"number": "9.2", "title": "The Partial Molar Gibbs Energy and Fugacity",
      "first_page": 423, "last_page": 445}
  ]},
  {"number": "15", "title": "Some Biochemical Applications of Thermodynamics",
   "first_page": 940, "last_page": 980, "children": [
     {"number": "15.7", "title": "Thermodynamic Analysis of Bioreactors",
      "first_page": 955, "last_page": 965}
  ]}
])json";
}

inline std::vector<IndexEntry> fixture_index() {
  return parse_index_json(fixture_index_json(), "fixture_index");
}

inline NavNode fixture_nav() {
  return parse_nav_tree_json(fixture_nav_json(), "fixture_nav");
}

// A 55-minute lecture with enough quotable sentences for the analysis
// mocks. All text original to this fixture.
inline Transcript lecture9_transcript() {
  Transcript t;
  t.lecture_id = "lecture-009";
  const std::vector<std::pair<double, std::string>> lines = {
      {12.0, "Today we start a new state function that decides which way a process can go."},
      {20.0, "What is entropy?"},
      {37.0, "Most of you have heard entropy described as disorder, and we will sharpen that."},
      {120.0, "Take an insulated box with a hot block and a cold block touching each other."},
      {243.0, "Can entropy be reduced?"},
      {400.0, "Heat flows from the hot block to the cold block and never the reverse."},
      {700.0, "When I was a graduate student my advisor made us compute this by hand."},
      {942.0, "Students keep asking how to decide the direction of a thermodynamic process."},
      {1100.0, "Think of energy like water in a tank on a hill; height decides where it flows."},
      {1500.0, "A famous nineteenth-century experiment showed stirring warms the water."},
      {2040.0, "How do we know which direction this process should run?"},
      {2200.0, "The balance equation gains a generation term that is never negative."},
      {2502.0, "So it's like if you want to remove all those gradients?"},
      {2704.0, "What do I mean by work is not the same? You can turn work into heat completely,"
               " but not the other way around."},
      {2900.0, "Here is a joke: a reversible process walks into a bar, infinitely slowly."},
      {3000.0, "On Thursday we apply the entropy balance to turbines and compressors."},
      {3100.0, "In the demonstration the gas expanded into the evacuated flask and the"
               " temperature barely moved."},
      {3240.0, "Remember: the generation term tells you whether your assumed direction is"
               " physical."},
  };
  for (const auto& [start, text] : lines) {
    t.segments.push_back({start, start + 8.0, text});
  }
  return t;
}

// Long synthetic lecture (> 8k chars) for the pass-2 prompt-size property.
inline Transcript long_lecture_transcript() {
  Transcript t;
  t.lecture_id = "lecture-long";
  double clock = 0.0;
  for (int i = 0; i < 220; ++i) {
    TranscriptSegment seg;
    seg.start = clock;
    seg.end = clock + 9.5;
    seg.text = "Segment " + std::to_string(i) +
               " keeps developing the energy balance with one more worked example.";
    clock = seg.end + 0.5;
    t.segments.push_back(std::move(seg));
  }
  t.segments.push_back({clock, clock + 8.0, "Is the assumption of constant heat capacity safe?"});
  return t;
}

class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::mt19937_64 rng(std::random_device{}());
    path_ = std::filesystem::temp_directory_path() /
            ("lectern-" + tag + "-" + std::to_string(rng()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace lectern::testing
