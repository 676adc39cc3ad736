// Timestamped lecture transcripts: parsing, hallucination-loop removal,
// per-lecture and per-corpus quality statistics.
#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace lectern {

struct TranscriptSegment {
  double start = 0.0;  // seconds
  double end = 0.0;    // seconds, > start for timed segments
  std::string text;    // non-empty after trimming
};

struct Transcript {
  std::string lecture_id;
  std::vector<TranscriptSegment> segments;          // sorted by start
  std::map<std::string, std::string> source_meta;   // model, parameters, source file

  bool untimed() const;
  // End of the last segment; 0 for empty transcripts.
  double duration() const;
  // Segment texts joined with single spaces.
  std::string full_text() const;
};

// One detected repetition loop. The fabricated-timestamp signatures
// (uniform 1.0 s durations, zero inter-segment gaps) are advisory flags;
// run length alone decides removal.
struct LoopRecord {
  std::string text;
  int count = 0;               // >= 3
  double first_start = 0.0;
  double last_end = 0.0;
  double duration_removed = 0.0;  // summed over the removed segments
  int segments_removed = 0;       // count - 1
  bool uniform_one_second = false;
  bool zero_gaps = false;
};

struct CleanReport {
  int raw_segment_count = 0;
  int removed_segment_count = 0;
  double removed_duration = 0.0;
  std::vector<LoopRecord> loops;
  int clean_segment_count = 0;
};

struct CorpusStats {
  int lecture_count = 0;
  long long total_raw_segments = 0;
  long long total_clean_segments = 0;
  long long total_removed_segments = 0;
  int total_loops = 0;
  double total_removed_duration = 0.0;
};

enum class TranscriptFormat { SegmentedJson, PlainText };

// Parses a transcript file. Segmented JSON must carry lecture_id and a
// segments array; out-of-order segments are re-sorted (noted in
// source_meta["resorted"]). Plain text yields one untimed segment with
// start = end = 0 and source_meta["untimed"] = "true". An empty segment
// array is not an error: exam sessions legitimately produce almost none.
Transcript parse_transcript(const std::filesystem::path& path, TranscriptFormat format);

// Parses the segmented-JSON shape from an in-memory string (same rules).
Transcript parse_transcript_json(const std::string& content, const std::string& origin);

// Maximal runs of >= 3 consecutive segments with identical trimmed text.
std::vector<LoopRecord> detect_loops(const Transcript& t);

// Removes all but the first segment of every detected loop. Idempotent.
std::pair<Transcript, CleanReport> clean_transcript(const Transcript& t);

// Aggregates per-lecture reports; both lists must cover the same lecture
// ids or a ValidationError listing the orphans is thrown.
CorpusStats corpus_stats(const std::vector<Transcript>& transcripts,
                         const std::vector<std::pair<std::string, CleanReport>>& reports);

// Serializes a cleaned transcript plus its clean_report to the documented
// file schema.
std::string cleaned_transcript_to_json(const Transcript& t, const CleanReport& report);

// Reads a transcript file that may carry a clean_report object.
std::pair<Transcript, std::optional<CleanReport>> read_transcript_file(
    const std::filesystem::path& path);

}  // namespace lectern
