#include "lectern/transcript.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "lectern/errors.hpp"
#include "lectern/text_util.hpp"

namespace lectern {

using nlohmann::json;
using nlohmann::ordered_json;

bool Transcript::untimed() const {
  auto it = source_meta.find("untimed");
  return it != source_meta.end() && it->second == "true";
}

double Transcript::duration() const {
  return segments.empty() ? 0.0 : segments.back().end;
}

std::string Transcript::full_text() const {
  std::string out;
  for (const auto& seg : segments) {
    if (!out.empty()) out.push_back(' ');
    out += seg.text;
  }
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

Transcript from_segmented_json(const json& doc, const std::string& origin) {
  if (!doc.is_object())
    throw ParseError(origin + ": top level must be an object");
  if (!doc.contains("lecture_id") || !doc["lecture_id"].is_string())
    throw ParseError(origin + ": missing string field 'lecture_id'");
  if (!doc.contains("segments") || !doc["segments"].is_array())
    throw ParseError(origin + ": missing array field 'segments'");

  Transcript t;
  t.lecture_id = doc["lecture_id"].get<std::string>();
  if (t.lecture_id.empty()) throw ParseError(origin + ": empty lecture_id");

  if (doc.contains("meta")) {
    if (!doc["meta"].is_object()) throw ParseError(origin + ": 'meta' must be an object");
    for (auto& [k, v] : doc["meta"].items()) {
      if (!v.is_string()) throw ParseError(origin + ": meta['" + k + "'] must be a string");
      t.source_meta[k] = v.get<std::string>();
    }
  }
  t.source_meta["source_file"] = origin;

  int i = 0;
  for (const auto& s : doc["segments"]) {
    std::string where = origin + ": segments[" + std::to_string(i) + "]";
    if (!s.is_object()) throw ParseError(where + " must be an object");
    if (!s.contains("start") || !s["start"].is_number())
      throw ParseError(where + ": missing numeric 'start'");
    if (!s.contains("end") || !s["end"].is_number())
      throw ParseError(where + ": missing numeric 'end'");
    if (!s.contains("text") || !s["text"].is_string())
      throw ParseError(where + ": missing string 'text'");
    TranscriptSegment seg;
    seg.start = s["start"].get<double>();
    seg.end = s["end"].get<double>();
    seg.text = s["text"].get<std::string>();
    if (seg.start < 0) throw ParseError(where + ": negative start");
    if (!(seg.end > seg.start)) throw ParseError(where + ": end must be greater than start");
    if (text::trim(seg.text).empty()) throw ParseError(where + ": empty text");
    t.segments.push_back(std::move(seg));
    ++i;
  }

  bool sorted = std::is_sorted(t.segments.begin(), t.segments.end(),
                               [](const auto& a, const auto& b) { return a.start < b.start; });
  if (!sorted) {
    std::stable_sort(t.segments.begin(), t.segments.end(),
                     [](const auto& a, const auto& b) { return a.start < b.start; });
    t.source_meta["resorted"] = "true";
  }
  return t;
}

}  // namespace

Transcript parse_transcript_json(const std::string& content, const std::string& origin) {
  json doc;
  try {
    doc = json::parse(content);
  } catch (const json::parse_error& e) {
    throw ParseError(origin + ": JSON parse error at byte " + std::to_string(e.byte) + ": " +
                     e.what());
  }
  return from_segmented_json(doc, origin);
}

Transcript parse_transcript(const std::filesystem::path& path, TranscriptFormat format) {
  std::string content = read_file(path);
  if (format == TranscriptFormat::SegmentedJson)
    return parse_transcript_json(content, path.string());

  Transcript t;
  t.lecture_id = path.stem().string();
  t.source_meta["untimed"] = "true";
  t.source_meta["source_file"] = path.string();
  std::string body = text::trim(content);
  if (!body.empty()) t.segments.push_back({0.0, 0.0, std::move(body)});
  return t;
}

namespace {

struct LoopRun {
  size_t begin = 0;  // index of the retained first segment
  size_t length = 0;
  LoopRecord record;
};

std::vector<LoopRun> scan_loop_runs(const Transcript& t) {
  std::vector<LoopRun> runs;
  const auto& segs = t.segments;
  size_t i = 0;
  while (i < segs.size()) {
    std::string key = text::trim(segs[i].text);
    size_t j = i + 1;
    while (j < segs.size() && text::trim(segs[j].text) == key) ++j;
    size_t run = j - i;
    if (run >= 3) {
      LoopRecord rec;
      rec.text = key;
      rec.count = static_cast<int>(run);
      rec.first_start = segs[i].start;
      rec.last_end = segs[j - 1].end;
      rec.segments_removed = rec.count - 1;
      rec.uniform_one_second = true;
      rec.zero_gaps = true;
      for (size_t k = i; k < j; ++k) {
        if (k > i) rec.duration_removed += segs[k].end - segs[k].start;
        if (segs[k].end - segs[k].start != 1.0) rec.uniform_one_second = false;
        if (k > i && segs[k].start != segs[k - 1].end) rec.zero_gaps = false;
      }
      runs.push_back({i, run, std::move(rec)});
    }
    i = j;
  }
  return runs;
}

}  // namespace

std::vector<LoopRecord> detect_loops(const Transcript& t) {
  std::vector<LoopRecord> loops;
  for (auto& run : scan_loop_runs(t)) loops.push_back(std::move(run.record));
  return loops;
}

std::pair<Transcript, CleanReport> clean_transcript(const Transcript& t) {
  CleanReport report;
  report.raw_segment_count = static_cast<int>(t.segments.size());

  std::vector<LoopRun> runs = scan_loop_runs(t);

  Transcript cleaned;
  cleaned.lecture_id = t.lecture_id;
  cleaned.source_meta = t.source_meta;

  // Keep the first segment of every loop; everything else passes through
  // in order.
  size_t run_idx = 0;
  size_t i = 0;
  while (i < t.segments.size()) {
    if (run_idx < runs.size() && runs[run_idx].begin == i) {
      const LoopRun& run = runs[run_idx];
      cleaned.segments.push_back(t.segments[i]);
      i += run.length;
      report.removed_segment_count += run.record.segments_removed;
      report.removed_duration += run.record.duration_removed;
      ++run_idx;
    } else {
      cleaned.segments.push_back(t.segments[i]);
      ++i;
    }
  }
  for (auto& run : runs) report.loops.push_back(std::move(run.record));
  report.clean_segment_count = report.raw_segment_count - report.removed_segment_count;
  return {std::move(cleaned), std::move(report)};
}

CorpusStats corpus_stats(const std::vector<Transcript>& transcripts,
                         const std::vector<std::pair<std::string, CleanReport>>& reports) {
  std::map<std::string, const CleanReport*> by_id;
  for (const auto& [id, rep] : reports) by_id[id] = &rep;

  std::vector<std::string> orphan_transcripts;
  std::vector<std::string> orphan_reports;
  for (const auto& t : transcripts) {
    if (by_id.find(t.lecture_id) == by_id.end()) orphan_transcripts.push_back(t.lecture_id);
  }
  {
    std::map<std::string, bool> seen;
    for (const auto& t : transcripts) seen[t.lecture_id] = true;
    for (const auto& [id, rep] : reports) {
      if (!seen.count(id)) orphan_reports.push_back(id);
    }
  }
  if (!orphan_transcripts.empty() || !orphan_reports.empty()) {
    std::string msg = "corpus_stats: mismatched lecture ids;";
    if (!orphan_transcripts.empty()) {
      msg += " transcripts without reports:";
      for (const auto& id : orphan_transcripts) msg += " " + id;
      msg += ";";
    }
    if (!orphan_reports.empty()) {
      msg += " reports without transcripts:";
      for (const auto& id : orphan_reports) msg += " " + id;
    }
    throw ValidationError(msg);
  }

  CorpusStats stats;
  stats.lecture_count = static_cast<int>(transcripts.size());
  for (const auto& t : transcripts) {
    const CleanReport& rep = *by_id.at(t.lecture_id);
    stats.total_raw_segments += rep.raw_segment_count;
    stats.total_clean_segments += rep.clean_segment_count;
    stats.total_removed_segments += rep.removed_segment_count;
    stats.total_loops += static_cast<int>(rep.loops.size());
    stats.total_removed_duration += rep.removed_duration;
  }
  return stats;
}

std::string cleaned_transcript_to_json(const Transcript& t, const CleanReport& report) {
  ordered_json doc;
  doc["lecture_id"] = t.lecture_id;
  doc["segments"] = ordered_json::array();
  for (const auto& seg : t.segments) {
    doc["segments"].push_back({{"start", seg.start}, {"end", seg.end}, {"text", seg.text}});
  }
  if (!t.source_meta.empty()) {
    ordered_json meta = ordered_json::object();
    for (const auto& [k, v] : t.source_meta) meta[k] = v;
    doc["meta"] = std::move(meta);
  }
  ordered_json loops = ordered_json::array();
  for (const auto& loop : report.loops) {
    loops.push_back({{"text", loop.text},
                     {"count", loop.count},
                     {"first_start", loop.first_start},
                     {"last_end", loop.last_end},
                     {"duration_removed_s", loop.duration_removed}});
  }
  doc["clean_report"] = {{"raw_segments", report.raw_segment_count},
                         {"removed_segments", report.removed_segment_count},
                         {"removed_duration_s", report.removed_duration},
                         {"loops", std::move(loops)}};
  return doc.dump(2) + "\n";
}

std::pair<Transcript, std::optional<CleanReport>> read_transcript_file(
    const std::filesystem::path& path) {
  std::string content = read_file(path);
  Transcript t = parse_transcript_json(content, path.string());

  json doc = json::parse(content);
  if (!doc.contains("clean_report")) return {std::move(t), std::nullopt};
  const json& cr = doc["clean_report"];
  std::string where = path.string() + ": clean_report";
  if (!cr.is_object() || !cr.contains("raw_segments") || !cr.contains("removed_segments") ||
      !cr.contains("removed_duration_s") || !cr.contains("loops") || !cr["loops"].is_array())
    throw ParseError(where + " has the wrong shape");

  CleanReport report;
  report.raw_segment_count = cr["raw_segments"].get<int>();
  report.removed_segment_count = cr["removed_segments"].get<int>();
  report.removed_duration = cr["removed_duration_s"].get<double>();
  for (const auto& l : cr["loops"]) {
    LoopRecord rec;
    rec.text = l.at("text").get<std::string>();
    rec.count = l.at("count").get<int>();
    rec.first_start = l.at("first_start").get<double>();
    rec.last_end = l.at("last_end").get<double>();
    rec.duration_removed = l.at("duration_removed_s").get<double>();
    rec.segments_removed = rec.count - 1;
    report.loops.push_back(std::move(rec));
  }
  report.clean_segment_count = report.raw_segment_count - report.removed_segment_count;
  return {std::move(t), std::move(report)};
}

}  // namespace lectern
