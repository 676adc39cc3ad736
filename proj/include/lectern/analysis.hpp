// The four structured lecture analyses (summary, questions, confusion,
// anecdotes) over cleaned transcripts, including the two-pass question
// architecture and confusion deduplication.
#pragma once

#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "lectern/llm_gateway.hpp"
#include "lectern/transcript.hpp"

namespace lectern {

enum class AnalysisKind { Summary, Questions, Confusion, Anecdotes };
enum class LectureType { NewMaterial, Review, ProblemSolving, Exam, Other };
enum class Speaker { Student, Instructor };
enum class QuestionType { Conceptual, Clarification, Procedural, Socratic };
enum class Relevance { High, Medium, Low };
enum class Severity { Minor, Moderate, Significant };
enum class AnecdoteCategory {
  Anecdote,
  Analogy,
  Joke,
  RealWorldExample,
  Demonstration,
  HistoricalNote,
  Story
};

std::string to_string(AnalysisKind k);
std::string to_string(LectureType t);
std::string to_string(Speaker s);
std::string to_string(QuestionType q);
std::string to_string(Relevance r);
std::string to_string(Severity s);
std::string to_string(AnecdoteCategory c);

// Tolerant parsers: case-insensitive, spaces and hyphens fold to
// underscores. Unknown values fall back to the given default and append a
// note, mirroring the closed-set normalization rules.
AnalysisKind parse_analysis_kind(const std::string& s);  // throws ValidationError on unknown
std::set<AnalysisKind> parse_kind_list(const std::string& csv);

struct TopicNote {
  std::string name;
  std::string description;
};

struct SummaryRecord {
  std::string title;
  LectureType lecture_type = LectureType::Other;
  std::vector<TopicNote> topics;
  std::vector<std::string> key_concepts;
  std::vector<std::string> key_equations;
  std::string narrative;
};

struct QuestionCandidate {
  double timestamp = 0.0;
  std::string speaker_guess;
  std::string text;  // verbatim quote, grounding-checked
};

struct QuestionRecord {
  double timestamp = 0.0;
  Speaker speaker = Speaker::Student;
  QuestionType qtype = QuestionType::Conceptual;
  Relevance relevance = Relevance::Medium;
  std::string text;
};

struct ConfusionRecord {
  double timestamp = 0.0;
  std::string topic;
  std::string evidence;
  Severity severity = Severity::Minor;
};

struct AnecdoteRecord {
  AnecdoteCategory category = AnecdoteCategory::Story;
  std::string quote;
  std::string description;
  std::string topic;
  std::string purpose;
};

nlohmann::ordered_json to_json(const SummaryRecord&);
nlohmann::ordered_json to_json(const QuestionRecord&);
nlohmann::ordered_json to_json(const ConfusionRecord&);
nlohmann::ordered_json to_json(const AnecdoteRecord&);
SummaryRecord summary_from_json(const nlohmann::json&);
QuestionRecord question_from_json(const nlohmann::json&);
ConfusionRecord confusion_from_json(const nlohmann::json&);
AnecdoteRecord anecdote_from_json(const nlohmann::json&);

// "[H:MM:SS] text" lines, the prompt rendering for full-transcript calls.
std::string render_timed_transcript(const Transcript& t);
// "N. [H:MM:SS] text" lines, the compact pass-2 input.
std::string render_candidates(const std::vector<QuestionCandidate>& candidates);

// Single JSON-mode call over the full transcript. Requires >= 1 segment.
SummaryRecord summarize(const Transcript& t, const LlmGateway& gateway,
                        std::vector<DecodeNote>& notes);

// Pass 1: high-recall candidate extraction. Quotes that do not appear
// verbatim (whitespace-normalized, case-insensitive) in the transcript are
// dropped with a note; so are candidates with invalid or fabricated
// timestamps. Requires a timed transcript.
std::vector<QuestionCandidate> extract_question_candidates(const Transcript& t,
                                                           const LlmGateway& gateway,
                                                           std::vector<DecodeNote>& notes);

// Pass 2: classification and filtering over the rendered candidate list —
// never the full transcript. Keeps at most 15; when there are 5 or fewer
// candidates all of them pass through.
std::vector<QuestionRecord> filter_questions(const std::vector<QuestionCandidate>& candidates,
                                             const LlmGateway& gateway,
                                             std::vector<DecodeNote>& notes);

// JSON-mode call plus timestamp validation and dedup_confusion.
std::vector<ConfusionRecord> detect_confusion(const Transcript& t, const LlmGateway& gateway,
                                              std::vector<DecodeNote>& notes);

// Consecutive records with the same topic (case-insensitive) within
// `window_s` of the previous group member collapse to the earliest one;
// the survivor takes the maximum severity of its group. Idempotent.
std::vector<ConfusionRecord> dedup_confusion(std::vector<ConfusionRecord> records,
                                             double window_s = 120.0);

// JSON-mode call; quotes grounding-checked like question candidates;
// unknown categories map to story with a note.
std::vector<AnecdoteRecord> catalog_anecdotes(const Transcript& t, const LlmGateway& gateway,
                                              std::vector<DecodeNote>& notes);

struct RunItem {
  std::string lecture_id;
  AnalysisKind kind = AnalysisKind::Summary;
  bool ok = false;
  std::string error;
  double elapsed_s = 0.0;
  int record_count = 0;
  std::vector<DecodeNote> notes;
};

struct RunReport {
  int lecture_count = 0;
  std::vector<RunItem> items;
  // >= 60% of analyzed lectures yielding one identical question count is
  // the bimodal-failure signature.
  bool bimodal_suspicion = false;
  int modal_question_count = 0;
  int modal_lecture_count = 0;
};

nlohmann::ordered_json to_json(const RunReport&);
RunReport run_report_from_json(const nlohmann::json& doc);

// Runs lectures x kinds with per-lecture failure isolation, writing
// analysis/<lecture_id>.<kind>.json plus run_report.json under out_dir.
// Lecture-level parallelism is bounded by the gateway lane count.
RunReport analyze_corpus(const std::vector<Transcript>& transcripts,
                         const std::set<AnalysisKind>& kinds, const LlmGateway& gateway,
                         const std::filesystem::path& out_dir);

}  // namespace lectern
