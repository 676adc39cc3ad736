#include "lectern/analysis.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <map>
#include <mutex>
#include <thread>

#include "lectern/errors.hpp"
#include "lectern/text_util.hpp"

namespace lectern {

using nlohmann::json;
using nlohmann::ordered_json;

std::string to_string(AnalysisKind k) {
  switch (k) {
    case AnalysisKind::Summary: return "summary";
    case AnalysisKind::Questions: return "questions";
    case AnalysisKind::Confusion: return "confusion";
    case AnalysisKind::Anecdotes: return "anecdotes";
  }
  return "unknown";
}

std::string to_string(LectureType t) {
  switch (t) {
    case LectureType::NewMaterial: return "new_material";
    case LectureType::Review: return "review";
    case LectureType::ProblemSolving: return "problem_solving";
    case LectureType::Exam: return "exam";
    case LectureType::Other: return "other";
  }
  return "other";
}

std::string to_string(Speaker s) {
  return s == Speaker::Student ? "student" : "instructor";
}

std::string to_string(QuestionType q) {
  switch (q) {
    case QuestionType::Conceptual: return "conceptual";
    case QuestionType::Clarification: return "clarification";
    case QuestionType::Procedural: return "procedural";
    case QuestionType::Socratic: return "socratic";
  }
  return "conceptual";
}

std::string to_string(Relevance r) {
  switch (r) {
    case Relevance::High: return "high";
    case Relevance::Medium: return "medium";
    case Relevance::Low: return "low";
  }
  return "medium";
}

std::string to_string(Severity s) {
  switch (s) {
    case Severity::Minor: return "minor";
    case Severity::Moderate: return "moderate";
    case Severity::Significant: return "significant";
  }
  return "minor";
}

std::string to_string(AnecdoteCategory c) {
  switch (c) {
    case AnecdoteCategory::Anecdote: return "anecdote";
    case AnecdoteCategory::Analogy: return "analogy";
    case AnecdoteCategory::Joke: return "joke";
    case AnecdoteCategory::RealWorldExample: return "real_world_example";
    case AnecdoteCategory::Demonstration: return "demonstration";
    case AnecdoteCategory::HistoricalNote: return "historical_note";
    case AnecdoteCategory::Story: return "story";
  }
  return "story";
}

namespace {

// "New material" / "new-material" / "NEW_MATERIAL" all fold to the same key.
std::string fold_enum_token(const std::string& s) {
  std::string out;
  for (char c : text::to_lower(text::trim(s))) {
    out.push_back((c == ' ' || c == '-') ? '_' : c);
  }
  return out;
}

template <typename Enum>
Enum parse_closed_set(const std::string& value, const std::vector<std::pair<const char*, Enum>>& table,
                      Enum fallback, const char* what, std::vector<DecodeNote>* notes) {
  std::string key = fold_enum_token(value);
  for (const auto& [name, e] : table) {
    if (key == name) return e;
  }
  if (notes)
    notes->push_back({NoteKind::Dropped, std::string("unknown ") + what + " '" + value +
                                             "' mapped to default"});
  return fallback;
}

const std::vector<std::pair<const char*, LectureType>> kLectureTypes = {
    {"new_material", LectureType::NewMaterial}, {"review", LectureType::Review},
    {"problem_solving", LectureType::ProblemSolving}, {"exam", LectureType::Exam},
    {"other", LectureType::Other}};
const std::vector<std::pair<const char*, Speaker>> kSpeakers = {
    {"student", Speaker::Student}, {"instructor", Speaker::Instructor}};
const std::vector<std::pair<const char*, QuestionType>> kQuestionTypes = {
    {"conceptual", QuestionType::Conceptual}, {"clarification", QuestionType::Clarification},
    {"procedural", QuestionType::Procedural}, {"socratic", QuestionType::Socratic}};
const std::vector<std::pair<const char*, Relevance>> kRelevances = {
    {"high", Relevance::High}, {"medium", Relevance::Medium}, {"low", Relevance::Low}};
const std::vector<std::pair<const char*, Severity>> kSeverities = {
    {"minor", Severity::Minor}, {"moderate", Severity::Moderate},
    {"significant", Severity::Significant}};
const std::vector<std::pair<const char*, AnecdoteCategory>> kCategories = {
    {"anecdote", AnecdoteCategory::Anecdote}, {"analogy", AnecdoteCategory::Analogy},
    {"joke", AnecdoteCategory::Joke}, {"real_world_example", AnecdoteCategory::RealWorldExample},
    {"demonstration", AnecdoteCategory::Demonstration},
    {"historical_note", AnecdoteCategory::HistoricalNote}, {"story", AnecdoteCategory::Story}};

}  // namespace

AnalysisKind parse_analysis_kind(const std::string& s) {
  std::string key = fold_enum_token(s);
  if (key == "summary") return AnalysisKind::Summary;
  if (key == "questions") return AnalysisKind::Questions;
  if (key == "confusion") return AnalysisKind::Confusion;
  if (key == "anecdotes") return AnalysisKind::Anecdotes;
  throw ValidationError("unknown analysis kind '" + s + "'");
}

std::set<AnalysisKind> parse_kind_list(const std::string& csv) {
  std::set<AnalysisKind> kinds;
  std::string cur;
  auto flush = [&] {
    cur = text::trim(cur);
    if (!cur.empty()) kinds.insert(parse_analysis_kind(cur));
    cur.clear();
  };
  for (char c : csv) {
    if (c == ',')
      flush();
    else
      cur.push_back(c);
  }
  flush();
  return kinds;
}

ordered_json to_json(const SummaryRecord& r) {
  ordered_json topics = ordered_json::array();
  for (const auto& t : r.topics)
    topics.push_back({{"name", t.name}, {"description", t.description}});
  return {{"title", r.title},
          {"lecture_type", to_string(r.lecture_type)},
          {"topics", std::move(topics)},
          {"key_concepts", r.key_concepts},
          {"key_equations", r.key_equations},
          {"narrative", r.narrative}};
}

ordered_json to_json(const QuestionRecord& r) {
  return {{"timestamp", r.timestamp},
          {"speaker", to_string(r.speaker)},
          {"qtype", to_string(r.qtype)},
          {"relevance", to_string(r.relevance)},
          {"text", r.text}};
}

ordered_json to_json(const ConfusionRecord& r) {
  return {{"timestamp", r.timestamp},
          {"topic", r.topic},
          {"evidence", r.evidence},
          {"severity", to_string(r.severity)}};
}

ordered_json to_json(const AnecdoteRecord& r) {
  return {{"category", to_string(r.category)},
          {"quote", r.quote},
          {"description", r.description},
          {"topic", r.topic},
          {"purpose", r.purpose}};
}

SummaryRecord summary_from_json(const json& j) {
  SummaryRecord r;
  r.title = j.at("title").get<std::string>();
  r.lecture_type = parse_closed_set(j.at("lecture_type").get<std::string>(), kLectureTypes,
                                    LectureType::Other, "lecture_type", nullptr);
  for (const auto& t : j.at("topics"))
    r.topics.push_back({t.at("name").get<std::string>(), t.at("description").get<std::string>()});
  r.key_concepts = j.at("key_concepts").get<std::vector<std::string>>();
  r.key_equations = j.at("key_equations").get<std::vector<std::string>>();
  r.narrative = j.at("narrative").get<std::string>();
  return r;
}

QuestionRecord question_from_json(const json& j) {
  QuestionRecord r;
  r.timestamp = j.at("timestamp").get<double>();
  r.speaker = parse_closed_set(j.at("speaker").get<std::string>(), kSpeakers, Speaker::Student,
                               "speaker", nullptr);
  r.qtype = parse_closed_set(j.at("qtype").get<std::string>(), kQuestionTypes,
                             QuestionType::Conceptual, "qtype", nullptr);
  r.relevance = parse_closed_set(j.at("relevance").get<std::string>(), kRelevances,
                                 Relevance::Medium, "relevance", nullptr);
  r.text = j.at("text").get<std::string>();
  return r;
}

ConfusionRecord confusion_from_json(const json& j) {
  ConfusionRecord r;
  r.timestamp = j.at("timestamp").get<double>();
  r.topic = j.at("topic").get<std::string>();
  r.evidence = j.at("evidence").get<std::string>();
  r.severity = parse_closed_set(j.at("severity").get<std::string>(), kSeverities, Severity::Minor,
                                "severity", nullptr);
  return r;
}

AnecdoteRecord anecdote_from_json(const json& j) {
  AnecdoteRecord r;
  r.category = parse_closed_set(j.at("category").get<std::string>(), kCategories,
                                AnecdoteCategory::Story, "category", nullptr);
  r.quote = j.at("quote").get<std::string>();
  r.description = j.at("description").get<std::string>();
  r.topic = j.at("topic").get<std::string>();
  r.purpose = j.at("purpose").get<std::string>();
  return r;
}

std::string render_timed_transcript(const Transcript& t) {
  std::string out;
  for (const auto& seg : t.segments) {
    out += "[" + text::format_hms(seg.start) + "] " + seg.text + "\n";
  }
  return out;
}

std::string render_candidates(const std::vector<QuestionCandidate>& candidates) {
  std::string out;
  for (size_t i = 0; i < candidates.size(); ++i) {
    out += std::to_string(i + 1) + ". [" + text::format_hms(candidates[i].timestamp) + "] " +
           candidates[i].text + "\n";
  }
  return out;
}

namespace {

// Analysis calls guard against the silent-truncation failure: the context
// window must be explicit and large enough for a full transcript.
void require_analysis_context(const LlmGateway& gateway) {
  if (gateway.config().context_tokens < 4096)
    throw ValidationError("analysis calls require context_tokens >= 4096; configured " +
                          std::to_string(gateway.config().context_tokens));
}

GenerateOptions analysis_options(const LlmGateway& gateway) {
  GenerateOptions opts;
  opts.json_mode = true;
  opts.temperature = 0.2;
  opts.num_ctx = std::max(gateway.config().context_tokens, 16384);
  return opts;
}

void require_timed(const Transcript& t, const char* analysis) {
  if (t.untimed())
    throw ValidationError(std::string(analysis) + " analysis for " + t.lecture_id +
                          " cannot be performed on unsegmented text");
}

void require_nonempty(const Transcript& t, const char* analysis) {
  if (t.segments.empty())
    throw ValidationError(std::string(analysis) + " analysis for " + t.lecture_id +
                          " needs at least one segment");
}

// Case-insensitive, whitespace-normalized haystack for verbatim checks.
std::string grounding_haystack(const Transcript& t) {
  return text::to_lower(text::normalize_ws(t.full_text()));
}

bool quote_grounded(const std::string& haystack, const std::string& quote) {
  std::string needle = text::to_lower(text::normalize_ws(quote));
  return !needle.empty() && haystack.find(needle) != std::string::npos;
}

}  // namespace

SummaryRecord summarize(const Transcript& t, const LlmGateway& gateway,
                        std::vector<DecodeNote>& notes) {
  require_analysis_context(gateway);
  require_nonempty(t, "summary");

  const char* system =
      "You summarize a college thermodynamics lecture from its transcript. Return JSON: "
      "{\"title\": string, \"lecture_type\": one of \"new_material\", \"review\", "
      "\"problem_solving\", \"exam\", \"other\", \"topics\": [{\"name\": string, "
      "\"description\": string}], \"key_concepts\": [string], \"key_equations\": [string], "
      "\"narrative\": string}. The narrative is a short paragraph. Base everything on the "
      "transcript alone.";

  SchemaSpec schema;
  schema.fields = {
      {"title", {"lecture_title", "name"}, FieldKind::String, ElementKind::Any, true},
      {"lecture_type", {"type", "classification"}, FieldKind::String, ElementKind::Any, true},
      {"topics", {"topic_list", "main_topics"}, FieldKind::Array, ElementKind::Objects, true},
      {"key_concepts", {"concepts"}, FieldKind::Array, ElementKind::Strings, false},
      {"key_equations", {"equations"}, FieldKind::Array, ElementKind::Strings, false},
      {"narrative", {"summary", "narrative_summary"}, FieldKind::String, ElementKind::Any, true},
  };

  StructuredResult decoded =
      gateway.generate_structured(system, render_timed_transcript(t), schema,
                                  analysis_options(gateway));
  for (const auto& ex : decoded.exchanges)
    notes.insert(notes.end(), ex.decode_notes.begin(), ex.decode_notes.end());
  notes.insert(notes.end(), decoded.notes.begin(), decoded.notes.end());

  SummaryRecord record;
  record.title = decoded.record["title"].get<std::string>();
  record.lecture_type = parse_closed_set(decoded.record["lecture_type"].get<std::string>(),
                                         kLectureTypes, LectureType::Other, "lecture_type",
                                         &notes);
  record.narrative = decoded.record["narrative"].get<std::string>();
  if (text::trim(record.title).empty()) throw SchemaError("summary title is empty");
  if (text::trim(record.narrative).empty()) throw SchemaError("summary narrative is empty");

  SchemaSpec topic_schema;
  topic_schema.fields = {
      {"name", {"topic", "title"}, FieldKind::String, ElementKind::Any, true},
      {"description", {"notes", "desc", "details"}, FieldKind::String, ElementKind::Any, false},
  };
  for (const auto& el : decoded.record["topics"]) {
    try {
      json resolved = resolve_record(el, topic_schema, notes);
      record.topics.push_back(
          {resolved["name"].get<std::string>(),
           resolved.contains("description") ? resolved["description"].get<std::string>() : ""});
    } catch (const SchemaError& e) {
      notes.push_back({NoteKind::Dropped, std::string("topic entry dropped: ") + e.what()});
    }
  }
  if (decoded.record.contains("key_concepts")) {
    for (const auto& c : decoded.record["key_concepts"])
      record.key_concepts.push_back(c.get<std::string>());
  }
  if (decoded.record.contains("key_equations")) {
    for (const auto& e : decoded.record["key_equations"])
      record.key_equations.push_back(e.get<std::string>());
  }

  if (record.topics.empty() && record.lecture_type != LectureType::Exam)
    throw SchemaError("summary for " + t.lecture_id + " has no topics and is not an exam session");
  return record;
}

std::vector<QuestionCandidate> extract_question_candidates(const Transcript& t,
                                                           const LlmGateway& gateway,
                                                           std::vector<DecodeNote>& notes) {
  require_analysis_context(gateway);
  require_nonempty(t, "questions");
  require_timed(t, "questions");

  const char* system =
      "You read a timestamped lecture transcript and list every question spoken aloud, by "
      "anyone, with its timestamp. Return JSON: {\"candidates\": [{\"timestamp\": \"0:15:42\", "
      "\"speaker\": \"student\" or \"instructor\", \"text\": string}]}. Quote each question "
      "verbatim from the transcript. Do NOT use placeholder text; copy concrete timestamps "
      "like \"0:15:42\" from the transcript lines. Prefer listing too many over too few.";

  SchemaSpec schema;
  schema.fields = {
      {"candidates", {"questions", "items", "results"}, FieldKind::Array, ElementKind::Objects,
       true},
  };
  StructuredResult decoded = gateway.generate_structured(
      system, render_timed_transcript(t), schema, analysis_options(gateway));
  for (const auto& ex : decoded.exchanges)
    notes.insert(notes.end(), ex.decode_notes.begin(), ex.decode_notes.end());
  notes.insert(notes.end(), decoded.notes.begin(), decoded.notes.end());

  SchemaSpec element_schema;
  element_schema.fields = {
      {"timestamp", {"time", "ts"}, FieldKind::Timestamp, ElementKind::Any, true},
      {"speaker", {"speaker_guess", "who"}, FieldKind::String, ElementKind::Any, false},
      {"text", {"question", "quote"}, FieldKind::String, ElementKind::Any, true},
  };

  std::string haystack = grounding_haystack(t);
  std::vector<QuestionCandidate> candidates;
  for (const auto& el : decoded.record["candidates"]) {
    json resolved;
    try {
      resolved = resolve_record(el, element_schema, notes);
    } catch (const SchemaError& e) {
      notes.push_back({NoteKind::Dropped, std::string("candidate dropped: ") + e.what()});
      continue;
    }
    QuestionCandidate cand;
    cand.text = text::trim(resolved["text"].get<std::string>());
    cand.speaker_guess =
        resolved.contains("speaker") ? resolved["speaker"].get<std::string>() : "student";

    std::string reason;
    auto seconds =
        validate_timestamp(resolved["timestamp"].get<std::string>(), t.duration(), &reason);
    if (!seconds) {
      notes.push_back({NoteKind::Dropped, "candidate \"" + cand.text + "\" dropped: " + reason});
      continue;
    }
    cand.timestamp = *seconds;

    if (!quote_grounded(haystack, cand.text)) {
      notes.push_back({NoteKind::Dropped,
                       "candidate \"" + cand.text + "\" dropped: quote not found in transcript"});
      continue;
    }
    candidates.push_back(std::move(cand));
  }
  return candidates;
}

std::vector<QuestionRecord> filter_questions(const std::vector<QuestionCandidate>& candidates,
                                             const LlmGateway& gateway,
                                             std::vector<DecodeNote>& notes) {
  require_analysis_context(gateway);
  if (candidates.empty()) return {};

  const char* system =
      "You are given a numbered list of candidate questions from one lecture. Pick the 5 to 15 "
      "most pedagogically significant ones (keep all when there are 5 or fewer) and classify "
      "each. Return JSON: {\"questions\": [{\"number\": 1, \"speaker\": \"student\" or "
      "\"instructor\", \"type\": \"conceptual\", \"clarification\", \"procedural\" or "
      "\"socratic\", \"relevance\": \"high\", \"medium\" or \"low\"}]}. The number refers to "
      "the candidate list.";

  SchemaSpec schema;
  schema.fields = {
      {"questions", {"kept", "selected", "items"}, FieldKind::Array, ElementKind::Objects, true},
  };
  StructuredResult decoded = gateway.generate_structured(system, render_candidates(candidates),
                                                         schema, analysis_options(gateway));
  for (const auto& ex : decoded.exchanges)
    notes.insert(notes.end(), ex.decode_notes.begin(), ex.decode_notes.end());
  notes.insert(notes.end(), decoded.notes.begin(), decoded.notes.end());

  SchemaSpec element_schema;
  element_schema.fields = {
      {"speaker", {"who"}, FieldKind::String, ElementKind::Any, false},
      {"type", {"qtype", "question_type"}, FieldKind::String, ElementKind::Any, false},
      {"relevance", {"significance", "importance"}, FieldKind::String, ElementKind::Any, false},
  };

  const int kKeepCap = 15;
  std::vector<QuestionRecord> records;
  std::map<size_t, bool> used;
  for (const auto& el : decoded.record["questions"]) {
    if (static_cast<int>(records.size()) >= kKeepCap) break;

    // The selection index tolerates numeric strings and alias names.
    long long number = -1;
    for (const char* key : {"number", "index", "id", "n"}) {
      if (!el.contains(key)) continue;
      if (el[key].is_number_integer()) number = el[key].get<long long>();
      if (el[key].is_string()) {
        try {
          number = std::stoll(el[key].get<std::string>());
        } catch (...) {
        }
      }
      break;
    }
    if (number < 1 || number > static_cast<long long>(candidates.size())) {
      notes.push_back({NoteKind::Dropped,
                       "selection with out-of-range candidate number " + std::to_string(number)});
      continue;
    }
    size_t idx = static_cast<size_t>(number - 1);
    if (used.count(idx)) continue;
    used[idx] = true;

    json resolved;
    try {
      resolved = resolve_record(el, element_schema, notes);
    } catch (const SchemaError&) {
      resolved = json::object();
    }
    QuestionRecord rec;
    rec.timestamp = candidates[idx].timestamp;
    rec.text = candidates[idx].text;
    rec.speaker = parse_closed_set(
        resolved.contains("speaker") ? resolved["speaker"].get<std::string>()
                                     : candidates[idx].speaker_guess,
        kSpeakers, Speaker::Student, "speaker", &notes);
    rec.qtype = parse_closed_set(
        resolved.contains("type") ? resolved["type"].get<std::string>() : "conceptual",
        kQuestionTypes, QuestionType::Conceptual, "question type", &notes);
    rec.relevance = parse_closed_set(
        resolved.contains("relevance") ? resolved["relevance"].get<std::string>() : "medium",
        kRelevances, Relevance::Medium, "relevance", &notes);
    records.push_back(std::move(rec));
  }

  // Pass-through rule: a candidate list of five or fewer is kept whole even
  // when the model filtered harder.
  if (candidates.size() <= 5 && records.size() < candidates.size()) {
    for (size_t i = 0; i < candidates.size(); ++i) {
      if (used.count(i)) continue;
      QuestionRecord rec;
      rec.timestamp = candidates[i].timestamp;
      rec.text = candidates[i].text;
      rec.speaker = parse_closed_set(candidates[i].speaker_guess, kSpeakers, Speaker::Student,
                                     "speaker", nullptr);
      records.push_back(std::move(rec));
      notes.push_back({NoteKind::Repaired, "candidate " + std::to_string(i + 1) +
                                               " restored by the pass-through rule"});
    }
  }

  std::stable_sort(records.begin(), records.end(),
                   [](const auto& a, const auto& b) { return a.timestamp < b.timestamp; });
  return records;
}

std::vector<ConfusionRecord> detect_confusion(const Transcript& t, const LlmGateway& gateway,
                                              std::vector<DecodeNote>& notes) {
  require_analysis_context(gateway);
  require_nonempty(t, "confusion");
  require_timed(t, "confusion");

  const char* system =
      "You read a timestamped lecture transcript and identify moments of apparent student "
      "confusion or instructor re-explanation. Return JSON: {\"confusions\": [{\"timestamp\": "
      "\"0:15:42\", \"topic\": string, \"evidence\": string, \"severity\": \"minor\", "
      "\"moderate\" or \"significant\"}]}. Do NOT use placeholder text; copy concrete "
      "timestamps like \"0:15:42\" from the transcript lines.";

  SchemaSpec schema;
  schema.fields = {
      {"confusions", {"confusion_points", "points", "items", "results"}, FieldKind::Array,
       ElementKind::Objects, true},
  };
  StructuredResult decoded = gateway.generate_structured(
      system, render_timed_transcript(t), schema, analysis_options(gateway));
  for (const auto& ex : decoded.exchanges)
    notes.insert(notes.end(), ex.decode_notes.begin(), ex.decode_notes.end());
  notes.insert(notes.end(), decoded.notes.begin(), decoded.notes.end());

  SchemaSpec element_schema;
  element_schema.fields = {
      {"timestamp", {"time", "ts"}, FieldKind::Timestamp, ElementKind::Any, true},
      {"topic", {"name", "subject"}, FieldKind::String, ElementKind::Any, true},
      {"evidence", {"notes", "description", "reason"}, FieldKind::String, ElementKind::Any, false},
      {"severity", {"level", "rating"}, FieldKind::String, ElementKind::Any, false},
  };

  std::vector<ConfusionRecord> records;
  for (const auto& el : decoded.record["confusions"]) {
    json resolved;
    try {
      resolved = resolve_record(el, element_schema, notes);
    } catch (const SchemaError& e) {
      notes.push_back({NoteKind::Dropped, std::string("confusion entry dropped: ") + e.what()});
      continue;
    }
    ConfusionRecord rec;
    rec.topic = resolved["topic"].get<std::string>();
    rec.evidence = resolved.contains("evidence") ? resolved["evidence"].get<std::string>() : "";
    rec.severity = parse_closed_set(
        resolved.contains("severity") ? resolved["severity"].get<std::string>() : "minor",
        kSeverities, Severity::Minor, "severity", &notes);

    std::string reason;
    auto seconds =
        validate_timestamp(resolved["timestamp"].get<std::string>(), t.duration(), &reason);
    if (!seconds) {
      notes.push_back(
          {NoteKind::Dropped, "confusion entry on \"" + rec.topic + "\" dropped: " + reason});
      continue;
    }
    rec.timestamp = *seconds;
    records.push_back(std::move(rec));
  }
  return dedup_confusion(std::move(records));
}

std::vector<ConfusionRecord> dedup_confusion(std::vector<ConfusionRecord> records,
                                             double window_s) {
  std::stable_sort(records.begin(), records.end(),
                   [](const auto& a, const auto& b) { return a.timestamp < b.timestamp; });

  std::vector<ConfusionRecord> out;
  double prev_timestamp = 0.0;
  for (auto& rec : records) {
    bool joins_group = !out.empty() &&
                       text::to_lower(out.back().topic) == text::to_lower(rec.topic) &&
                       rec.timestamp - prev_timestamp <= window_s;
    if (joins_group) {
      if (static_cast<int>(rec.severity) > static_cast<int>(out.back().severity))
        out.back().severity = rec.severity;
    } else {
      out.push_back(rec);
    }
    prev_timestamp = rec.timestamp;
  }
  return out;
}

std::vector<AnecdoteRecord> catalog_anecdotes(const Transcript& t, const LlmGateway& gateway,
                                              std::vector<DecodeNote>& notes) {
  require_analysis_context(gateway);
  require_nonempty(t, "anecdotes");

  const char* system =
      "You catalog the anecdotes, analogies, jokes, real-world examples, demonstrations, and "
      "historical notes an instructor used in a lecture. Return JSON: {\"anecdotes\": "
      "[{\"category\": \"anecdote\", \"analogy\", \"joke\", \"real_world_example\", "
      "\"demonstration\", \"historical_note\" or \"story\", \"quote\": string, "
      "\"description\": string, \"topic\": string, \"purpose\": string}]}. The quote must be "
      "verbatim from the transcript.";

  SchemaSpec schema;
  schema.fields = {
      {"anecdotes", {"items", "catalog", "results"}, FieldKind::Array, ElementKind::Objects, true},
  };
  StructuredResult decoded = gateway.generate_structured(
      system, render_timed_transcript(t), schema, analysis_options(gateway));
  for (const auto& ex : decoded.exchanges)
    notes.insert(notes.end(), ex.decode_notes.begin(), ex.decode_notes.end());
  notes.insert(notes.end(), decoded.notes.begin(), decoded.notes.end());

  SchemaSpec element_schema;
  element_schema.fields = {
      {"category", {"type", "kind"}, FieldKind::String, ElementKind::Any, false},
      {"quote", {"text", "quotation"}, FieldKind::String, ElementKind::Any, true},
      {"description", {"notes", "desc"}, FieldKind::String, ElementKind::Any, false},
      {"topic", {"name", "subject"}, FieldKind::String, ElementKind::Any, false},
      {"purpose", {"pedagogical_purpose", "why"}, FieldKind::String, ElementKind::Any, false},
  };

  std::string haystack = grounding_haystack(t);
  std::vector<AnecdoteRecord> records;
  for (const auto& el : decoded.record["anecdotes"]) {
    json resolved;
    try {
      resolved = resolve_record(el, element_schema, notes);
    } catch (const SchemaError& e) {
      notes.push_back({NoteKind::Dropped, std::string("anecdote dropped: ") + e.what()});
      continue;
    }
    AnecdoteRecord rec;
    rec.quote = text::trim(resolved["quote"].get<std::string>());
    rec.category = parse_closed_set(
        resolved.contains("category") ? resolved["category"].get<std::string>() : "story",
        kCategories, AnecdoteCategory::Story, "anecdote category", &notes);
    rec.description =
        resolved.contains("description") ? resolved["description"].get<std::string>() : "";
    rec.topic = resolved.contains("topic") ? resolved["topic"].get<std::string>() : "";
    rec.purpose = resolved.contains("purpose") ? resolved["purpose"].get<std::string>() : "";

    if (rec.quote.empty() || !quote_grounded(haystack, rec.quote)) {
      notes.push_back({NoteKind::Dropped,
                       "anecdote \"" + rec.quote + "\" dropped: quote not found in transcript"});
      continue;
    }
    records.push_back(std::move(rec));
  }
  return records;
}

namespace {

void write_analysis_file(const std::filesystem::path& out_dir, const std::string& lecture_id,
                         AnalysisKind kind, const std::string& model,
                         const ordered_json& records) {
  ordered_json doc;
  doc["lecture_id"] = lecture_id;
  doc["kind"] = to_string(kind);
  doc["model"] = model;
  doc["generated_at"] = text::iso8601_utc_now();
  doc["records"] = records;

  std::filesystem::path path = out_dir / (lecture_id + "." + to_string(kind) + ".json");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write " + path.string());
  out << doc.dump(2) << "\n";
}

RunItem run_one(const Transcript& t, AnalysisKind kind, const LlmGateway& gateway,
                const std::filesystem::path& out_dir) {
  RunItem item;
  item.lecture_id = t.lecture_id;
  item.kind = kind;
  auto started = std::chrono::steady_clock::now();
  try {
    ordered_json records = ordered_json::array();
    switch (kind) {
      case AnalysisKind::Summary: {
        records.push_back(to_json(summarize(t, gateway, item.notes)));
        break;
      }
      case AnalysisKind::Questions: {
        auto candidates = extract_question_candidates(t, gateway, item.notes);
        for (const auto& rec : filter_questions(candidates, gateway, item.notes))
          records.push_back(to_json(rec));
        break;
      }
      case AnalysisKind::Confusion: {
        for (const auto& rec : detect_confusion(t, gateway, item.notes))
          records.push_back(to_json(rec));
        break;
      }
      case AnalysisKind::Anecdotes: {
        for (const auto& rec : catalog_anecdotes(t, gateway, item.notes))
          records.push_back(to_json(rec));
        break;
      }
    }
    item.record_count = static_cast<int>(records.size());
    write_analysis_file(out_dir, t.lecture_id, kind, gateway.config().model_name, records);
    item.ok = true;
  } catch (const std::exception& e) {
    item.ok = false;
    item.error = e.what();
  }
  item.elapsed_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return item;
}

}  // namespace

ordered_json to_json(const RunReport& report) {
  ordered_json items = ordered_json::array();
  for (const auto& item : report.items) {
    ordered_json notes = ordered_json::array();
    for (const auto& n : item.notes)
      notes.push_back({{"kind", to_string(n.kind)}, {"detail", n.detail}});
    items.push_back({{"lecture_id", item.lecture_id},
                     {"kind", to_string(item.kind)},
                     {"ok", item.ok},
                     {"error", item.error},
                     {"elapsed_s", item.elapsed_s},
                     {"record_count", item.record_count},
                     {"notes", std::move(notes)}});
  }
  return {{"lecture_count", report.lecture_count},
          {"bimodal_suspicion", report.bimodal_suspicion},
          {"modal_question_count", report.modal_question_count},
          {"modal_lecture_count", report.modal_lecture_count},
          {"items", std::move(items)}};
}

RunReport run_report_from_json(const json& doc) {
  RunReport report;
  report.lecture_count = doc.at("lecture_count").get<int>();
  report.bimodal_suspicion = doc.at("bimodal_suspicion").get<bool>();
  report.modal_question_count = doc.at("modal_question_count").get<int>();
  report.modal_lecture_count = doc.at("modal_lecture_count").get<int>();
  for (const auto& it : doc.at("items")) {
    RunItem item;
    item.lecture_id = it.at("lecture_id").get<std::string>();
    item.kind = parse_analysis_kind(it.at("kind").get<std::string>());
    item.ok = it.at("ok").get<bool>();
    item.error = it.at("error").get<std::string>();
    item.elapsed_s = it.at("elapsed_s").get<double>();
    item.record_count = it.at("record_count").get<int>();
    report.items.push_back(std::move(item));
  }
  return report;
}

RunReport analyze_corpus(const std::vector<Transcript>& transcripts,
                         const std::set<AnalysisKind>& kinds, const LlmGateway& gateway,
                         const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);

  RunReport report;
  report.lecture_count = static_cast<int>(transcripts.size());

  // One slot per lecture keeps item order deterministic under parallelism.
  std::vector<std::vector<RunItem>> per_lecture(transcripts.size());
  auto analyze_lecture = [&](size_t idx) {
    for (AnalysisKind kind :
         {AnalysisKind::Summary, AnalysisKind::Questions, AnalysisKind::Confusion,
          AnalysisKind::Anecdotes}) {
      if (kinds.count(kind)) per_lecture[idx].push_back(run_one(transcripts[idx], kind, gateway, out_dir));
    }
  };

  int lanes = std::max(1, gateway.config().lanes);
  if (lanes == 1 || transcripts.size() <= 1) {
    for (size_t i = 0; i < transcripts.size(); ++i) analyze_lecture(i);
  } else {
    std::vector<std::thread> workers;
    std::mutex mu;
    size_t next = 0;
    for (int w = 0; w < std::min<int>(lanes, static_cast<int>(transcripts.size())); ++w) {
      workers.emplace_back([&] {
        for (;;) {
          size_t idx;
          {
            std::lock_guard lock(mu);
            if (next >= transcripts.size()) return;
            idx = next++;
          }
          analyze_lecture(idx);
        }
      });
    }
    for (auto& w : workers) w.join();
  }

  for (auto& items : per_lecture) {
    for (auto& item : items) report.items.push_back(std::move(item));
  }

  // Question-count histogram over successful question analyses.
  std::map<int, int> histogram;
  int analyzed = 0;
  for (const auto& item : report.items) {
    if (item.kind == AnalysisKind::Questions && item.ok) {
      ++histogram[item.record_count];
      ++analyzed;
    }
  }
  for (const auto& [count, lectures] : histogram) {
    if (lectures > report.modal_lecture_count) {
      report.modal_lecture_count = lectures;
      report.modal_question_count = count;
    }
  }
  if (analyzed >= 2 && report.modal_lecture_count * 100 >= analyzed * 60)
    report.bimodal_suspicion = true;

  std::filesystem::path report_path = out_dir / "run_report.json";
  std::ofstream out(report_path, std::ios::binary);
  if (!out) throw ValidationError("cannot write " + report_path.string());
  out << to_json(report).dump(2) << "\n";
  return report;
}

}  // namespace lectern
