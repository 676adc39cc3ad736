#include "lectern/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>

#include <CLI11.hpp>
#include <json.hpp>

#include "lectern/analysis.hpp"
#include "lectern/book_index.hpp"
#include "lectern/errors.hpp"
#include "lectern/pipeline.hpp"
#include "lectern/report.hpp"
#include "lectern/synthesis.hpp"
#include "lectern/text_util.hpp"
#include "lectern/transcript.hpp"

namespace lectern::cli {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitPartial = 1;
constexpr int kExitUsage = 2;
constexpr int kExitServiceDown = 3;

void apply_config_line(AppConfig& cfg, const std::string& key, const std::string& value,
                       const std::string& where) {
  if (key == "index_path") cfg.index_path = value;
  else if (key == "nav_tree_path") cfg.nav_tree_path = value;
  else if (key == "transcript_dir") cfg.transcript_dir = value;
  else if (key == "analysis_dir") cfg.analysis_dir = value;
  else if (key == "lexicon_path") cfg.lexicon_path = value;
  else if (key == "stopword_path") cfg.stopword_path = value;
  else if (key == "query_log") cfg.query_log_path = value;
  else if (key == "llm_url") cfg.gateway.base_url = value;
  else if (key == "llm_model") cfg.gateway.model_name = value;
  else if (key == "context_tokens") cfg.gateway.context_tokens = std::stoi(value);
  else if (key == "temperature") cfg.gateway.temperature = std::stod(value);
  else if (key == "request_timeout_s") cfg.gateway.request_timeout_s = std::stod(value);
  else if (key == "retry_count") cfg.gateway.retry_count = std::stoi(value);
  else if (key == "lanes") cfg.gateway.lanes = std::stoi(value);
  else if (key == "threshold") cfg.threshold = std::stod(value);
  else if (key == "context_k") cfg.context_k = std::stoi(value);
  else if (key == "llm_extract_timeout_s") cfg.llm_extract_timeout_s = std::stod(value);
  else throw ParseError(where + ": unknown config key '" + key + "'");
}

}  // namespace

AppConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open config file " + path);
  AppConfig cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = text::trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    std::string where = path + ":" + std::to_string(lineno);
    if (eq == std::string::npos) throw ParseError(where + ": expected key = value");
    std::string key = text::trim(line.substr(0, eq));
    std::string value = text::trim(line.substr(eq + 1));
    try {
      apply_config_line(cfg, key, value, where);
    } catch (const std::invalid_argument&) {
      throw ParseError(where + ": bad value for '" + key + "'");
    }
  }
  return cfg;
}

namespace {

void apply_env_overrides(AppConfig& cfg) {
  if (const char* url = std::getenv("LECTERN_LLM_URL")) cfg.gateway.base_url = url;
  if (const char* model = std::getenv("LECTERN_LLM_MODEL")) cfg.gateway.model_name = model;
}

std::vector<fs::path> sorted_files(const fs::path& dir, const std::vector<std::string>& exts) {
  std::vector<fs::path> out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    std::string ext = entry.path().extension().string();
    if (std::find(exts.begin(), exts.end(), ext) != exts.end()) out.push_back(entry.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

int cmd_clean(const AppConfig&, const std::string& in_dir, const std::string& out_dir,
              std::ostream& out, std::ostream& err) {
  if (!fs::is_directory(in_dir)) {
    err << "error: input directory " << in_dir << " does not exist\n";
    return kExitUsage;
  }
  fs::create_directories(out_dir);

  bool any_failure = false;
  for (const auto& path : sorted_files(in_dir, {".json"})) {
    try {
      Transcript raw = parse_transcript(path, TranscriptFormat::SegmentedJson);
      auto [cleaned, report] = clean_transcript(raw);
      fs::path dest = fs::path(out_dir) / path.filename();
      std::ofstream file(dest, std::ios::binary);
      if (!file) throw ValidationError("cannot write " + dest.string());
      file << cleaned_transcript_to_json(cleaned, report);
      out << cleaned.lecture_id << ": raw: " << report.raw_segment_count
          << ", loops: " << report.loops.size() << ", removed: " << report.removed_segment_count
          << ", kept: " << report.clean_segment_count << "\n";
    } catch (const std::exception& e) {
      err << "error: " << e.what() << "\n";
      any_failure = true;
    }
  }
  return any_failure ? kExitPartial : kExitOk;
}

struct QueryDeps {
  std::vector<IndexEntry> index;
  NavNode nav;
  PhraseLexicon lexicon;
};

QueryDeps load_query_deps(const AppConfig& cfg, std::ostream& out) {
  QueryDeps deps;
  deps.index = parse_index(cfg.index_path);
  out << "index: " << index_entry_count(deps.index) << " entries\n";
  deps.nav = parse_nav_tree(cfg.nav_tree_path);
  deps.lexicon.phrases = load_phrase_file(cfg.lexicon_path);
  deps.lexicon.stopwords = load_stopword_file(cfg.stopword_path);
  return deps;
}

void log_query(const AppConfig& cfg, const std::string& query, const QueryTrace& trace,
               std::ostream& err) {
  ordered_json entry;
  entry["timestamp"] = text::iso8601_utc_now();
  entry["query"] = query;
  entry["top_topics"] = ordered_json::array();
  for (const auto& e : trace.context.entries) entry["top_topics"].push_back(e.topic_path);
  entry["mode"] = trace.answer.mode == AnswerMode::Llm ? "llm" : "fallback";

  std::ofstream log(cfg.query_log_path, std::ios::app | std::ios::binary);
  if (!log || !(log << entry.dump() << "\n")) {
    err << "warning: could not append to query log " << cfg.query_log_path << "\n";
  }
}

int cmd_query(const AppConfig& cfg, const std::optional<std::string>& ask, bool no_llm,
              bool explain, std::istream& in, std::ostream& out, std::ostream& err) {
  QueryDeps deps;
  try {
    deps = load_query_deps(cfg, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  std::optional<LlmGateway> gateway;
  if (!no_llm) gateway.emplace(cfg.gateway);

  QueryOptions options;
  options.threshold = cfg.threshold;
  options.context_k = cfg.context_k;
  options.use_llm = !no_llm;
  options.llm_extract_timeout_s = cfg.llm_extract_timeout_s;

  bool warned = false;
  auto answer_one = [&](const std::string& query) {
    QueryTrace trace = answer_query(query, deps.index, deps.nav, deps.lexicon,
                                    gateway ? &*gateway : nullptr, options);
    if (trace.gateway_failed && !warned) {
      err << "warning: LLM unavailable; answering from the index alone\n";
      warned = true;
    }
    if (explain) out << merged_matches_to_json(trace.merged);
    out << render_answer(trace.answer) << "\n";
    log_query(cfg, query, trace, err);
  };

  if (ask) {
    answer_one(*ask);
    return kExitOk;
  }

  // Plain REPL: one line in, one answer out, until end of input.
  out << "query> " << std::flush;
  std::string line;
  while (std::getline(in, line)) {
    std::string query = text::trim(line);
    if (!query.empty()) answer_one(query);
    out << "query> " << std::flush;
  }
  out << "\n";
  return kExitOk;
}

int cmd_analyze(const AppConfig& cfg, const std::string& in_dir, const std::string& out_dir,
                const std::string& kinds_csv, std::ostream& out, std::ostream& err) {
  if (!fs::is_directory(in_dir)) {
    err << "error: transcript directory " << in_dir << " does not exist\n";
    return kExitUsage;
  }
  std::set<AnalysisKind> kinds;
  try {
    kinds = parse_kind_list(kinds_csv);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  if (kinds.empty()) {
    err << "error: no analysis kinds requested\n";
    return kExitUsage;
  }

  std::vector<Transcript> transcripts;
  for (const auto& path : sorted_files(in_dir, {".json"})) {
    try {
      transcripts.push_back(read_transcript_file(path).first);
    } catch (const std::exception& e) {
      err << "error: " << e.what() << "\n";
      return kExitUsage;
    }
  }

  LlmGateway gateway(cfg.gateway);
  if (!gateway.probe()) {
    err << "error: inference endpoint " << cfg.gateway.base_url
        << " is unreachable; nothing analyzed\n";
    return kExitServiceDown;
  }

  RunReport report = analyze_corpus(transcripts, kinds, gateway, out_dir);
  std::map<AnalysisKind, int> ok_per_kind;
  for (const auto& item : report.items) {
    if (item.ok) ++ok_per_kind[item.kind];
    if (!item.ok) err << item.lecture_id << " " << to_string(item.kind) << ": " << item.error
                      << "\n";
  }
  for (AnalysisKind kind : kinds) {
    out << to_string(kind) << ": " << ok_per_kind[kind] << "/" << report.lecture_count
        << " lectures\n";
  }
  if (report.bimodal_suspicion) {
    out << "warning: " << report.modal_lecture_count << " lectures produced exactly "
        << report.modal_question_count << " questions; output distribution looks degenerate\n";
  }
  for (AnalysisKind kind : kinds) {
    if (ok_per_kind[kind] == 0) return kExitPartial;
  }
  return kExitOk;
}

int cmd_report(const AppConfig&, const std::string& stats_dir, const std::string& compare_dir,
               const std::string& terms_path, const std::string& analysis_dir,
               const std::string& json_out, std::ostream& out, std::ostream& err) {
  if (!fs::is_directory(stats_dir)) {
    err << "error: directory " << stats_dir << " does not exist\n";
    return kExitUsage;
  }

  std::vector<Transcript> transcripts;
  std::vector<std::pair<std::string, CleanReport>> reports;
  try {
    for (const auto& path : sorted_files(stats_dir, {".json"})) {
      auto [t, rep] = read_transcript_file(path);
      if (!rep) {
        // Not yet cleaned: treat as loop-free.
        CleanReport fresh;
        fresh.raw_segment_count = static_cast<int>(t.segments.size());
        fresh.clean_segment_count = fresh.raw_segment_count;
        rep = fresh;
      }
      reports.emplace_back(t.lecture_id, *rep);
      transcripts.push_back(std::move(t));
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  CorpusStats stats;
  std::optional<ComparisonReport> comparison;
  std::optional<RunReport> analyses;
  try {
    stats = corpus_stats(transcripts, reports);

    if (!compare_dir.empty()) {
      std::vector<Transcript> other;
      for (const auto& path : sorted_files(compare_dir, {".json", ".txt"})) {
        other.push_back(parse_transcript(path, path.extension() == ".txt"
                                                   ? TranscriptFormat::PlainText
                                                   : TranscriptFormat::SegmentedJson));
      }
      std::vector<std::string> terms;
      for (const auto& line : load_stopword_file(terms_path)) terms.push_back(line);
      comparison = compare_corpora(other, transcripts, terms);
    }

    if (!analysis_dir.empty()) {
      std::ifstream run(fs::path(analysis_dir) / "run_report.json");
      if (!run) throw ParseError("cannot open " + analysis_dir + "/run_report.json");
      analyses = run_report_from_json(nlohmann::json::parse(run));
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitPartial;
  }

  RenderedReport rendered = render_reports(stats, comparison, analyses);
  out << rendered.text;
  if (!json_out.empty()) {
    std::ofstream file(json_out, std::ios::binary);
    if (!file) {
      err << "error: cannot write " << json_out << "\n";
      return kExitPartial;
    }
    file << rendered.machine.dump(2) << "\n";
  }
  return kExitOk;
}

int cmd_vocab(const AppConfig& cfg, const std::string& pages, int budget,
              const std::string& out_file, std::ostream& out, std::ostream& err) {
  std::optional<PageRange> window;
  if (!pages.empty()) {
    auto colon = pages.find(':');
    try {
      if (colon == std::string::npos) throw std::invalid_argument(pages);
      PageRange range{std::stoi(pages.substr(0, colon)), std::stoi(pages.substr(colon + 1))};
      if (range.first < 1 || range.first > range.last) throw std::invalid_argument(pages);
      window = range;
    } catch (const std::exception&) {
      err << "error: --pages expects FIRST:LAST with 1 <= FIRST <= LAST\n";
      return kExitUsage;
    }
  }
  if (budget < 1) {
    err << "error: --budget must be positive\n";
    return kExitUsage;
  }

  std::vector<IndexEntry> index;
  try {
    index = parse_index(cfg.index_path);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  std::string prompt = vocabulary_prompt(index, window, budget);
  out << prompt << "\n";
  if (!out_file.empty()) {
    std::ofstream file(out_file, std::ios::binary);
    if (!file || !(file << prompt << "\n")) {
      err << "error: cannot write " << out_file << "\n";
      return kExitPartial;
    }
  }
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"lectern: textbook-index query answering and lecture-transcript analytics"};
  app.require_subcommand(1);

  std::string config_path;
  std::string llm_url;
  std::string llm_model;
  app.add_option("--config", config_path, "key = value config file");
  app.add_option("--llm-url", llm_url, "inference endpoint base URL");
  app.add_option("--model", llm_model, "model name");
  std::string index_path;
  std::string nav_path;
  std::string lexicon_path;
  std::string stopword_path;
  app.add_option("--index", index_path, "bindex_tab.json path");
  app.add_option("--nav", nav_path, "ftoc_nav_tree.json path");
  app.add_option("--lexicon", lexicon_path, "phrase lexicon path");
  app.add_option("--stopwords", stopword_path, "stopword list path");

  auto* clean = app.add_subcommand("clean", "detect and remove hallucination loops");
  std::string clean_in;
  std::string clean_out;
  clean->add_option("--in", clean_in, "directory of raw transcript JSON files")->required();
  clean->add_option("--out", clean_out, "output directory")->required();

  auto* query = app.add_subcommand("query", "answer questions against the textbook index");
  std::string ask;
  bool no_llm = false;
  bool explain = false;
  std::string query_log;
  double threshold = -1.0;
  int context_k = 0;
  query->add_option("--ask", ask, "one-shot question (REPL otherwise)");
  query->add_flag("--no-llm", no_llm, "pattern-only extraction and fallback synthesis");
  query->add_flag("--explain", explain, "print the merged scored matches as JSON");
  query->add_option("--query-log", query_log, "query log path (JSONL)");
  query->add_option("--threshold", threshold, "minimum merged score");
  query->add_option("--k", context_k, "context entries to assemble");

  auto* analyze = app.add_subcommand("analyze", "run the structured lecture analyses");
  std::string analyze_in;
  std::string analyze_out;
  std::string kinds = "summary,questions,confusion,anecdotes";
  analyze->add_option("--in", analyze_in, "directory of cleaned transcripts")->required();
  analyze->add_option("--out", analyze_out, "analysis output directory");
  analyze->add_option("--kinds", kinds, "comma list: summary,questions,confusion,anecdotes");

  auto* report = app.add_subcommand("report", "corpus statistics and comparisons");
  std::string stats_dir;
  std::string compare_dir;
  std::string terms_path;
  std::string analysis_dir;
  std::string json_out;
  report->add_option("--stats", stats_dir, "directory of cleaned transcripts");
  report->add_option("--compare", compare_dir, "second transcript directory (A side)");
  report->add_option("--terms", terms_path, "domain term list for the comparison");
  report->add_option("--analysis", analysis_dir, "analysis directory with run_report.json");
  report->add_option("--json", json_out, "also write machine-readable report here");

  auto* vocab = app.add_subcommand("vocab", "emit an ASR vocabulary prompt from the index");
  std::string pages;
  int budget = 224;
  std::string vocab_out;
  vocab->add_option("--pages", pages, "page window FIRST:LAST");
  vocab->add_option("--budget", budget, "token budget (4 chars per token)");
  vocab->add_option("--out", vocab_out, "also write the prompt to this file");

  try {
    // CLI11's vector overload takes the arguments reversed, program name
    // excluded.
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(std::move(reversed));
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  AppConfig cfg;
  if (!config_path.empty()) {
    try {
      cfg = load_config_file(config_path);
    } catch (const std::exception& e) {
      err << "error: " << e.what() << "\n";
      return kExitUsage;
    }
  }
  apply_env_overrides(cfg);
  if (!llm_url.empty()) cfg.gateway.base_url = llm_url;
  if (!llm_model.empty()) cfg.gateway.model_name = llm_model;
  if (!index_path.empty()) cfg.index_path = index_path;
  if (!nav_path.empty()) cfg.nav_tree_path = nav_path;
  if (!lexicon_path.empty()) cfg.lexicon_path = lexicon_path;
  if (!stopword_path.empty()) cfg.stopword_path = stopword_path;

  try {
    if (clean->parsed()) return cmd_clean(cfg, clean_in, clean_out, out, err);
    if (query->parsed()) {
      if (!query_log.empty()) cfg.query_log_path = query_log;
      if (threshold >= 0.0) cfg.threshold = threshold;
      if (context_k > 0) cfg.context_k = context_k;
      std::optional<std::string> one_shot;
      if (query->count("--ask")) one_shot = ask;
      return cmd_query(cfg, one_shot, no_llm, explain, in, out, err);
    }
    if (analyze->parsed()) {
      std::string out_dir = analyze_out.empty() ? cfg.analysis_dir : analyze_out;
      return cmd_analyze(cfg, analyze_in, out_dir, kinds, out, err);
    }
    if (report->parsed()) {
      if (stats_dir.empty()) {
        err << "usage: report needs --stats DIR (optionally --compare DIR --terms FILE, "
               "--analysis DIR)\n";
        return kExitUsage;
      }
      if (!compare_dir.empty() && terms_path.empty()) {
        err << "usage: --compare needs --terms FILE\n";
        return kExitUsage;
      }
      return cmd_report(cfg, stats_dir, compare_dir, terms_path, analysis_dir, json_out, out,
                        err);
    }
    if (vocab->parsed()) return cmd_vocab(cfg, pages, budget, vocab_out, out, err);
  } catch (const GatewayUnavailable& e) {
    err << "error: " << e.what() << "\n";
    return kExitServiceDown;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitPartial;
  }
  return kExitUsage;
}

}  // namespace lectern::cli
