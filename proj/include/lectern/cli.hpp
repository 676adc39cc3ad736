// Command-line entry point: clean, query, analyze, report, vocab.
// run() is the whole CLI behind a function so the REPL, one-shot queries,
// and the test suites all drive the identical code path.
#pragma once

#include <iostream>
#include <string>
#include <vector>

#include "lectern/llm_gateway.hpp"

namespace lectern::cli {

struct AppConfig {
  std::string index_path = "bindex_tab.json";
  std::string nav_tree_path = "ftoc_nav_tree.json";
  std::string transcript_dir = "clean";
  std::string analysis_dir = "analysis";
  std::string lexicon_path = "data/lexicon.txt";
  std::string stopword_path = "data/stopwords.txt";
  std::string query_log_path = "queries.log.jsonl";
  GatewayConfig gateway;
  double threshold = 10.0;
  int context_k = 5;
  double llm_extract_timeout_s = 30.0;
};

// key = value lines, '#' comments. Unknown keys are an error.
AppConfig load_config_file(const std::string& path);

// Exit statuses are stable API: 0 success, 1 partial/processing failure,
// 2 usage or input error, 3 required service unavailable.
int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out,
        std::ostream& err);

}  // namespace lectern::cli
