// Single point of contact with the local inference HTTP endpoint.
// Enforces explicit context sizing, JSON-mode decoding, placeholder
// rejection, schema-drift-tolerant parsing, and availability signaling.
#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace lectern {

struct GatewayConfig {
  std::string base_url = "http://127.0.0.1:11434";
  std::string model_name = "llama3.1:8b";
  int context_tokens = 16384;
  double temperature = 0.6;
  double request_timeout_s = 120.0;
  int retry_count = 2;
  // Elapsed time below this floor on a long prompt is the truncation
  // signature; advisory only.
  double fast_floor_s = 5.0;
  int lanes = 1;
};

enum class NoteKind { PlaceholderHit, FieldAliasUsed, Repaired, FastResponseWarning, Dropped };

struct DecodeNote {
  NoteKind kind;
  std::string detail;
};

std::string to_string(NoteKind kind);

struct LlmExchange {
  long long prompt_chars = 0;
  std::string response_text;
  double elapsed_s = 0.0;
  std::vector<DecodeNote> decode_notes;
};

enum class FieldKind { String, Array, Object, Timestamp };

// For Array fields: what the elements must be. Objects means bare strings
// are discarded with a note.
enum class ElementKind { Any, Objects, Strings };

struct FieldSpec {
  std::string name;
  std::vector<std::string> aliases;
  FieldKind kind = FieldKind::String;
  ElementKind elements = ElementKind::Any;
  bool required = true;
};

struct SchemaSpec {
  std::vector<FieldSpec> fields;
  std::vector<std::string> placeholder_blacklist = {"H:MM:SS", "MM:SS", "example.com"};
};

struct GenerateOptions {
  bool json_mode = false;
  std::optional<double> temperature;
  std::optional<int> num_ctx;
};

struct GenerateResult {
  std::string text;
  LlmExchange exchange;
};

struct StructuredResult {
  nlohmann::json record;
  std::vector<DecodeNote> notes;
  std::vector<LlmExchange> exchanges;  // one per attempt
};

// Pure decoding step: parses `raw`, rejects any blacklisted placeholder
// literal appearing in a string value, resolves field aliases to primary
// names, and type-checks. Throws MalformedOutput / PlaceholderError /
// SchemaError.
std::pair<nlohmann::json, std::vector<DecodeNote>> decode_structured(std::string_view raw,
                                                                     const SchemaSpec& schema);

// Same resolution applied to an already-parsed object (nested records).
nlohmann::json resolve_record(const nlohmann::json& obj, const SchemaSpec& schema,
                              std::vector<DecodeNote>& notes);

// Parses "H:MM:SS" and guards against fabricated values: timestamps more
// than 60 s past the transcript end are rejected.
std::optional<double> validate_timestamp(std::string_view value, double transcript_duration_s,
                                         std::string* reason = nullptr);

class LlmGateway {
 public:
  explicit LlmGateway(GatewayConfig config);

  const GatewayConfig& config() const { return config_; }

  // True when GET <base_url>/api/tags answers 200.
  bool probe() const;

  // POST <base_url>/api/generate. The configured context window is sent on
  // every request; nothing is ever truncated silently. Throws
  // GatewayUnavailable after retries; MalformedOutput when the HTTP reply
  // lacks the response field.
  GenerateResult generate(std::string_view system_prompt, std::string_view user_prompt,
                          const GenerateOptions& opts = {}) const;

  // generate + decode_structured with one automatic re-prompt on
  // placeholder or malformed output, then the error surfaces.
  StructuredResult generate_structured(std::string_view system_prompt,
                                       std::string_view user_prompt, const SchemaSpec& schema,
                                       const GenerateOptions& opts = {}) const;

 private:
  GatewayConfig config_;
  class LaneGuard;
  struct Lanes;
  std::shared_ptr<Lanes> lanes_;
};

}  // namespace lectern
