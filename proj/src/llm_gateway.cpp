#include "lectern/llm_gateway.hpp"

#include <chrono>
#include <condition_variable>
#include <memory>
#include <mutex>

#include <httplib.h>

#include "lectern/errors.hpp"
#include "lectern/text_util.hpp"

namespace lectern {

using nlohmann::json;

std::string to_string(NoteKind kind) {
  switch (kind) {
    case NoteKind::PlaceholderHit: return "placeholder_hit";
    case NoteKind::FieldAliasUsed: return "field_alias_used";
    case NoteKind::Repaired: return "repaired";
    case NoteKind::FastResponseWarning: return "fast_response_warning";
    case NoteKind::Dropped: return "dropped";
  }
  return "unknown";
}

namespace {

// Walks every string value and reports the first blacklisted literal found.
std::optional<std::string> find_placeholder(const json& value,
                                            const std::vector<std::string>& blacklist,
                                            const std::string& where) {
  if (value.is_string()) {
    const std::string& s = value.get_ref<const std::string&>();
    for (const auto& literal : blacklist) {
      if (s.find(literal) != std::string::npos)
        return "placeholder literal \"" + literal + "\" at " + where;
    }
    return std::nullopt;
  }
  if (value.is_array()) {
    int i = 0;
    for (const auto& el : value) {
      if (auto hit = find_placeholder(el, blacklist, where + "[" + std::to_string(i) + "]"))
        return hit;
      ++i;
    }
  }
  if (value.is_object()) {
    for (const auto& [k, v] : value.items()) {
      if (auto hit = find_placeholder(v, blacklist, where + "." + k)) return hit;
    }
  }
  return std::nullopt;
}

bool timestamp_shape_ok(const std::string& s) {
  return text::parse_hms(s).has_value();
}

}  // namespace

nlohmann::json resolve_record(const nlohmann::json& obj, const SchemaSpec& schema,
                              std::vector<DecodeNote>& notes) {
  if (!obj.is_object()) throw SchemaError("expected a JSON object, got " + std::string(obj.type_name()));

  json out = json::object();
  for (const auto& field : schema.fields) {
    const json* value = nullptr;
    if (obj.contains(field.name)) {
      value = &obj.at(field.name);  // primary name wins even when an alias is also present
    } else {
      for (const auto& alias : field.aliases) {
        if (obj.contains(alias)) {
          value = &obj.at(alias);
          notes.push_back({NoteKind::FieldAliasUsed,
                           "field '" + field.name + "' supplied as '" + alias + "'"});
          break;
        }
      }
    }
    if (!value) {
      if (field.required) throw SchemaError("missing required field '" + field.name + "'");
      continue;
    }

    switch (field.kind) {
      case FieldKind::String: {
        if (!value->is_string())
          throw SchemaError("field '" + field.name + "' must be a string");
        out[field.name] = *value;
        break;
      }
      case FieldKind::Timestamp: {
        if (!value->is_string() || !timestamp_shape_ok(value->get<std::string>()))
          throw SchemaError("field '" + field.name + "' must be an H:MM:SS timestamp");
        out[field.name] = *value;
        break;
      }
      case FieldKind::Object: {
        if (!value->is_object())
          throw SchemaError("field '" + field.name + "' must be an object");
        out[field.name] = *value;
        break;
      }
      case FieldKind::Array: {
        if (!value->is_array())
          throw SchemaError("field '" + field.name + "' must be an array");
        json arr = json::array();
        int i = 0;
        for (const auto& el : *value) {
          bool keep = true;
          if (field.elements == ElementKind::Objects && !el.is_object()) {
            keep = false;
            notes.push_back({NoteKind::Dropped, "discarded non-object element " +
                                                    std::to_string(i) + " of '" + field.name +
                                                    "'"});
          }
          if (field.elements == ElementKind::Strings && !el.is_string()) {
            keep = false;
            notes.push_back({NoteKind::Dropped, "discarded non-string element " +
                                                    std::to_string(i) + " of '" + field.name +
                                                    "'"});
          }
          if (keep) arr.push_back(el);
          ++i;
        }
        out[field.name] = std::move(arr);
        break;
      }
    }
  }
  return out;
}

std::pair<nlohmann::json, std::vector<DecodeNote>> decode_structured(std::string_view raw,
                                                                     const SchemaSpec& schema) {
  json doc;
  try {
    doc = json::parse(raw);
  } catch (const json::parse_error& e) {
    throw MalformedOutput(std::string("undecodable model output: ") + e.what());
  }

  std::vector<DecodeNote> notes;
  if (auto hit = find_placeholder(doc, schema.placeholder_blacklist, "$")) {
    notes.push_back({NoteKind::PlaceholderHit, *hit});
    throw PlaceholderError(*hit);
  }
  json record = resolve_record(doc, schema, notes);
  return {std::move(record), std::move(notes)};
}

std::optional<double> validate_timestamp(std::string_view value, double transcript_duration_s,
                                         std::string* reason) {
  auto seconds = text::parse_hms(value, reason);
  if (!seconds) return std::nullopt;
  if (*seconds > transcript_duration_s + 60.0) {
    if (reason)
      *reason = "timestamp " + std::string(value) + " exceeds the transcript end by more than 60 s";
    return std::nullopt;
  }
  return seconds;
}

// Simple permit pool; the default single lane serializes requests to the
// local server.
struct LlmGateway::Lanes {
  std::mutex mu;
  std::condition_variable cv;
  int available = 1;
};

class LlmGateway::LaneGuard {
 public:
  explicit LaneGuard(Lanes& lanes) : lanes_(lanes) {
    std::unique_lock lock(lanes_.mu);
    lanes_.cv.wait(lock, [&] { return lanes_.available > 0; });
    --lanes_.available;
  }
  ~LaneGuard() {
    {
      std::lock_guard lock(lanes_.mu);
      ++lanes_.available;
    }
    lanes_.cv.notify_one();
  }
  LaneGuard(const LaneGuard&) = delete;
  LaneGuard& operator=(const LaneGuard&) = delete;

 private:
  Lanes& lanes_;
};

LlmGateway::LlmGateway(GatewayConfig config) : config_(std::move(config)) {
  if (config_.temperature < 0.0 || config_.temperature > 2.0)
    throw ValidationError("gateway temperature must lie in [0, 2]");
  if (config_.context_tokens <= 0)
    throw ValidationError("gateway context_tokens must be positive");
  lanes_ = std::make_shared<Lanes>();
  lanes_->available = config_.lanes > 0 ? config_.lanes : 1;
}

bool LlmGateway::probe() const {
  httplib::Client client(config_.base_url);
  client.set_connection_timeout(std::chrono::milliseconds(2000));
  client.set_read_timeout(std::chrono::milliseconds(2000));
  auto res = client.Get("/api/tags");
  return res && res->status == 200;
}

GenerateResult LlmGateway::generate(std::string_view system_prompt, std::string_view user_prompt,
                                    const GenerateOptions& opts) const {
  json body;
  body["model"] = config_.model_name;
  body["prompt"] = std::string(user_prompt);
  body["system"] = std::string(system_prompt);
  if (opts.json_mode) body["format"] = "json";
  body["stream"] = false;
  body["options"] = {{"num_ctx", opts.num_ctx.value_or(config_.context_tokens)},
                     {"temperature", opts.temperature.value_or(config_.temperature)}};
  std::string payload = body.dump();

  LlmExchange exchange;
  exchange.prompt_chars =
      static_cast<long long>(system_prompt.size()) + static_cast<long long>(user_prompt.size());

  LaneGuard lane(*lanes_);
  auto started = std::chrono::steady_clock::now();

  httplib::Result res;
  int attempts = config_.retry_count >= 0 ? config_.retry_count + 1 : 1;
  for (int attempt = 0; attempt < attempts; ++attempt) {
    httplib::Client client(config_.base_url);
    auto timeout = std::chrono::duration<double>(config_.request_timeout_s);
    client.set_connection_timeout(std::chrono::duration_cast<std::chrono::milliseconds>(timeout));
    client.set_read_timeout(std::chrono::duration_cast<std::chrono::milliseconds>(timeout));
    client.set_write_timeout(std::chrono::duration_cast<std::chrono::milliseconds>(timeout));
    res = client.Post("/api/generate", payload, "application/json");
    if (res) break;
  }
  exchange.elapsed_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();

  if (!res)
    throw GatewayUnavailable("inference endpoint " + config_.base_url +
                             " unreachable: " + httplib::to_string(res.error()));
  if (res->status != 200)
    throw GatewayUnavailable("inference endpoint " + config_.base_url + " answered HTTP " +
                             std::to_string(res->status));

  json reply;
  try {
    reply = json::parse(res->body);
  } catch (const json::parse_error& e) {
    throw MalformedOutput(std::string("endpoint reply is not JSON: ") + e.what());
  }
  if (!reply.contains("response") || !reply["response"].is_string())
    throw MalformedOutput("endpoint reply lacks a string 'response' field");

  exchange.response_text = reply["response"].get<std::string>();
  if (exchange.elapsed_s < config_.fast_floor_s && exchange.prompt_chars > 20000) {
    exchange.decode_notes.push_back(
        {NoteKind::FastResponseWarning,
         "response in " + std::to_string(exchange.elapsed_s) + " s on a " +
             std::to_string(exchange.prompt_chars) +
             "-char prompt; possible silent truncation"});
  }
  return {exchange.response_text, std::move(exchange)};
}

StructuredResult LlmGateway::generate_structured(std::string_view system_prompt,
                                                 std::string_view user_prompt,
                                                 const SchemaSpec& schema,
                                                 const GenerateOptions& opts) const {
  GenerateOptions json_opts = opts;
  json_opts.json_mode = true;

  StructuredResult result;
  GenerateResult first = generate(system_prompt, user_prompt, json_opts);
  result.exchanges.push_back(first.exchange);
  try {
    auto [record, notes] = decode_structured(first.text, schema);
    result.record = std::move(record);
    result.notes = std::move(notes);
    return result;
  } catch (const MalformedOutput&) {
  } catch (const PlaceholderError&) {
  }

  // One corrective re-prompt, then the error stands.
  std::string repaired_system = std::string(system_prompt) +
                                "\nReturn only valid JSON. Do NOT use placeholder text; take "
                                "every value from the transcript itself.";
  GenerateResult second = generate(repaired_system, user_prompt, json_opts);
  result.exchanges.push_back(second.exchange);
  auto [record, notes] = decode_structured(second.text, schema);
  result.record = std::move(record);
  result.notes = std::move(notes);
  result.notes.push_back({NoteKind::Repaired, "decoded after one corrective re-prompt"});
  return result;
}

}  // namespace lectern
