// In-process mock of the local inference endpoint. Replays scripted
// response strings in order and captures every request for assertions.
#pragma once

#include <deque>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <httplib.h>
#include <json.hpp>

namespace lectern::testing {

struct CapturedRequest {
  std::string model;
  std::string system;
  std::string prompt;
  bool json_mode = false;
  int num_ctx = 0;
  double temperature = -1.0;
};

class MockLlm {
 public:
  MockLlm() {
    server_.Get("/api/tags", [](const httplib::Request&, httplib::Response& res) {
      res.set_content(R"({"models":[{"name":"mock"}]})", "application/json");
    });
    server_.Post("/api/generate", [this](const httplib::Request& req, httplib::Response& res) {
      nlohmann::json body = nlohmann::json::parse(req.body);
      CapturedRequest captured;
      captured.model = body.value("model", "");
      captured.system = body.value("system", "");
      captured.prompt = body.value("prompt", "");
      captured.json_mode = body.contains("format") && body["format"] == "json";
      if (body.contains("options")) {
        captured.num_ctx = body["options"].value("num_ctx", 0);
        captured.temperature = body["options"].value("temperature", -1.0);
      }

      std::string reply;
      bool fail_http = false;
      {
        std::lock_guard lock(mu_);
        requests_.push_back(captured);
        if (!scripted_.empty()) {
          reply = scripted_.front();
          scripted_.pop_front();
          if (reply == kHttpErrorMarker) fail_http = true;
        } else {
          reply = default_response_;
        }
      }
      if (fail_http) {
        res.status = 500;
        res.set_content("mock failure", "text/plain");
        return;
      }
      nlohmann::json out;
      out["response"] = reply;
      out["done"] = true;
      res.set_content(out.dump(), "application/json");
    });

    port_ = server_.bind_to_any_port("127.0.0.1");
    if (port_ <= 0) throw std::runtime_error("mock server could not bind a port");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }

  ~MockLlm() {
    server_.stop();
    if (thread_.joinable()) thread_.join();
  }

  MockLlm(const MockLlm&) = delete;
  MockLlm& operator=(const MockLlm&) = delete;

  std::string url() const { return "http://127.0.0.1:" + std::to_string(port_); }

  // Queues the content of the "response" field for the next request.
  void script(std::string response) {
    std::lock_guard lock(mu_);
    scripted_.push_back(std::move(response));
  }

  // Queues an HTTP 500 for the next request.
  void script_http_error() {
    std::lock_guard lock(mu_);
    scripted_.push_back(kHttpErrorMarker);
  }

  void set_default_response(std::string response) {
    std::lock_guard lock(mu_);
    default_response_ = std::move(response);
  }

  std::vector<CapturedRequest> requests() const {
    std::lock_guard lock(mu_);
    return requests_;
  }

  size_t request_count() const {
    std::lock_guard lock(mu_);
    return requests_.size();
  }

  void reset() {
    std::lock_guard lock(mu_);
    requests_.clear();
    scripted_.clear();
  }

 private:
  static constexpr const char* kHttpErrorMarker = "\x01__http_error__";

  httplib::Server server_;
  std::thread thread_;
  int port_ = 0;
  mutable std::mutex mu_;
  std::deque<std::string> scripted_;
  std::vector<CapturedRequest> requests_;
  std::string default_response_ = "{}";
};

// A base URL nothing listens on, for unavailability tests.
inline std::string dead_endpoint() { return "http://127.0.0.1:9"; }

}  // namespace lectern::testing
