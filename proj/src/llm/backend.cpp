// SPDX-License-Identifier: Apache-2.0
#include "microforge/llm/backend.hpp"

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <thread>

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>
#include <nlohmann/json.hpp>
#include <openssl/evp.h>

namespace microforge::llm {

using nlohmann::json;

ReplayMismatch::ReplayMismatch(std::size_t index, std::string expected, std::string actual)
    : BackendError("replay digest mismatch at record " + std::to_string(index + 1) + ": expected " + expected +
                   ", got " + actual),
      index_(index) {}

void ChatRequest::validate() const {
  if (messages.empty() || messages.front().role != "system") {
    throw ContractViolation("chat request must start with a system message");
  }
  for (const ChatMessage& m : messages) {
    if (m.content.empty()) throw ContractViolation("chat message content must be non-empty");
    if (m.role != "system" && m.role != "user" && m.role != "assistant") {
      throw ContractViolation("unknown chat role: " + m.role);
    }
  }
}

std::string request_digest(const std::vector<ChatMessage>& messages) {
  json canonical = json::array();
  for (const ChatMessage& m : messages) canonical.push_back(json::array({m.role, m.content}));
  std::string bytes = canonical.dump();

  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1) {
    throw Error("sha256 digest failed");
  }
  std::ostringstream hex;
  for (unsigned int i = 0; i < len; ++i) hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
  return hex.str();
}

Transcript load_transcript(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError("cannot read transcript " + path.string());
  Transcript t;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    json doc = json::parse(line, nullptr, false);
    if (doc.is_discarded() || !doc.is_object() || !doc.contains("digest") || !doc.contains("response") ||
        !doc["digest"].is_string() || !doc["response"].is_string()) {
      throw LoadError("malformed transcript record", number);
    }
    t.records.push_back({doc["digest"].get<std::string>(), doc["response"].get<std::string>()});
  }
  return t;
}

std::string to_jsonl(const TranscriptRecord& record) {
  return json{{"digest", record.digest}, {"response", record.response}}.dump() + "\n";
}

HttpConfig HttpConfig::from_env() {
  HttpConfig c;
  if (const char* url = std::getenv("LLM_BASE_URL")) c.base_url = url;
  if (const char* key = std::getenv("LLM_API_KEY")) c.api_key = key;
  return c;
}

namespace {

void split_url(const std::string& url, std::string& origin, std::string& path) {
  auto scheme = url.find("://");
  auto slash = url.find('/', scheme == std::string::npos ? 0 : scheme + 3);
  origin = slash == std::string::npos ? url : url.substr(0, slash);
  path = slash == std::string::npos ? "" : url.substr(slash);
  while (!path.empty() && path.back() == '/') path.pop_back();
}

}  // namespace

HttpBackend::HttpBackend(HttpConfig config)
    : config_(std::move(config)), slots_(std::max(1, config_.max_in_flight)) {
  if (config_.attempts < 1) throw ContractViolation("http attempts must be >= 1");
  split_url(config_.base_url, origin_, path_);
  path_ += "/v1/chat/completions";
}

std::string HttpBackend::complete(const ChatRequest& request) {
  request.validate();
  json body = {{"model", request.model.empty() ? config_.model : request.model},
               {"messages", json::array()},
               {"temperature", request.temperature}};
  for (const ChatMessage& m : request.messages) body["messages"].push_back({{"role", m.role}, {"content", m.content}});
  const std::string payload = body.dump();

  slots_.acquire();
  struct Release {
    std::counting_semaphore<>& s;
    ~Release() { s.release(); }
  } release{slots_};

  std::string last_error;
  auto backoff = config_.initial_backoff;
  for (int attempt = 1; attempt <= config_.attempts; ++attempt) {
    httplib::Client client(origin_);
    client.set_connection_timeout(config_.timeout);
    client.set_read_timeout(config_.timeout);
    client.set_write_timeout(config_.timeout);
    httplib::Headers headers;
    if (!config_.api_key.empty()) headers.emplace("Authorization", "Bearer " + config_.api_key);
    auto res = client.Post(path_, headers, payload, "application/json");
    if (!res) {
      last_error = "transport error: " + httplib::to_string(res.error());
    } else if (res->status == 200) {
      json doc = json::parse(res->body, nullptr, false);
      if (!doc.is_discarded() && doc.contains("choices") && doc["choices"].is_array() && !doc["choices"].empty()) {
        const json& msg = doc["choices"][0]["message"];
        if (msg.contains("content") && msg["content"].is_string()) return msg["content"].get<std::string>();
      }
      throw BackendError("chat completion response has no choices[0].message.content");
    } else if (res->status >= 400 && res->status < 500 && res->status != 408 && res->status != 429) {
      throw BackendError("chat completion rejected with HTTP " + std::to_string(res->status) + ": " + res->body);
    } else {
      last_error = "HTTP " + std::to_string(res->status);
    }
    if (attempt < config_.attempts) {
      std::this_thread::sleep_for(backoff);
      backoff *= 2;
    }
  }
  throw BackendError("chat completion failed after " + std::to_string(config_.attempts) + " attempts: " + last_error);
}

ReplayBackend::ReplayBackend(Transcript transcript, MismatchPolicy policy)
    : transcript_(std::move(transcript)), policy_(policy) {}

std::string ReplayBackend::complete(const ChatRequest& request) {
  request.validate();
  std::lock_guard lock(mutex_);
  if (next_ >= transcript_.records.size()) {
    throw ReplayExhausted("replay transcript exhausted after " + std::to_string(transcript_.records.size()) +
                          " records");
  }
  const TranscriptRecord& record = transcript_.records[next_];
  std::string actual = request_digest(request.messages);
  if (actual != record.digest) {
    if (policy_ == MismatchPolicy::strict) throw ReplayMismatch(next_, record.digest, actual);
    warnings_.push_back("record " + std::to_string(next_ + 1) + ": digest mismatch");
  }
  ++next_;
  return record.response;
}

std::size_t ReplayBackend::position() const {
  std::lock_guard lock(mutex_);
  return next_;
}

std::vector<std::string> ReplayBackend::warnings() const {
  std::lock_guard lock(mutex_);
  return warnings_;
}

RecordBackend::RecordBackend(std::shared_ptr<ChatBackend> inner, std::filesystem::path path)
    : inner_(std::move(inner)), path_(std::move(path)) {
  std::ofstream truncate(path_, std::ios::binary | std::ios::trunc);
  if (!truncate) throw BackendError("cannot open transcript for writing: " + path_.string());
}

std::string RecordBackend::complete(const ChatRequest& request) {
  request.validate();
  // The lock spans the call so records land in call order.
  std::lock_guard lock(mutex_);
  std::string response = inner_->complete(request);
  std::ofstream out(path_, std::ios::binary | std::ios::app);
  out << to_jsonl({request_digest(request.messages), response});
  out.flush();
  if (!out) throw BackendError("failed to append to transcript " + path_.string());
  ++count_;
  return response;
}

std::size_t RecordBackend::size() const {
  std::lock_guard lock(mutex_);
  return count_;
}

ScriptedBackend::ScriptedBackend(std::vector<std::string> responses) : responses_(std::move(responses)) {}

std::string ScriptedBackend::complete(const ChatRequest& request) {
  request.validate();
  std::lock_guard lock(mutex_);
  if (requests_.size() >= responses_.size()) throw ReplayExhausted("scripted backend has no more responses");
  requests_.push_back(request);
  return responses_[requests_.size() - 1];
}

std::shared_ptr<ChatBackend> make_backend(const std::string& selector, const HttpConfig& http) {
  auto after = [&](std::string_view prefix) { return selector.substr(prefix.size()); };
  if (selector == "http") return std::make_shared<HttpBackend>(http);
  if (selector.starts_with("replay:")) {
    return std::make_shared<ReplayBackend>(load_transcript(after("replay:")), MismatchPolicy::strict);
  }
  if (selector.starts_with("replay-warn:")) {
    return std::make_shared<ReplayBackend>(load_transcript(after("replay-warn:")), MismatchPolicy::warn);
  }
  if (selector.starts_with("record:")) {
    return std::make_shared<RecordBackend>(std::make_shared<HttpBackend>(http), after("record:"));
  }
  throw ContractViolation("unknown backend selector '" + selector + "' (expected http, replay:PATH or record:PATH)");
}

}  // namespace microforge::llm
