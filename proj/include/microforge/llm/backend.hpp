// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <chrono>
#include <filesystem>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <semaphore>
#include <string>
#include <vector>

#include "microforge/common/errors.hpp"
#include "microforge/llm/templates.hpp"

namespace microforge::llm {

class BackendError : public Error {
 public:
  using Error::Error;
};

class ReplayExhausted : public BackendError {
 public:
  using BackendError::BackendError;
};

class ReplayMismatch : public BackendError {
 public:
  ReplayMismatch(std::size_t index, std::string expected, std::string actual);
  std::size_t index() const { return index_; }

 private:
  std::size_t index_;
};

inline constexpr double kPlannerTemperature = 0.7;
inline constexpr double kCoderTemperature = 0.7;
inline constexpr double kAugmentTemperature = 0.7;
inline constexpr double kCriticTemperature = 0.2;

struct ChatRequest {
  std::string model;
  std::vector<ChatMessage> messages;
  double temperature = 0.7;

  /// Throws ContractViolation unless the first message is a system message
  /// and every content is non-empty.
  void validate() const;
};

/// Lowercase hex SHA-256 over a canonical serialization of the messages.
/// Model and temperature do not take part.
std::string request_digest(const std::vector<ChatMessage>& messages);

class ChatBackend {
 public:
  virtual ~ChatBackend() = default;
  virtual std::string complete(const ChatRequest& request) = 0;
};

struct TranscriptRecord {
  std::string digest;
  std::string response;
  friend bool operator==(const TranscriptRecord&, const TranscriptRecord&) = default;
};

struct Transcript {
  std::vector<TranscriptRecord> records;
};

/// JSON Lines, one {digest, response} object per line. Blank lines are skipped.
/// Throws LoadError carrying the 1-based line number of a malformed record.
Transcript load_transcript(const std::filesystem::path& path);
std::string to_jsonl(const TranscriptRecord& record);

struct HttpConfig {
  std::string base_url = "http://localhost:8000";
  std::string api_key;
  std::string model = "default";
  int attempts = 3;
  std::chrono::milliseconds initial_backoff{1000};
  int max_in_flight = 4;
  std::chrono::seconds timeout{120};

  /// Reads LLM_BASE_URL and LLM_API_KEY when set.
  static HttpConfig from_env();
};

/// OpenAI-compatible chat completions over HTTP(S) with bounded retries.
class HttpBackend final : public ChatBackend {
 public:
  explicit HttpBackend(HttpConfig config);
  std::string complete(const ChatRequest& request) override;
  const HttpConfig& config() const { return config_; }

 private:
  HttpConfig config_;
  std::string origin_;
  std::string path_;
  std::counting_semaphore<> slots_;
};

enum class MismatchPolicy { strict, warn };

/// Serves stored responses strictly in order.
class ReplayBackend final : public ChatBackend {
 public:
  ReplayBackend(Transcript transcript, MismatchPolicy policy = MismatchPolicy::strict);
  std::string complete(const ChatRequest& request) override;
  std::size_t position() const;
  std::vector<std::string> warnings() const;

 private:
  Transcript transcript_;
  MismatchPolicy policy_;
  mutable std::mutex mutex_;
  std::size_t next_ = 0;
  std::vector<std::string> warnings_;
};

/// Forwards to another backend and appends each exchange to a transcript file.
class RecordBackend final : public ChatBackend {
 public:
  RecordBackend(std::shared_ptr<ChatBackend> inner, std::filesystem::path path);
  std::string complete(const ChatRequest& request) override;
  std::size_t size() const;

 private:
  std::shared_ptr<ChatBackend> inner_;
  std::filesystem::path path_;
  mutable std::mutex mutex_;
  std::size_t count_ = 0;
};

/// Canned responses in order, for tests and fixture authoring.
class ScriptedBackend final : public ChatBackend {
 public:
  explicit ScriptedBackend(std::vector<std::string> responses);
  std::string complete(const ChatRequest& request) override;
  const std::vector<ChatRequest>& requests() const { return requests_; }

 private:
  std::vector<std::string> responses_;
  std::vector<ChatRequest> requests_;
  std::mutex mutex_;
};

/// Parses "http", "replay:PATH", "replay-warn:PATH" or "record:PATH".
/// Record mode wraps an HTTP backend built from `http`.
std::shared_ptr<ChatBackend> make_backend(const std::string& selector, const HttpConfig& http);

}  // namespace microforge::llm
