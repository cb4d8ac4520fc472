// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <stdexcept>
#include <string>

namespace microforge {

/// 1-based source position inside a policy file.
struct Span {
  int line = 0;
  int column = 0;

  friend bool operator==(const Span&, const Span&) = default;
};

std::string to_string(const Span& span);

/// Base for every recoverable domain error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A caller broke a documented precondition.
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class LoadError : public Error {
 public:
  LoadError(const std::string& what, std::optional<int> line = std::nullopt);
  std::optional<int> line() const { return line_; }

 private:
  std::optional<int> line_;
};

/// Raised when an episode cannot run to completion (runtime policy fault or a
/// policy that does not bind to the scenario).
class EpisodeError : public Error {
 public:
  EpisodeError(const std::string& message, long tick, std::optional<Span> span = std::nullopt);

  const std::string& message() const { return message_; }
  long tick() const { return tick_; }
  const std::optional<Span>& span() const { return span_; }
  const std::optional<int>& episode() const { return episode_; }

  EpisodeError with_episode(int episode) const;

 private:
  static std::string compose(const std::string& message, long tick, const std::optional<Span>& span,
                             const std::optional<int>& episode);

  std::string message_;
  long tick_;
  std::optional<Span> span_;
  std::optional<int> episode_;
};

}  // namespace microforge
