// SPDX-License-Identifier: Apache-2.0
#include "microforge/common/errors.hpp"

namespace microforge {

std::string to_string(const Span& span) {
  return std::to_string(span.line) + ":" + std::to_string(span.column);
}

LoadError::LoadError(const std::string& what, std::optional<int> line)
    : Error(line ? "line " + std::to_string(*line) + ": " + what : what), line_(line) {}

EpisodeError::EpisodeError(const std::string& message, long tick, std::optional<Span> span)
    : Error(compose(message, tick, span, std::nullopt)), message_(message), tick_(tick), span_(span) {}

EpisodeError EpisodeError::with_episode(int episode) const {
  EpisodeError copy(*this);
  copy.episode_ = episode;
  static_cast<std::runtime_error&>(copy) = std::runtime_error(compose(message_, tick_, span_, episode));
  return copy;
}

std::string EpisodeError::compose(const std::string& message, long tick, const std::optional<Span>& span,
                                  const std::optional<int>& episode) {
  std::string out;
  if (episode) out += "episode " + std::to_string(*episode) + ", ";
  out += "tick " + std::to_string(tick);
  if (span) out += ", at " + to_string(*span);
  out += ": " + message;
  return out;
}

}  // namespace microforge
