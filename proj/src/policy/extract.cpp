// SPDX-License-Identifier: Apache-2.0
#include "microforge/policy/extract.hpp"

namespace microforge::policy {

namespace {

std::optional<std::string> tag_body(std::string_view text, std::string_view tag) {
  std::string open = "<" + std::string(tag) + ">";
  std::string close = "</" + std::string(tag) + ">";
  auto begin = text.find(open);
  if (begin == std::string_view::npos) return std::nullopt;
  begin += open.size();
  auto end = text.find(close, begin);
  if (end == std::string_view::npos) return std::nullopt;
  return std::string(text.substr(begin, end - begin));
}

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

// An opening fence is ``` followed by an info string up to end of line. Lines
// like ```[Improve Tactic]``` carry backticks in the info string and are not fences.
std::optional<std::string> first_fence(std::string_view text) {
  std::size_t pos = 0;
  while ((pos = text.find("```", pos)) != std::string_view::npos) {
    auto eol = text.find('\n', pos + 3);
    if (eol == std::string_view::npos) return std::nullopt;
    std::string_view info = text.substr(pos + 3, eol - pos - 3);
    if (info.find('`') != std::string_view::npos) {
      pos = pos + 3 + info.find('`');
      while (pos < text.size() && text[pos] == '`') ++pos;
      continue;
    }
    std::size_t body = eol + 1;
    std::size_t close = text.find("```", body);
    if (close == std::string_view::npos) return std::nullopt;
    return std::string(text.substr(body, close - body));
  }
  return std::nullopt;
}

}  // namespace

Extracted extract_code_block(std::string_view response, std::string id, Origin origin) {
  Extracted out;
  out.strategy = tag_body(response, "strategy");
  if (out.strategy) out.strategy = trim(*out.strategy);
  std::optional<std::string> code;
  if (auto inner = tag_body(response, "code")) code = first_fence(*inner);
  if (!code) code = first_fence(response);
  if (!code || trim(*code).empty()) throw ExtractError("no fenced code block in response");
  out.source = PolicySource{std::move(id), std::move(*code), origin};
  return out;
}

}  // namespace microforge::policy
