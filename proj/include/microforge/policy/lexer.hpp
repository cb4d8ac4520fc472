// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "microforge/common/errors.hpp"

namespace microforge::policy {

enum class TokenKind { identifier, keyword, number, string, punct, end };

struct Token {
  TokenKind kind = TokenKind::end;
  std::string text;  // lexeme; for strings the unescaped contents
  double number = 0.0;
  Span span;
};

/// Splits policy source into tokens, dropping whitespace and `#` comments.
/// Throws ParseError on characters outside the language.
std::vector<Token> tokenize(std::string_view source);

}  // namespace microforge::policy
