// SPDX-License-Identifier: Apache-2.0
#include "microforge/policy/lexer.hpp"

#include <cctype>
#include <charconv>

#include "microforge/policy/ast.hpp"
#include "microforge/policy/parser.hpp"

namespace microforge::policy {

namespace {

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }
bool digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }

}  // namespace

std::vector<Token> tokenize(std::string_view src) {
  std::vector<Token> out;
  std::size_t i = 0;
  int line = 1;
  int col = 1;
  auto advance = [&](std::size_t count) {
    for (std::size_t k = 0; k < count && i < src.size(); ++k, ++i) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };

  while (i < src.size()) {
    char c = src[i];
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
      advance(1);
      continue;
    }
    if (c == '#') {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    Token tok;
    tok.span = {line, col};
    std::size_t start = i;
    if (ident_start(c)) {
      while (i < src.size() && ident_char(src[i])) advance(1);
      tok.text = std::string(src.substr(start, i - start));
      tok.kind = is_keyword(tok.text) ? TokenKind::keyword : TokenKind::identifier;
    } else if (digit(c) || (c == '.' && i + 1 < src.size() && digit(src[i + 1]))) {
      std::size_t j = i;
      while (j < src.size() && digit(src[j])) ++j;
      if (j < src.size() && src[j] == '.') {
        ++j;
        while (j < src.size() && digit(src[j])) ++j;
      }
      if (j < src.size() && (src[j] == 'e' || src[j] == 'E')) {
        std::size_t k = j + 1;
        if (k < src.size() && (src[k] == '+' || src[k] == '-')) ++k;
        if (k < src.size() && digit(src[k])) {
          while (k < src.size() && digit(src[k])) ++k;
          j = k;
        }
      }
      tok.kind = TokenKind::number;
      tok.text = std::string(src.substr(i, j - i));
      auto [ptr, ec] = std::from_chars(tok.text.data(), tok.text.data() + tok.text.size(), tok.number);
      if (ec != std::errc{} || ptr != tok.text.data() + tok.text.size()) {
        throw ParseError(tok.span, "malformed number '" + tok.text + "'");
      }
      advance(j - i);
    } else if (c == '"') {
      advance(1);
      std::string value;
      bool closed = false;
      while (i < src.size()) {
        char ch = src[i];
        if (ch == '\n') break;
        if (ch == '"') {
          advance(1);
          closed = true;
          break;
        }
        if (ch == '\\' && i + 1 < src.size() && (src[i + 1] == '"' || src[i + 1] == '\\')) {
          value.push_back(src[i + 1]);
          advance(2);
          continue;
        }
        value.push_back(ch);
        advance(1);
      }
      if (!closed) throw ParseError(tok.span, "unterminated string literal");
      tok.kind = TokenKind::string;
      tok.text = std::move(value);
    } else {
      static constexpr std::string_view two[] = {"<=", ">=", "==", "!="};
      std::string_view rest = src.substr(i);
      std::string_view matched;
      for (std::string_view op : two) {
        if (rest.starts_with(op)) matched = op;
      }
      if (matched.empty()) {
        static constexpr std::string_view singles = "{}(),=+-*/<>";
        if (singles.find(c) == std::string_view::npos) {
          throw ParseError(tok.span, std::string("unexpected character '") + c + "'");
        }
        matched = rest.substr(0, 1);
      }
      tok.kind = TokenKind::punct;
      tok.text = std::string(matched);
      advance(matched.size());
    }
    out.push_back(std::move(tok));
  }
  Token end;
  end.kind = TokenKind::end;
  end.span = {line, col};
  out.push_back(end);
  return out;
}

}  // namespace microforge::policy
