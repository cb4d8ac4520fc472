// SPDX-License-Identifier: Apache-2.0
#include "microforge/policy/parser.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "microforge/policy/lexer.hpp"

namespace microforge::policy {

namespace {

std::string join_expected(const std::vector<std::string>& expected) {
  std::string out;
  for (std::size_t i = 0; i < expected.size(); ++i) {
    if (i > 0) out += (i + 1 == expected.size()) ? " or " : ", ";
    out += expected[i];
  }
  return out;
}

std::string describe(const Token& t) {
  switch (t.kind) {
    case TokenKind::end:
      return "end of input";
    case TokenKind::string:
      return "string \"" + t.text + "\"";
    case TokenKind::number:
      return "number " + t.text;
    default:
      return "'" + t.text + "'";
  }
}

class Parser {
 public:
  explicit Parser(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

  PolicyAst program() {
    PolicyAst ast;
    expect_word("policy", TokenKind::keyword);
    const Token& name = peek();
    if (name.kind != TokenKind::string) fail({"policy name string"});
    ast.name = name.text;
    ++pos_;
    expect_punct("{");
    std::set<std::string> unit_types;
    while (!is_punct("}")) {
      if (is_word("const")) {
        ast.consts.push_back(const_decl());
      } else if (is_word("unit")) {
        UnitBlock block = unit_block();
        if (!unit_types.insert(block.unit_type).second) {
          throw NameError(block.span, block.unit_type, "duplicate unit block for '" + block.unit_type + "'");
        }
        ast.blocks.push_back(std::move(block));
      } else {
        fail({"'const'", "'unit'", "'}'"});
      }
    }
    expect_punct("}");
    if (peek().kind != TokenKind::end) fail({"end of input"});
    return ast;
  }

 private:
  const Token& peek() const { return toks_[pos_]; }

  bool is_punct(std::string_view p) const { return peek().kind == TokenKind::punct && peek().text == p; }
  bool is_word(std::string_view w) const { return peek().kind == TokenKind::keyword && peek().text == w; }

  [[noreturn]] void fail(std::vector<std::string> expected) const {
    const Token& t = peek();
    throw ParseError(t.span, "expected " + join_expected(expected) + ", found " + describe(t), std::move(expected));
  }

  void expect_punct(std::string_view p) {
    if (!is_punct(p)) fail({"'" + std::string(p) + "'"});
    ++pos_;
  }

  void expect_word(std::string_view w, TokenKind kind) {
    if (peek().kind != kind || peek().text != w) fail({"'" + std::string(w) + "'"});
    ++pos_;
  }

  Token identifier(const std::string& what) {
    if (peek().kind != TokenKind::identifier) fail({what});
    return toks_[pos_++];
  }

  double signed_number() {
    bool negative = false;
    if (is_punct("-")) {
      negative = true;
      ++pos_;
    }
    if (peek().kind != TokenKind::number) fail({"number"});
    double v = toks_[pos_++].number;
    return negative ? -v : v;
  }

  void declare(const Token& name) {
    if (is_observable(name.text) || find_action(name.text)) {
      throw NameError(name.span, name.text, "'" + name.text + "' is a built-in name");
    }
    if (consts_.contains(name.text) || vars_.contains(name.text)) {
      throw NameError(name.span, name.text, "'" + name.text + "' is already declared");
    }
  }

  ConstDecl const_decl() {
    ++pos_;  // const
    Token name = identifier("constant name");
    declare(name);
    expect_punct("=");
    ConstDecl d{name.text, signed_number(), name.span};
    consts_.insert(d.name);
    return d;
  }

  UnitBlock unit_block() {
    UnitBlock block;
    block.span = peek().span;
    ++pos_;  // unit
    block.unit_type = identifier("unit type name").text;
    expect_punct("{");
    vars_.clear();
    while (is_word("var")) {
      ++pos_;
      Token name = identifier("variable name");
      declare(name);
      expect_punct("=");
      VarDecl v{name.text, signed_number(), name.span};
      vars_.insert(v.name);
      block.vars.push_back(std::move(v));
    }
    block.body = statements();
    expect_punct("}");
    vars_.clear();
    return block;
  }

  std::vector<Stmt> statements() {
    std::vector<Stmt> out;
    while (!is_punct("}") && peek().kind != TokenKind::end) out.push_back(statement());
    return out;
  }

  std::vector<Stmt> braced() {
    expect_punct("{");
    std::vector<Stmt> body = statements();
    expect_punct("}");
    return body;
  }

  Stmt statement() {
    Stmt s;
    s.span = peek().span;
    if (is_word("if")) {
      s.kind = StmtKind::branch;
      ++pos_;
      Expr cond = expression();
      s.branches.push_back({std::move(cond), braced()});
      while (is_word("elif")) {
        ++pos_;
        Expr c = expression();
        s.branches.push_back({std::move(c), braced()});
      }
      if (is_word("else")) {
        ++pos_;
        s.has_else = true;
        s.else_body = braced();
      }
      return s;
    }
    if (is_word("set")) {
      s.kind = StmtKind::set;
      ++pos_;
      Token name = identifier("variable name");
      if (!vars_.contains(name.text)) {
        std::string why = consts_.contains(name.text) || is_observable(name.text)
                              ? "'" + name.text + "' is not a status variable"
                              : "undeclared variable '" + name.text + "'";
        throw NameError(name.span, name.text, why);
      }
      s.target = name.text;
      expect_punct("=");
      s.args.push_back(expression());
      return s;
    }
    if (peek().kind == TokenKind::identifier) {
      Token name = toks_[pos_];
      auto info = find_action(name.text);
      if (!info) throw NameError(name.span, name.text, "unknown action '" + name.text + "'");
      ++pos_;
      s.kind = StmtKind::action;
      s.action = info->kind;
      expect_punct("(");
      if (!is_punct(")")) {
        s.args.push_back(expression());
        while (is_punct(",")) {
          ++pos_;
          s.args.push_back(expression());
        }
      }
      expect_punct(")");
      if (static_cast<int>(s.args.size()) != info->arity) {
        throw ParseError(name.span, std::string(info->name) + " takes " + std::to_string(info->arity) +
                                        " argument(s), " + std::to_string(s.args.size()) + " given");
      }
      return s;
    }
    fail({"'if'", "'set'", "action"});
  }

  Expr expression() { return or_expr(); }

  Expr or_expr() {
    Expr lhs = and_expr();
    while (is_word("or")) {
      Span at = peek().span;
      ++pos_;
      lhs = Expr::binary(BinaryOp::logical_or, std::move(lhs), and_expr(), at);
    }
    return lhs;
  }

  Expr and_expr() {
    Expr lhs = not_expr();
    while (is_word("and")) {
      Span at = peek().span;
      ++pos_;
      lhs = Expr::binary(BinaryOp::logical_and, std::move(lhs), not_expr(), at);
    }
    return lhs;
  }

  Expr not_expr() {
    if (is_word("not")) {
      Span at = peek().span;
      ++pos_;
      return Expr::unary(ExprKind::logical_not, not_expr(), at);
    }
    return comparison();
  }

  Expr comparison() {
    static const std::map<std::string, BinaryOp, std::less<>> ops = {
        {"<", BinaryOp::lt}, {"<=", BinaryOp::le}, {">", BinaryOp::gt},
        {">=", BinaryOp::ge}, {"==", BinaryOp::eq}, {"!=", BinaryOp::ne}};
    Expr lhs = additive();
    if (peek().kind == TokenKind::punct) {
      if (auto it = ops.find(peek().text); it != ops.end()) {
        Span at = peek().span;
        ++pos_;
        return Expr::binary(it->second, std::move(lhs), additive(), at);
      }
    }
    return lhs;
  }

  Expr additive() {
    Expr lhs = multiplicative();
    while (is_punct("+") || is_punct("-")) {
      BinaryOp op = peek().text == "+" ? BinaryOp::add : BinaryOp::sub;
      Span at = peek().span;
      ++pos_;
      lhs = Expr::binary(op, std::move(lhs), multiplicative(), at);
    }
    return lhs;
  }

  Expr multiplicative() {
    Expr lhs = unary();
    while (is_punct("*") || is_punct("/")) {
      BinaryOp op = peek().text == "*" ? BinaryOp::mul : BinaryOp::div;
      Span at = peek().span;
      ++pos_;
      lhs = Expr::binary(op, std::move(lhs), unary(), at);
    }
    return lhs;
  }

  Expr unary() {
    if (is_punct("-")) {
      Span at = peek().span;
      ++pos_;
      return Expr::unary(ExprKind::negate, unary(), at);
    }
    return primary();
  }

  Expr primary() {
    const Token& t = peek();
    if (t.kind == TokenKind::number) {
      ++pos_;
      return Expr::literal(t.number, t.span);
    }
    if (t.kind == TokenKind::identifier) {
      ++pos_;
      if (consts_.contains(t.text)) return Expr::reference(t.text, RefKind::constant, t.span);
      if (vars_.contains(t.text)) return Expr::reference(t.text, RefKind::variable, t.span);
      if (is_observable(t.text)) return Expr::reference(t.text, RefKind::observable, t.span);
      throw NameError(t.span, t.text, "undeclared identifier '" + t.text + "'");
    }
    if (is_punct("(")) {
      ++pos_;
      Expr inner = expression();
      expect_punct(")");
      return inner;
    }
    fail({"number", "identifier", "'('"});
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  std::set<std::string> consts_;
  std::set<std::string> vars_;
};

/// Largest number of actions any single execution path can reach.
int max_actions(const std::vector<Stmt>& body, const Stmt** offender) {
  int total = 0;
  for (const Stmt& s : body) {
    int here = 0;
    if (s.kind == StmtKind::action) {
      here = 1;
    } else if (s.kind == StmtKind::branch) {
      for (const Branch& b : s.branches) here = std::max(here, max_actions(b.body, offender));
      if (s.has_else) here = std::max(here, max_actions(s.else_body, offender));
    }
    if (total + here > 1 && *offender == nullptr) *offender = &s;
    total += here;
  }
  return total;
}

}  // namespace

ParseError::ParseError(Span span, const std::string& message, std::vector<std::string> expected)
    : Error(to_string(span) + ": " + message), span_(span), expected_(std::move(expected)) {}

NameError::NameError(Span span, std::string name, const std::string& message)
    : Error(to_string(span) + ": " + message), span_(span), name_(std::move(name)) {}

PolicyAst parse(std::string_view text) {
  Parser parser(tokenize(text));
  PolicyAst ast = parser.program();
  for (const UnitBlock& block : ast.blocks) {
    const Stmt* offender = nullptr;
    if (max_actions(block.body, &offender) > 1) {
      throw ParseError(offender ? offender->span : block.span,
                       "more than one action on a single path in unit block '" + block.unit_type + "'");
    }
  }
  return ast;
}

PolicyAst parse(const PolicySource& source) { return parse(std::string_view(source.text)); }

}  // namespace microforge::policy
