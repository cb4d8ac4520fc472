// SPDX-License-Identifier: Apache-2.0
#include "microforge/policy/printer.hpp"

#include <sstream>

#include "microforge/common/numfmt.hpp"

namespace microforge::policy {

namespace {

enum Prec { kOr = 1, kAnd, kNot, kCompare, kAdd, kMul, kUnary, kPrimary };

int precedence(const Expr& e) {
  switch (e.kind) {
    case ExprKind::number:
    case ExprKind::ref:
      return kPrimary;
    case ExprKind::negate:
      return kUnary;
    case ExprKind::logical_not:
      return kNot;
    case ExprKind::binary:
      switch (e.op) {
        case BinaryOp::logical_or: return kOr;
        case BinaryOp::logical_and: return kAnd;
        case BinaryOp::add:
        case BinaryOp::sub: return kAdd;
        case BinaryOp::mul:
        case BinaryOp::div: return kMul;
        default: return kCompare;
      }
  }
  return kPrimary;
}

void emit(std::ostream& os, const Expr& e, int min_prec) {
  int p = precedence(e);
  bool parens = p < min_prec;
  if (parens) os << '(';
  switch (e.kind) {
    case ExprKind::number:
      os << format_shortest(e.number);
      break;
    case ExprKind::ref:
      os << e.name;
      break;
    case ExprKind::negate:
      os << '-';
      emit(os, e.operands[0], kUnary);
      break;
    case ExprKind::logical_not:
      os << "not ";
      emit(os, e.operands[0], kNot);
      break;
    case ExprKind::binary:
      if (p == kCompare) {
        emit(os, e.operands[0], kAdd);
        os << ' ' << symbol(e.op) << ' ';
        emit(os, e.operands[1], kAdd);
      } else {
        emit(os, e.operands[0], p);
        os << ' ' << symbol(e.op) << ' ';
        emit(os, e.operands[1], p + 1);
      }
      break;
  }
  if (parens) os << ')';
}

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

void emit_body(std::ostream& os, const std::vector<Stmt>& body, int depth);

void emit_stmt(std::ostream& os, const Stmt& s, int depth) {
  std::string pad(static_cast<std::size_t>(depth) * 2, ' ');
  switch (s.kind) {
    case StmtKind::action: {
      os << pad << action_name(s.action) << '(';
      for (std::size_t i = 0; i < s.args.size(); ++i) {
        if (i > 0) os << ", ";
        emit(os, s.args[i], kOr);
      }
      os << ")\n";
      break;
    }
    case StmtKind::set:
      os << pad << "set " << s.target << " = ";
      emit(os, s.args[0], kOr);
      os << '\n';
      break;
    case StmtKind::branch:
      for (std::size_t i = 0; i < s.branches.size(); ++i) {
        os << (i == 0 ? pad + "if " : " elif ");
        emit(os, s.branches[i].condition, kOr);
        os << " {\n";
        emit_body(os, s.branches[i].body, depth + 1);
        os << pad << '}';
      }
      if (s.has_else) {
        os << " else {\n";
        emit_body(os, s.else_body, depth + 1);
        os << pad << '}';
      }
      os << '\n';
      break;
  }
}

void emit_body(std::ostream& os, const std::vector<Stmt>& body, int depth) {
  for (const Stmt& s : body) emit_stmt(os, s, depth);
}

}  // namespace

std::string print_expr(const Expr& expr) {
  std::ostringstream os;
  emit(os, expr, kOr);
  return os.str();
}

std::string pretty_print(const PolicyAst& ast) {
  std::ostringstream os;
  os << "policy " << quote(ast.name) << " {\n";
  for (const ConstDecl& c : ast.consts) os << "  const " << c.name << " = " << format_shortest(c.value) << '\n';
  for (const UnitBlock& b : ast.blocks) {
    os << "  unit " << b.unit_type << " {\n";
    for (const VarDecl& v : b.vars) os << "    var " << v.name << " = " << format_shortest(v.initial) << '\n';
    emit_body(os, b.body, 2);
    os << "  }\n";
  }
  os << "}\n";
  return os.str();
}

}  // namespace microforge::policy
