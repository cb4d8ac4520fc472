// SPDX-License-Identifier: Apache-2.0
#include "microforge/policy/ast.hpp"

#include <algorithm>
#include <array>

namespace microforge::policy {

std::string to_string(Origin origin) {
  switch (origin) {
    case Origin::llm:
      return "llm";
    case Origin::augmented:
      return "augmented";
    case Origin::handwritten:
      break;
  }
  return "handwritten";
}

Origin origin_from_string(std::string_view text) {
  if (text == "llm") return Origin::llm;
  if (text == "augmented") return Origin::augmented;
  if (text == "handwritten") return Origin::handwritten;
  throw ContractViolation("unknown policy origin '" + std::string(text) + "'");
}

std::string_view symbol(BinaryOp op) {
  switch (op) {
    case BinaryOp::add: return "+";
    case BinaryOp::sub: return "-";
    case BinaryOp::mul: return "*";
    case BinaryOp::div: return "/";
    case BinaryOp::lt: return "<";
    case BinaryOp::le: return "<=";
    case BinaryOp::gt: return ">";
    case BinaryOp::ge: return ">=";
    case BinaryOp::eq: return "==";
    case BinaryOp::ne: return "!=";
    case BinaryOp::logical_and: return "and";
    case BinaryOp::logical_or: return "or";
  }
  return "?";
}

Expr Expr::literal(double value, Span span) {
  Expr e;
  e.kind = ExprKind::number;
  e.number = value;
  e.span = span;
  return e;
}

Expr Expr::reference(std::string name, RefKind ref, Span span) {
  Expr e;
  e.kind = ExprKind::ref;
  e.name = std::move(name);
  e.ref = ref;
  e.span = span;
  return e;
}

Expr Expr::unary(ExprKind kind, Expr operand, Span span) {
  Expr e;
  e.kind = kind;
  e.operands.push_back(std::move(operand));
  e.span = span;
  return e;
}

Expr Expr::binary(BinaryOp op, Expr lhs, Expr rhs, Span span) {
  Expr e;
  e.kind = ExprKind::binary;
  e.op = op;
  e.operands.push_back(std::move(lhs));
  e.operands.push_back(std::move(rhs));
  e.span = span;
  return e;
}

bool same_structure(const Expr& a, const Expr& b) {
  if (a.kind != b.kind || a.operands.size() != b.operands.size()) return false;
  switch (a.kind) {
    case ExprKind::number:
      if (a.number != b.number) return false;
      break;
    case ExprKind::ref:
      if (a.name != b.name || a.ref != b.ref) return false;
      break;
    case ExprKind::binary:
      if (a.op != b.op) return false;
      break;
    default:
      break;
  }
  for (std::size_t i = 0; i < a.operands.size(); ++i) {
    if (!same_structure(a.operands[i], b.operands[i])) return false;
  }
  return true;
}

namespace {

bool same_stmt(const Stmt& a, const Stmt& b) {
  if (a.kind != b.kind) return false;
  if (a.args.size() != b.args.size()) return false;
  for (std::size_t i = 0; i < a.args.size(); ++i) {
    if (!same_structure(a.args[i], b.args[i])) return false;
  }
  switch (a.kind) {
    case StmtKind::action:
      return a.action == b.action;
    case StmtKind::set:
      return a.target == b.target;
    case StmtKind::branch:
      if (a.branches.size() != b.branches.size() || a.has_else != b.has_else) return false;
      for (std::size_t i = 0; i < a.branches.size(); ++i) {
        if (!same_structure(a.branches[i].condition, b.branches[i].condition)) return false;
        if (!same_structure(a.branches[i].body, b.branches[i].body)) return false;
      }
      return same_structure(a.else_body, b.else_body);
  }
  return false;
}

}  // namespace

bool same_structure(const std::vector<Stmt>& a, const std::vector<Stmt>& b) {
  return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin(), same_stmt);
}

bool same_structure(const PolicyAst& a, const PolicyAst& b) {
  if (a.name != b.name || a.consts.size() != b.consts.size() || a.blocks.size() != b.blocks.size()) return false;
  for (std::size_t i = 0; i < a.consts.size(); ++i) {
    if (a.consts[i].name != b.consts[i].name || a.consts[i].value != b.consts[i].value) return false;
  }
  for (std::size_t i = 0; i < a.blocks.size(); ++i) {
    const UnitBlock& x = a.blocks[i];
    const UnitBlock& y = b.blocks[i];
    if (x.unit_type != y.unit_type || x.vars.size() != y.vars.size()) return false;
    for (std::size_t j = 0; j < x.vars.size(); ++j) {
      if (x.vars[j].name != y.vars[j].name || x.vars[j].initial != y.vars[j].initial) return false;
    }
    if (!same_structure(x.body, y.body)) return false;
  }
  return true;
}

const std::vector<ActionInfo>& actions() {
  using arena::ActionKind;
  static const std::vector<ActionInfo> table = {
      {"attack_weakest_enemy", ActionKind::attack_weakest_enemy, 0},
      {"attack_closest_enemy", ActionKind::attack_closest_enemy, 0},
      {"attack_focus", ActionKind::attack_focus, 0},
      {"move_to", ActionKind::move_to, 2},
      {"retreat_from_closest_enemy", ActionKind::retreat_from_closest_enemy, 1},
      {"hold", ActionKind::hold, 0},
  };
  return table;
}

std::optional<ActionInfo> find_action(std::string_view name) {
  for (const ActionInfo& a : actions()) {
    if (a.name == name) return a;
  }
  return std::nullopt;
}

std::string_view action_name(arena::ActionKind kind) {
  for (const ActionInfo& a : actions()) {
    if (a.kind == kind) return a.name;
  }
  return "hold";
}

const std::vector<std::string_view>& observables() {
  static const std::vector<std::string_view> names = {
      "health_frac", "shield_frac", "weapon_cooldown", "dist_to_closest_enemy", "dist_to_closest_ally",
      "num_allies",  "num_enemies", "my_x",            "my_y",                  "enemy_centroid_x",
      "enemy_centroid_y", "time",
  };
  return names;
}

bool is_observable(std::string_view name) {
  const auto& names = observables();
  return std::find(names.begin(), names.end(), name) != names.end();
}

bool is_keyword(std::string_view name) {
  static constexpr std::array<std::string_view, 11> keywords = {"policy", "unit", "const", "var", "set", "if",
                                                                "elif",   "else", "and",   "or",  "not"};
  return std::find(keywords.begin(), keywords.end(), name) != keywords.end();
}

}  // namespace microforge::policy
