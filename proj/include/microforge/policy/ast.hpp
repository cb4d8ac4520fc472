// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "microforge/arena/battle.hpp"
#include "microforge/common/errors.hpp"

namespace microforge::policy {

enum class Origin { llm, augmented, handwritten };
std::string to_string(Origin origin);
Origin origin_from_string(std::string_view text);

struct PolicySource {
  std::string id;
  std::string text;
  Origin origin = Origin::handwritten;
};

enum class BinaryOp { add, sub, mul, div, lt, le, gt, ge, eq, ne, logical_and, logical_or };
enum class RefKind { constant, variable, observable };
enum class ExprKind { number, ref, negate, logical_not, binary };

std::string_view symbol(BinaryOp op);

struct Expr {
  ExprKind kind = ExprKind::number;
  double number = 0.0;
  std::string name;
  RefKind ref = RefKind::observable;
  BinaryOp op = BinaryOp::add;
  std::vector<Expr> operands;
  Span span;

  static Expr literal(double value, Span span = {});
  static Expr reference(std::string name, RefKind ref, Span span = {});
  static Expr unary(ExprKind kind, Expr operand, Span span = {});
  static Expr binary(BinaryOp op, Expr lhs, Expr rhs, Span span = {});
};

struct Stmt;

struct Branch {
  Expr condition;
  std::vector<Stmt> body;
};

enum class StmtKind { action, set, branch };

/// `action`: an action call with `args`. `set`: assigns args[0] to the status
/// variable `target`. `branch`: if/elif chain in `branches`, optional else.
struct Stmt {
  StmtKind kind = StmtKind::action;
  arena::ActionKind action = arena::ActionKind::hold;
  std::vector<Expr> args;
  std::string target;
  std::vector<Branch> branches;
  bool has_else = false;
  std::vector<Stmt> else_body;
  Span span;
};

struct ConstDecl {
  std::string name;
  double value = 0.0;
  Span span;
};

struct VarDecl {
  std::string name;
  double initial = 0.0;
  Span span;
};

struct UnitBlock {
  std::string unit_type;
  std::vector<VarDecl> vars;
  std::vector<Stmt> body;
  Span span;
};

struct PolicyAst {
  std::string name;
  std::vector<ConstDecl> consts;
  std::vector<UnitBlock> blocks;
};

/// Equality that ignores source spans.
bool same_structure(const Expr& a, const Expr& b);
bool same_structure(const std::vector<Stmt>& a, const std::vector<Stmt>& b);
bool same_structure(const PolicyAst& a, const PolicyAst& b);

struct ActionInfo {
  std::string_view name;
  arena::ActionKind kind;
  int arity;
};

const std::vector<ActionInfo>& actions();
std::optional<ActionInfo> find_action(std::string_view name);
std::string_view action_name(arena::ActionKind kind);

/// Built-in per-unit observables available in expressions.
const std::vector<std::string_view>& observables();
bool is_observable(std::string_view name);
bool is_keyword(std::string_view name);

}  // namespace microforge::policy
