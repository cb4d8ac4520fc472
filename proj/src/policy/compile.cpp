// SPDX-License-Identifier: Apache-2.0
#include "microforge/policy/compile.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>

namespace microforge::policy {

CompileError::CompileError(Span span, const std::string& message)
    : Error(to_string(span) + ": " + message), span_(span) {}

namespace {

enum class Obs {
  health_frac,
  shield_frac,
  weapon_cooldown,
  dist_to_closest_enemy,
  dist_to_closest_ally,
  num_allies,
  num_enemies,
  my_x,
  my_y,
  enemy_centroid_x,
  enemy_centroid_y,
  time,
};

Obs observable_slot(const std::string& name) {
  static const std::map<std::string, Obs, std::less<>> table = {
      {"health_frac", Obs::health_frac},
      {"shield_frac", Obs::shield_frac},
      {"weapon_cooldown", Obs::weapon_cooldown},
      {"dist_to_closest_enemy", Obs::dist_to_closest_enemy},
      {"dist_to_closest_ally", Obs::dist_to_closest_ally},
      {"num_allies", Obs::num_allies},
      {"num_enemies", Obs::num_enemies},
      {"my_x", Obs::my_x},
      {"my_y", Obs::my_y},
      {"enemy_centroid_x", Obs::enemy_centroid_x},
      {"enemy_centroid_y", Obs::enemy_centroid_y},
      {"time", Obs::time},
  };
  return table.at(name);
}

double read(const arena::Observation& o, Obs slot) {
  switch (slot) {
    case Obs::health_frac: return o.health_frac;
    case Obs::shield_frac: return o.shield_frac;
    case Obs::weapon_cooldown: return o.weapon_cooldown;
    case Obs::dist_to_closest_enemy: return o.dist_to_closest_enemy;
    case Obs::dist_to_closest_ally: return o.dist_to_closest_ally;
    case Obs::num_allies: return o.num_allies;
    case Obs::num_enemies: return o.num_enemies;
    case Obs::my_x: return o.my_x;
    case Obs::my_y: return o.my_y;
    case Obs::enemy_centroid_x: return o.enemy_centroid.x;
    case Obs::enemy_centroid_y: return o.enemy_centroid.y;
    case Obs::time: return o.time;
  }
  return 0.0;
}

enum class Type { number, boolean };

std::string type_name(Type t) { return t == Type::number ? "number" : "boolean"; }

/// Lowered expression: constants folded to literals, refs resolved to slots.
struct Node {
  enum class Op { literal, observable, variable, negate, logical_not, binary } op = Op::literal;
  double value = 0.0;
  Obs obs = Obs::time;
  std::size_t var = 0;
  BinaryOp bin = BinaryOp::add;
  std::vector<Node> kids;
  Span span;
};

struct CStmt;

struct CBranch {
  Node condition;
  std::vector<CStmt> body;
};

struct CStmt {
  StmtKind kind = StmtKind::action;
  arena::ActionKind action = arena::ActionKind::hold;
  std::vector<Node> args;
  std::size_t var = 0;
  std::vector<CBranch> branches;
  std::vector<CStmt> else_body;
  Span span;
};

}  // namespace

struct Program {
  struct Block {
    std::string unit_type;
    std::vector<std::string> var_names;
    std::vector<double> var_initial;
    std::vector<CStmt> body;
  };
  std::string name;
  std::vector<Block> blocks;

  const Block* find(const std::string& unit_type) const {
    auto it = std::find_if(blocks.begin(), blocks.end(), [&](const Block& b) { return b.unit_type == unit_type; });
    return it == blocks.end() ? nullptr : &*it;
  }
};

namespace {

class Lowering {
 public:
  Lowering(const std::map<std::string, double>& consts, const std::vector<std::string>& vars)
      : consts_(consts), vars_(vars) {}

  Node expr(const Expr& e, Type want) {
    Type got = Type::number;
    Node n = lower(e, got);
    if (got != want) {
      throw CompileError(e.span, "type mismatch: expected " + type_name(want) + ", found " + type_name(got));
    }
    return n;
  }

  std::vector<CStmt> body(const std::vector<Stmt>& stmts) {
    std::vector<CStmt> out;
    for (const Stmt& s : stmts) out.push_back(stmt(s));
    return out;
  }

 private:
  Node lower(const Expr& e, Type& type) {
    Node n;
    n.span = e.span;
    switch (e.kind) {
      case ExprKind::number:
        n.op = Node::Op::literal;
        n.value = e.number;
        type = Type::number;
        break;
      case ExprKind::ref:
        type = Type::number;
        if (e.ref == RefKind::constant) {
          n.op = Node::Op::literal;
          n.value = consts_.at(e.name);
        } else if (e.ref == RefKind::variable) {
          n.op = Node::Op::variable;
          n.var = static_cast<std::size_t>(std::find(vars_.begin(), vars_.end(), e.name) - vars_.begin());
          if (n.var >= vars_.size()) throw CompileError(e.span, "unknown variable '" + e.name + "'");
        } else {
          n.op = Node::Op::observable;
          n.obs = observable_slot(e.name);
        }
        break;
      case ExprKind::negate:
        n.op = Node::Op::negate;
        n.kids.push_back(expr(e.operands[0], Type::number));
        type = Type::number;
        break;
      case ExprKind::logical_not:
        n.op = Node::Op::logical_not;
        n.kids.push_back(expr(e.operands[0], Type::boolean));
        type = Type::boolean;
        break;
      case ExprKind::binary: {
        n.op = Node::Op::binary;
        n.bin = e.op;
        bool logical = e.op == BinaryOp::logical_and || e.op == BinaryOp::logical_or;
        bool arithmetic = e.op == BinaryOp::add || e.op == BinaryOp::sub || e.op == BinaryOp::mul ||
                          e.op == BinaryOp::div;
        Type operand = logical ? Type::boolean : Type::number;
        n.kids.push_back(expr(e.operands[0], operand));
        n.kids.push_back(expr(e.operands[1], operand));
        type = arithmetic ? Type::number : Type::boolean;
        break;
      }
    }
    return n;
  }

  CStmt stmt(const Stmt& s) {
    CStmt c;
    c.kind = s.kind;
    c.span = s.span;
    switch (s.kind) {
      case StmtKind::action:
        c.action = s.action;
        for (const Expr& a : s.args) c.args.push_back(expr(a, Type::number));
        break;
      case StmtKind::set:
        c.var = static_cast<std::size_t>(std::find(vars_.begin(), vars_.end(), s.target) - vars_.begin());
        if (c.var >= vars_.size()) throw CompileError(s.span, "unknown variable '" + s.target + "'");
        c.args.push_back(expr(s.args[0], Type::number));
        break;
      case StmtKind::branch:
        for (const Branch& b : s.branches) c.branches.push_back({expr(b.condition, Type::boolean), body(b.body)});
        c.else_body = body(s.else_body);
        break;
    }
    return c;
  }

  const std::map<std::string, double>& consts_;
  const std::vector<std::string>& vars_;
};

struct Frame {
  const arena::Observation& obs;
  std::vector<double>& vars;
  long tick;
};

double eval(const Node& n, const Frame& f) {
  switch (n.op) {
    case Node::Op::literal:
      return n.value;
    case Node::Op::observable:
      return read(f.obs, n.obs);
    case Node::Op::variable:
      return f.vars[n.var];
    case Node::Op::negate:
      return -eval(n.kids[0], f);
    case Node::Op::logical_not:
      return eval(n.kids[0], f) != 0.0 ? 0.0 : 1.0;
    case Node::Op::binary:
      break;
  }
  if (n.bin == BinaryOp::logical_and) return (eval(n.kids[0], f) != 0.0 && eval(n.kids[1], f) != 0.0) ? 1.0 : 0.0;
  if (n.bin == BinaryOp::logical_or) return (eval(n.kids[0], f) != 0.0 || eval(n.kids[1], f) != 0.0) ? 1.0 : 0.0;
  double a = eval(n.kids[0], f);
  double b = eval(n.kids[1], f);
  switch (n.bin) {
    case BinaryOp::add: return a + b;
    case BinaryOp::sub: return a - b;
    case BinaryOp::mul: return a * b;
    case BinaryOp::div:
      if (b == 0.0) throw EpisodeError("division by zero", f.tick, n.span);
      return a / b;
    case BinaryOp::lt: return a < b ? 1.0 : 0.0;
    case BinaryOp::le: return a <= b ? 1.0 : 0.0;
    case BinaryOp::gt: return a > b ? 1.0 : 0.0;
    case BinaryOp::ge: return a >= b ? 1.0 : 0.0;
    case BinaryOp::eq: return a == b ? 1.0 : 0.0;
    case BinaryOp::ne: return a != b ? 1.0 : 0.0;
    default: break;
  }
  return 0.0;
}

double eval_finite(const Node& n, const Frame& f) {
  double v = eval(n, f);
  if (!std::isfinite(v)) throw EpisodeError("non-finite value", f.tick, n.span);
  return v;
}

/// Runs statements in order; returns true once an action has been taken.
bool run(const std::vector<CStmt>& body, const Frame& f, std::optional<arena::Action>& action) {
  for (const CStmt& s : body) {
    switch (s.kind) {
      case StmtKind::set:
        f.vars[s.var] = eval_finite(s.args[0], f);
        break;
      case StmtKind::action: {
        arena::Action a;
        a.kind = s.action;
        if (!s.args.empty()) a.a = eval_finite(s.args[0], f);
        if (s.args.size() > 1) a.b = eval_finite(s.args[1], f);
        action = a;
        break;
      }
      case StmtKind::branch: {
        bool taken = false;
        for (const CBranch& b : s.branches) {
          if (eval(b.condition, f) != 0.0) {
            run(b.body, f, action);
            taken = true;
            break;
          }
        }
        if (!taken) run(s.else_body, f, action);
        break;
      }
    }
  }
  return action.has_value();
}

}  // namespace

CompiledPolicy::CompiledPolicy(std::shared_ptr<const Program> program) : program_(std::move(program)) {}

const std::string& CompiledPolicy::name() const { return program_->name; }

void CompiledPolicy::bind(const arena::ScenarioSpec& scenario) const {
  for (const Program::Block& b : program_->blocks) {
    bool found = std::any_of(scenario.allies.begin(), scenario.allies.end(),
                             [&](const arena::Placement& p) { return p.unit.name == b.unit_type; });
    if (!found) {
      throw EpisodeError("policy block '" + b.unit_type + "' matches no allied unit in scenario '" + scenario.name + "'",
                         0);
    }
  }
}

arena::StatusVars CompiledPolicy::initial_status(const arena::UnitSpec& unit) const {
  arena::StatusVars vars;
  if (const Program::Block* b = program_->find(unit.name)) {
    for (std::size_t i = 0; i < b->var_names.size(); ++i) vars[b->var_names[i]] = b->var_initial[i];
  }
  return vars;
}

CompiledPolicy::UnitDecision CompiledPolicy::evaluate(const std::string& unit_type, const arena::Observation& obs,
                                                      long tick) const {
  UnitDecision out;
  out.status = obs.status;
  const Program::Block* b = program_->find(unit_type);
  if (!b) return out;
  std::vector<double> vars(b->var_names.size());
  for (std::size_t i = 0; i < vars.size(); ++i) {
    auto it = obs.status.find(b->var_names[i]);
    vars[i] = it != obs.status.end() ? it->second : b->var_initial[i];
  }
  std::optional<arena::Action> action;
  run(b->body, Frame{obs, vars, tick}, action);
  if (action) out.action = *action;
  for (std::size_t i = 0; i < vars.size(); ++i) out.status[b->var_names[i]] = vars[i];
  return out;
}

arena::Controller::Decision CompiledPolicy::decide(const arena::BattleState& state) const {
  Decision d;
  for (const arena::UnitState& u : state.units) {
    if (!u.alive || u.team != arena::Team::ally) continue;
    const Program::Block* b = program_->find(u.spec.name);
    if (!b) {
      d.commands.push_back(arena::Command::hold(u.id));
      continue;
    }
    UnitDecision ud = evaluate(u.spec.name, arena::observe(state, u.id), state.tick);
    d.commands.push_back(arena::resolve_action(state, u.id, ud.action));
    if (!b->var_names.empty()) d.status_updates.emplace_back(u.id, std::move(ud.status));
  }
  return d;
}

CompiledPolicy compile(const PolicyAst& ast) {
  auto program = std::make_shared<Program>();
  program->name = ast.name;
  std::map<std::string, double> consts;
  for (const ConstDecl& c : ast.consts) consts[c.name] = c.value;
  for (const UnitBlock& ub : ast.blocks) {
    Program::Block block;
    block.unit_type = ub.unit_type;
    for (const VarDecl& v : ub.vars) {
      block.var_names.push_back(v.name);
      block.var_initial.push_back(v.initial);
    }
    Lowering lowering(consts, block.var_names);
    block.body = lowering.body(ub.body);
    program->blocks.push_back(std::move(block));
  }
  return CompiledPolicy(std::move(program));
}

}  // namespace microforge::policy
