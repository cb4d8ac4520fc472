// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <memory>
#include <string>

#include "microforge/arena/rollout.hpp"
#include "microforge/common/errors.hpp"
#include "microforge/policy/ast.hpp"

namespace microforge::policy {

class CompileError : public Error {
 public:
  CompileError(Span span, const std::string& message);
  const Span& span() const { return span_; }

 private:
  Span span_;
};

struct Program;

/// Executable form of a policy. Immutable; copies share the program.
class CompiledPolicy final : public arena::Controller {
 public:
  explicit CompiledPolicy(std::shared_ptr<const Program> program);

  void bind(const arena::ScenarioSpec& scenario) const override;
  arena::StatusVars initial_status(const arena::UnitSpec& unit) const override;
  Decision decide(const arena::BattleState& state) const override;

  struct UnitDecision {
    arena::Action action;
    arena::StatusVars status;
  };

  /// Evaluates the block for `unit_type` top-down; units without a block hold.
  /// Throws EpisodeError (using `tick`) on runtime faults.
  UnitDecision evaluate(const std::string& unit_type, const arena::Observation& obs, long tick) const;

  const std::string& name() const;

 private:
  std::shared_ptr<const Program> program_;
};

/// Type-checks and lowers an AST. Throws CompileError on type mismatches.
CompiledPolicy compile(const PolicyAst& ast);

}  // namespace microforge::policy
