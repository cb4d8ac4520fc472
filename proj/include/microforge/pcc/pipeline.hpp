// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "microforge/arena/rollout.hpp"
#include "microforge/arena/scenario.hpp"
#include "microforge/llm/backend.hpp"
#include "microforge/llm/templates.hpp"
#include "microforge/pcc/parsing.hpp"
#include "microforge/pcc/skills.hpp"

namespace microforge::pcc {

struct PipelineConfig {
  int max_rounds = 30;
  double target_win_rate = 0.9;
  int episodes = 10;
  std::uint64_t base_seed = 0;
  int repair_limit = 3;
  int plan_reasks = 2;
  int jobs = 1;
  std::string model;
};

enum class Phase { plan, code, evaluate, critique };
std::string to_string(Phase phase);

enum class Status { success, exhausted, aborted };
std::string to_string(Status status);

struct TraceEntry {
  Phase phase = Phase::plan;
  std::vector<std::string> prompt_digests;
  std::optional<std::string> response;
  std::optional<arena::BattleReport> report;
  std::optional<std::string> error;
  std::optional<std::string> warning;
  /// plan: tactic names. critique: decision token.
  nlohmann::json detail;
};

struct PipelineTrace {
  std::string scenario;
  Status status = Status::exhausted;
  int code_rounds = 0;
  std::vector<TraceEntry> rounds;
  SkillTree history;

  /// Last evaluation report, if any round got that far.
  const arena::BattleReport* final_report() const;
};

nlohmann::json to_json(const PipelineTrace& trace);
/// Stable text form; identical runs give identical bytes.
std::string serialize(const PipelineTrace& trace);

/// Plan -> (code -> evaluate -> critique)* until the win-rate target or the
/// code-round budget. Backend and plan-format failures end the run as
/// "aborted" with the partial trace.
PipelineTrace run_pipeline(const arena::ScenarioSpec& scenario, llm::ChatBackend& backend,
                           const llm::TemplateSet& templates, const PipelineConfig& config = {});

}  // namespace microforge::pcc
