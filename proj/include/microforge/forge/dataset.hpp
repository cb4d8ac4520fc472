// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "microforge/arena/rollout.hpp"
#include "microforge/arena/scenario.hpp"
#include "microforge/forge/math.hpp"
#include "microforge/llm/backend.hpp"
#include "microforge/llm/templates.hpp"
#include "microforge/policy/ast.hpp"

namespace microforge::forge {

/// Win rate strictly above this is Good.
inline constexpr double kGoodWinRate = 0.8;
inline constexpr double kInvalidReward = -1.0;
inline constexpr double kBugReward = -0.5;

enum class TriageClass { good, bad, bug, invalid };
std::string to_string(TriageClass cls);

struct TrainingRecord {
  std::string id;
  std::string scenario;
  std::string prompt;
  std::string response;
  std::optional<policy::PolicySource> source;
  std::optional<std::string> extract_error;
  std::optional<arena::BattleReport> report;
  /// Parse, compile or runtime failure of an extracted policy.
  std::optional<std::string> episode_error;
};

/// grpo.system and grpo.user rendered for the scenario, joined by a blank line.
std::string grpo_prompt(const llm::TemplateSet& templates, const arena::ScenarioSpec& scenario);

/// Extracts, compiles and rolls out the response, filling the evaluation fields.
void evaluate_record(TrainingRecord& record, const arena::ScenarioSpec& scenario, int episodes,
                     std::uint64_t base_seed, int jobs = 1);

/// Throws ContractViolation when the record has not been evaluated.
TriageClass triage(const TrainingRecord& record);
double grpo_reward(const TrainingRecord& record);

nlohmann::json to_json(const TrainingRecord& record);

struct TriagedRow {
  std::string id;
  std::string scenario;
  std::string prompt;
  std::string response;
  TriageClass cls = TriageClass::bad;
  double reward = 0.0;
};

/// Reads a row written by to_json(TrainingRecord).
TriagedRow triaged_row(const nlohmann::json& row);

struct DatasetResult {
  std::vector<nlohmann::json> rows;
  std::vector<std::string> warnings;
};

/// {prompt, response} for Good rows, sorted by id.
DatasetResult build_sft(std::vector<TriagedRow> rows);

/// {prompt, chosen, rejected}: per prompt, max(good, bad+bug) pairs formed
/// round-robin over both id-sorted lists. Output sorted by (chosen id, rejected id).
DatasetResult build_dpo_pairs(std::vector<TriagedRow> rows);

struct AugmentResult {
  std::vector<policy::PolicySource> sources;
  std::vector<std::string> warnings;
};

/// k rewrite requests per source (coder.system + augment.user). Outputs keep
/// the raw response text when no code block can be extracted; ids are
/// "<id>-a0".."<id>-a{k-1}". Backend errors skip the sample with a warning.
AugmentResult augment(const std::vector<policy::PolicySource>& sources, llm::ChatBackend& backend,
                      const llm::TemplateSet& templates, const arena::ScenarioSpec& scenario, int k,
                      const std::string& model = {});

/// One line per scenario in name order.
std::vector<StatLine> reward_stats(const std::map<std::string, std::vector<double>>& rewards);
std::string stats_csv(const std::vector<StatLine>& lines);
std::string curve_csv(const std::vector<double>& rewards, std::size_t window);

}  // namespace microforge::forge
