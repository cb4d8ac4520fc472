// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "microforge/arena/battle.hpp"

namespace microforge::arena {

/// Anything that can drive the allied side. Implementations must be immutable
/// and safe to share between concurrently running episodes.
class Controller {
 public:
  virtual ~Controller() = default;

  struct Decision {
    std::vector<Command> commands;
    std::vector<std::pair<UnitId, StatusVars>> status_updates;
  };

  /// Throws EpisodeError when the controller cannot drive this scenario.
  virtual void bind(const ScenarioSpec& scenario) const = 0;
  virtual StatusVars initial_status(const UnitSpec& unit) const = 0;
  /// Throws EpisodeError on runtime faults.
  virtual Decision decide(const BattleState& state) const = 0;
};

enum class Result { win, lose, tie };
std::string to_string(Result result);

struct EpisodeOutcome {
  Result result = Result::tie;
  long ticks_elapsed = 0;
  int surviving_allies = 0;
  int surviving_enemies = 0;
  double damage_dealt = 0.0;
  double damage_taken_health = 0.0;
  double damage_taken_shield = 0.0;
  int enemy_kills = 0;
  double score = 0.0;
  /// Σ over enemies of (initial health+shield − final health+shield).
  double enemy_pool_lost = 0.0;
  std::uint64_t seed = 0;
};

struct BattleReport {
  int episodes = 0;
  int wins = 0;
  int ties = 0;
  int losses = 0;
  double mean_score = 0.0;
  double mean_damage_dealt = 0.0;
  double mean_damage_taken_health = 0.0;
  double mean_damage_taken_shield = 0.0;
  double mean_surviving_allies = 0.0;
  double mean_surviving_enemies = 0.0;
  double win_rate = 0.0;
  std::vector<EpisodeOutcome> outcomes;
};

/// Outcome rule applied after every tick; nullopt while the fight continues.
std::optional<Result> check_outcome(const BattleState& state);

EpisodeOutcome run_episode(const ScenarioSpec& scenario, const Controller& controller, std::uint64_t seed);

/// Seeds base_seed..base_seed+episodes-1. With jobs > 1 episodes run on a
/// worker pool; the report is merged in seed order either way. EpisodeError
/// propagates tagged with the failing episode index.
BattleReport run_rollouts(const ScenarioSpec& scenario, const Controller& controller, int episodes = 10,
                          std::uint64_t base_seed = 0, int jobs = 1);

BattleReport aggregate(std::vector<EpisodeOutcome> outcomes);

nlohmann::json to_json(const EpisodeOutcome& outcome);
nlohmann::json to_json(const BattleReport& report);
std::string serialize(const BattleReport& report);

/// The combat-result sentences used both by the CLI text report and the
/// RESULT placeholder of the prompts.
std::string render_report_text(const BattleReport& report);

}  // namespace microforge::arena
