// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "microforge/arena/geometry.hpp"
#include "microforge/arena/scenario.hpp"

namespace microforge::arena {

inline constexpr double kTickSeconds = 0.125;
inline constexpr double kEnemySight = 9.0;
inline constexpr double kShieldRegenPerSecond = 2.0;
inline constexpr double kShieldRegenDelay = 10.0;
inline constexpr double kHealRange = 4.0;
/// Distance slack used for range checks so that units parked exactly at
/// attack range by the movement code still count as in range.
inline constexpr double kRangeEpsilon = 1e-9;

using UnitId = int;
using StatusVars = std::map<std::string, double>;

enum class Team { ally, enemy };

struct UnitState {
  UnitId id = 0;
  Team team = Team::ally;
  UnitSpec spec;
  Vec2 spawn;
  Vec2 pos;
  double health = 0.0;
  double shield = 0.0;
  double weapon_cooldown = 0.0;
  double seconds_since_damaged = 0.0;
  StatusVars status;
  bool alive = true;

  double pool() const { return health + shield; }
};

struct Ledger {
  double damage_dealt = 0.0;
  double damage_taken_health = 0.0;
  double damage_taken_shield = 0.0;
  int enemy_kills = 0;
};

/// Full simulation state. Unit ids are indices into `units`: allies first,
/// then enemies, both in roster order.
struct BattleState {
  std::shared_ptr<const ScenarioSpec> scenario;
  long tick = 0;
  std::vector<UnitState> units;
  std::optional<UnitId> ally_focus;
  Ledger ledger;
  std::mt19937_64 rng;

  double elapsed() const { return static_cast<double>(tick) * kTickSeconds; }
  const UnitState& unit(UnitId id) const;
  int living(Team team) const;
};

/// Per-unit order consumed by step().
struct Command {
  enum class Kind { hold, move, attack, attack_focus };
  UnitId unit = 0;
  Kind kind = Kind::hold;
  Vec2 destination;
  UnitId target = -1;

  static Command hold(UnitId u) { return {u, Kind::hold, {}, -1}; }
  static Command move(UnitId u, Vec2 to) { return {u, Kind::move, to, -1}; }
  static Command attack(UnitId u, UnitId t) { return {u, Kind::attack, {}, t}; }
  static Command focus(UnitId u) { return {u, Kind::attack_focus, {}, -1}; }
};

/// High-level action vocabulary shared with the policy language.
enum class ActionKind {
  attack_weakest_enemy,
  attack_closest_enemy,
  attack_focus,
  move_to,
  retreat_from_closest_enemy,
  hold,
};

struct Action {
  ActionKind kind = ActionKind::hold;
  double a = 0.0;
  double b = 0.0;
};

struct Observation {
  double health_frac = 0.0;
  double shield_frac = 0.0;
  double weapon_cooldown = 0.0;
  double dist_to_closest_enemy = 0.0;
  double dist_to_closest_ally = 0.0;
  int num_allies = 0;
  int num_enemies = 0;
  double my_x = 0.0;
  double my_y = 0.0;
  Vec2 enemy_centroid;
  double time = 0.0;
  StatusVars status;
};

/// Opening state for one episode; applies spawn jitter from `seed`.
BattleState initial_state(std::shared_ptr<const ScenarioSpec> scenario, std::uint64_t seed);

/// Throws ContractViolation for dead or unknown units.
Observation observe(const BattleState& state, UnitId unit);

/// Scripted enemy: attack the closest ally in sight, otherwise walk to the rally point.
std::vector<Command> enemy_commands(const BattleState& state);

/// Lowers a high-level action to a concrete command for `unit`.
Command resolve_action(const BattleState& state, UnitId unit, const Action& action);

/// Advances one tick. Enemy commands are generated internally; `ally_commands`
/// may only name living allies (ContractViolation otherwise). Units without a
/// command hold.
BattleState step(BattleState state, std::span<const Command> ally_commands);

}  // namespace microforge::arena
