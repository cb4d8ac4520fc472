// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <compare>
#include <filesystem>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "microforge/arena/geometry.hpp"

namespace microforge::arena {

/// Combat stats for one unit type. `name` is the identifier policies bind
/// against; `display_name` is what the task text shows.
struct UnitSpec {
  std::string name;
  std::string display_name;
  double max_health = 0.0;
  double max_shield = 0.0;
  double defense = 0.0;
  double attack_range = 0.0;
  double speed = 0.0;
  double damage = 0.0;
  double dps = 0.0;
  double heal_rate = 0.0;
  double splash_radius = 0.0;
  bool suicide_on_attack = false;
  bool can_traverse_cliffs = false;

  bool can_attack() const { return damage > 0.0 && dps > 0.0; }
  /// Seconds between shots.
  double attack_period() const { return damage / dps; }
};

struct Cell {
  int x = 0;
  int y = 0;
  friend auto operator<=>(const Cell&, const Cell&) = default;
};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool contains(double v) const { return v >= lo && v <= hi; }
};

struct MapSpec {
  double width = 0.0;
  double height = 0.0;
  Interval walkable_x;
  Interval walkable_y;
  std::set<Cell> cliff_cells;
  std::set<Cell> choke_cells;

  static Cell cell_of(Vec2 p);
  bool in_bounds(Vec2 p) const;
  Vec2 clamp(Vec2 p) const;
  /// Inside the walkable rectangle and, unless the unit climbs cliffs, not on a cliff cell.
  bool walkable(Vec2 p, bool can_traverse_cliffs) const;
};

struct Placement {
  UnitSpec unit;
  Vec2 pos;
};

struct ScenarioSpec {
  std::string name;
  MapSpec map;
  std::vector<Placement> allies;
  std::vector<Placement> enemies;
  Vec2 enemy_rally;
  double step_limit_seconds = 120.0;
  /// Uniform spawn offset half-width per axis, drawn from the episode seed. 0 disables.
  double spawn_jitter = 0.0;
  std::vector<std::string> notes;
  std::string task_text;
};

/// Parses a scenario JSON document, validates it, and renders task_text.
/// Throws LoadError naming the offending field.
ScenarioSpec load_scenario(std::string_view text);
ScenarioSpec load_scenario_file(const std::filesystem::path& path);

/// Natural-language task description in the style the prompts expect.
std::string render_task_text(const ScenarioSpec& scenario);

}  // namespace microforge::arena
