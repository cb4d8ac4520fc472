// SPDX-License-Identifier: Apache-2.0
#include "microforge/arena/scenario.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "microforge/common/errors.hpp"
#include "microforge/common/numfmt.hpp"

namespace microforge::arena {

using nlohmann::json;

Cell MapSpec::cell_of(Vec2 p) {
  return {static_cast<int>(std::floor(p.x)), static_cast<int>(std::floor(p.y))};
}

bool MapSpec::in_bounds(Vec2 p) const { return walkable_x.contains(p.x) && walkable_y.contains(p.y); }

Vec2 MapSpec::clamp(Vec2 p) const {
  return {std::clamp(p.x, walkable_x.lo, walkable_x.hi), std::clamp(p.y, walkable_y.lo, walkable_y.hi)};
}

bool MapSpec::walkable(Vec2 p, bool can_traverse_cliffs) const {
  if (!in_bounds(p)) return false;
  if (can_traverse_cliffs || cliff_cells.empty()) return true;
  return !cliff_cells.contains(cell_of(p));
}

namespace {

[[noreturn]] void fail(const std::string& field, const std::string& what) {
  throw LoadError("field '" + field + "': " + what);
}

const json& require(const json& obj, const std::string& key, const std::string& path) {
  if (!obj.is_object()) fail(path, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) fail(path.empty() ? key : path + "." + key, "missing");
  return *it;
}

std::string join_path(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

double number_at(const json& obj, const std::string& key, const std::string& path) {
  const json& v = require(obj, key, path);
  if (!v.is_number()) fail(join_path(path, key), "expected a number");
  double d = v.get<double>();
  if (!std::isfinite(d)) fail(join_path(path, key), "must be finite");
  return d;
}

double number_or(const json& obj, const std::string& key, const std::string& path, double fallback) {
  if (!obj.contains(key)) return fallback;
  return number_at(obj, key, path);
}

bool bool_or(const json& obj, const std::string& key, const std::string& path, bool fallback) {
  auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  if (!it->is_boolean()) fail(join_path(path, key), "expected a boolean");
  return it->get<bool>();
}

std::string string_at(const json& obj, const std::string& key, const std::string& path) {
  const json& v = require(obj, key, path);
  if (!v.is_string() || v.get<std::string>().empty()) fail(join_path(path, key), "expected a non-empty string");
  return v.get<std::string>();
}

Vec2 point_at(const json& v, const std::string& path) {
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
    fail(path, "expected [x, y]");
  }
  return {v[0].get<double>(), v[1].get<double>()};
}

Interval interval_at(const json& obj, const std::string& key, const std::string& path) {
  const json& v = require(obj, key, path);
  Vec2 p = point_at(v, join_path(path, key));
  if (p.x > p.y) fail(join_path(path, key), "lo must not exceed hi");
  return {p.x, p.y};
}

std::set<Cell> cells_at(const json& obj, const std::string& key, const std::string& path) {
  std::set<Cell> out;
  auto it = obj.find(key);
  if (it == obj.end()) return out;
  if (!it->is_array()) fail(join_path(path, key), "expected a list of [x, y]");
  for (std::size_t i = 0; i < it->size(); ++i) {
    const json& c = (*it)[i];
    std::string where = join_path(path, key) + "[" + std::to_string(i) + "]";
    if (!c.is_array() || c.size() != 2 || !c[0].is_number_integer() || !c[1].is_number_integer()) {
      fail(where, "expected integer [x, y]");
    }
    out.insert({c[0].get<int>(), c[1].get<int>()});
  }
  return out;
}

std::string default_display_name(const std::string& name) {
  std::string out;
  bool upper = true;
  for (char ch : name) {
    if (ch == '_' || ch == '-') {
      out.push_back(' ');
      upper = true;
    } else {
      out.push_back(upper ? static_cast<char>(std::toupper(static_cast<unsigned char>(ch))) : ch);
      upper = false;
    }
  }
  return out;
}

UnitSpec unit_at(const json& v, const std::string& path) {
  UnitSpec u;
  u.name = string_at(v, "name", path);
  u.display_name = v.contains("display_name") ? string_at(v, "display_name", path) : default_display_name(u.name);
  u.max_health = number_at(v, "max_health", path);
  u.max_shield = number_or(v, "max_shield", path, 0.0);
  u.defense = number_or(v, "defense", path, 0.0);
  u.attack_range = number_or(v, "attack_range", path, 0.0);
  u.speed = number_or(v, "speed", path, 0.0);
  u.damage = number_or(v, "damage", path, 0.0);
  u.dps = number_or(v, "dps", path, 0.0);
  u.heal_rate = number_or(v, "heal_rate", path, 0.0);
  u.splash_radius = number_or(v, "splash_radius", path, 0.0);
  u.suicide_on_attack = bool_or(v, "suicide_on_attack", path, false);
  u.can_traverse_cliffs = bool_or(v, "can_traverse_cliffs", path, false);

  if (u.max_health <= 0) fail(join_path(path, "max_health"), "must be > 0");
  for (auto [key, value] : {std::pair{"max_shield", u.max_shield}, {"defense", u.defense},
                            {"attack_range", u.attack_range}, {"speed", u.speed}, {"damage", u.damage},
                            {"dps", u.dps}, {"heal_rate", u.heal_rate}, {"splash_radius", u.splash_radius}}) {
    if (value < 0) fail(join_path(path, key), "must be non-negative");
  }
  if (u.heal_rate <= 0) {
    if (u.dps <= 0) fail(join_path(path, "dps"), "must be > 0 for a non-healer");
    if (u.damage <= 0) fail(join_path(path, "damage"), "must be > 0 for a non-healer");
  }
  if ((u.damage > 0) != (u.dps > 0)) fail(join_path(path, "dps"), "damage and dps must both be positive or both zero");
  return u;
}

std::vector<Placement> roster_at(const json& doc, const std::string& key, const MapSpec& map) {
  const json& list = require(doc, key, "");
  if (!list.is_array()) fail(key, "expected a list");
  if (list.empty()) throw LoadError(key + " empty");
  std::vector<Placement> out;
  for (std::size_t i = 0; i < list.size(); ++i) {
    std::string path = key + "[" + std::to_string(i) + "]";
    Placement p;
    p.unit = unit_at(require(list[i], "unit", path), path + ".unit");
    p.pos = point_at(require(list[i], "pos", path), path + ".pos");
    if (!map.walkable(p.pos, p.unit.can_traverse_cliffs)) fail(path + ".pos", "spawn position is not walkable");
    out.push_back(std::move(p));
  }
  return out;
}

std::string fmt(double v) { return format_shortest(v); }

std::string point_text(Vec2 p) { return "(" + fmt(p.x) + ", " + fmt(p.y) + ")"; }

std::string join_and(const std::vector<std::string>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i > 0) out += (i + 1 == items.size()) ? " and " : ", ";
    out += items[i];
  }
  return out;
}

/// "2 Stalker" / "1 Marauder and 1 Medivac", grouped by type in roster order.
std::string roster_text(const std::vector<Placement>& roster) {
  std::vector<std::pair<std::string, int>> counts;
  for (const auto& p : roster) {
    auto it = std::find_if(counts.begin(), counts.end(), [&](const auto& c) { return c.first == p.unit.display_name; });
    if (it == counts.end()) {
      counts.emplace_back(p.unit.display_name, 1);
    } else {
      ++it->second;
    }
  }
  std::vector<std::string> parts;
  for (const auto& [name, n] : counts) parts.push_back(std::to_string(n) + " " + name);
  return join_and(parts);
}

std::string unit_text(const UnitSpec& u) {
  std::ostringstream os;
  os << "The " << u.display_name << " unit has " << fmt(u.max_health) << " health, " << fmt(u.max_shield)
     << " shield, " << fmt(u.defense) << " defense, " << fmt(u.attack_range) << " attacking range, "
     << fmt(u.speed) << " speed, " << fmt(u.damage) << " damage with " << fmt(u.dps) << " DPS.";
  if (u.heal_rate > 0) os << " It heals " << fmt(u.heal_rate) << " health per second to a nearby ally.";
  if (u.splash_radius > 0) os << " Its attacks deal splash damage within " << fmt(u.splash_radius) << " range.";
  if (u.suicide_on_attack) os << " It dies when it attacks.";
  if (u.can_traverse_cliffs) os << " It can move up and down cliffs.";
  return os.str();
}

std::string terrain_text(const MapSpec& map) {
  if (map.cliff_cells.empty() && map.choke_cells.empty()) {
    return "There are no terrain advantages or choke points in this map.";
  }
  std::string out;
  if (!map.cliff_cells.empty()) {
    int x0 = map.cliff_cells.begin()->x, x1 = x0, y0 = map.cliff_cells.begin()->y, y1 = y0;
    for (const Cell& c : map.cliff_cells) {
      x0 = std::min(x0, c.x);
      x1 = std::max(x1, c.x);
      y0 = std::min(y0, c.y);
      y1 = std::max(y1, c.y);
    }
    out += "There is a cliff area covering x from " + std::to_string(x0) + " to " + std::to_string(x1 + 1) +
           " and y from " + std::to_string(y0) + " to " + std::to_string(y1 + 1) +
           "; only units that can climb cliffs can cross it.";
  }
  if (!map.choke_cells.empty()) {
    std::vector<std::string> cells;
    for (const Cell& c : map.choke_cells) cells.push_back("(" + std::to_string(c.x) + ", " + std::to_string(c.y) + ")");
    if (!out.empty()) out += "\n";
    out += "There are choke points at " + join_and(cells) + ".";
  }
  return out;
}

std::string positions_text(const std::vector<Placement>& roster) {
  std::vector<std::string> pts;
  for (const auto& p : roster) {
    std::string t = point_text(p.pos);
    if (std::find(pts.begin(), pts.end(), t) == pts.end()) pts.push_back(t);
  }
  return join_and(pts) + (pts.size() == 1 ? " point" : " points");
}

}  // namespace

std::string render_task_text(const ScenarioSpec& s) {
  std::ostringstream os;
  os << "The map is " << s.name << ".\n";
  os << "You can control " << roster_text(s.allies) << " units individually, and the enemy controls "
     << roster_text(s.enemies) << " units.\n";
  std::vector<std::string> seen;
  for (const auto* roster : {&s.allies, &s.enemies}) {
    for (const auto& p : *roster) {
      if (std::find(seen.begin(), seen.end(), p.unit.display_name) != seen.end()) continue;
      seen.push_back(p.unit.display_name);
      os << unit_text(p.unit) << "\n";
    }
  }
  os << "All the units have no abilities, such as blinking or equipment.\n";
  os << "The map is a " << fmt(s.map.width) << "*" << fmt(s.map.height) << "-sized "
     << (s.map.width == s.map.height ? "square" : "rectangular") << " map.\n";
  os << "The available area of the x-axis is from " << fmt(s.map.walkable_x.lo) << " to " << fmt(s.map.walkable_x.hi)
     << ", and the y-axis is from " << fmt(s.map.walkable_y.lo) << " to " << fmt(s.map.walkable_y.hi) << ".\n";
  os << "The enemy units are at " << positions_text(s.enemies) << ", and your units are at "
     << positions_text(s.allies) << " initially.\n";
  bool enemies_move = std::any_of(s.enemies.begin(), s.enemies.end(), [](const auto& p) { return p.unit.speed > 0; });
  if (enemies_move) {
    os << "The enemy controls all the units to move and attack " << point_text(s.enemy_rally)
       << " points along the way.\n";
  }
  os << terrain_text(s.map);
  for (const auto& note : s.notes) os << "\n" << note;
  return os.str();
}

ScenarioSpec load_scenario(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw LoadError(std::string("malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) throw LoadError("scenario document must be a JSON object");

  ScenarioSpec s;
  s.name = string_at(doc, "name", "");

  const json& m = require(doc, "map", "");
  s.map.width = number_at(m, "width", "map");
  s.map.height = number_at(m, "height", "map");
  if (s.map.width <= 0 || s.map.height <= 0) fail("map", "width and height must be > 0");
  s.map.walkable_x = interval_at(m, "walkable_x", "map");
  s.map.walkable_y = interval_at(m, "walkable_y", "map");
  if (s.map.walkable_x.lo < 0 || s.map.walkable_x.hi > s.map.width) fail("map.walkable_x", "outside [0, width]");
  if (s.map.walkable_y.lo < 0 || s.map.walkable_y.hi > s.map.height) fail("map.walkable_y", "outside [0, height]");
  s.map.cliff_cells = cells_at(m, "cliff_cells", "map");
  s.map.choke_cells = cells_at(m, "choke_cells", "map");
  auto cell_inside = [&](const Cell& c) {
    return c.x >= std::floor(s.map.walkable_x.lo) && c.x < s.map.walkable_x.hi &&
           c.y >= std::floor(s.map.walkable_y.lo) && c.y < s.map.walkable_y.hi;
  };
  for (const Cell& c : s.map.cliff_cells) {
    if (!cell_inside(c)) fail("map.cliff_cells", "cell outside the walkable area");
  }
  for (const Cell& c : s.map.choke_cells) {
    if (!cell_inside(c)) fail("map.choke_cells", "cell outside the walkable area");
  }

  s.allies = roster_at(doc, "allies", s.map);
  s.enemies = roster_at(doc, "enemies", s.map);
  s.enemy_rally = point_at(require(doc, "enemy_rally", ""), "enemy_rally");
  s.step_limit_seconds = number_or(doc, "step_limit_seconds", "", 120.0);
  if (s.step_limit_seconds <= 0) fail("step_limit_seconds", "must be > 0");
  s.spawn_jitter = number_or(doc, "spawn_jitter", "", 0.0);
  if (s.spawn_jitter < 0) fail("spawn_jitter", "must be non-negative");
  if (auto it = doc.find("notes"); it != doc.end()) {
    if (!it->is_array()) fail("notes", "expected a list of strings");
    for (const auto& n : *it) {
      if (!n.is_string()) fail("notes", "expected a list of strings");
      s.notes.push_back(n.get<std::string>());
    }
  }
  s.task_text = render_task_text(s);
  return s;
}

ScenarioSpec load_scenario_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError("cannot open scenario file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return load_scenario(buf.str());
}

}  // namespace microforge::arena
