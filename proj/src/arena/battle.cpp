// SPDX-License-Identifier: Apache-2.0
#include "microforge/arena/battle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "microforge/common/errors.hpp"

namespace microforge::arena {

const UnitState& BattleState::unit(UnitId id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= units.size()) {
    throw ContractViolation("unknown unit id " + std::to_string(id));
  }
  return units[static_cast<std::size_t>(id)];
}

int BattleState::living(Team team) const {
  return static_cast<int>(
      std::count_if(units.begin(), units.end(), [team](const UnitState& u) { return u.alive && u.team == team; }));
}

namespace {

Team opposite(Team t) { return t == Team::ally ? Team::enemy : Team::ally; }

/// Uniform double in [0, 1) from the top 53 bits; identical on every platform
/// (std::uniform_real_distribution is not).
double unit_uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

/// Closest living unit of `team` to `from`, ties to the lowest id.
std::optional<UnitId> closest_of(const BattleState& s, Team team, Vec2 from, UnitId exclude = -1) {
  std::optional<UnitId> best;
  double best_d = std::numeric_limits<double>::infinity();
  for (const UnitState& u : s.units) {
    if (!u.alive || u.team != team || u.id == exclude) continue;
    double d = distance(from, u.pos);
    if (d < best_d) {
      best_d = d;
      best = u.id;
    }
  }
  return best;
}

std::optional<UnitId> weakest_of(const BattleState& s, Team team) {
  std::optional<UnitId> best;
  double best_pool = std::numeric_limits<double>::infinity();
  for (const UnitState& u : s.units) {
    if (!u.alive || u.team != team) continue;
    if (u.pool() < best_pool) {
      best_pool = u.pool();
      best = u.id;
    }
  }
  return best;
}

Vec2 move_toward(const MapSpec& map, const UnitState& u, Vec2 dest, double max_step) {
  Vec2 delta = dest - u.pos;
  double dist = delta.length();
  if (dist <= 1e-12 || max_step <= 0) return u.pos;
  double len = std::min(max_step, dist);
  Vec2 candidate = map.clamp(u.pos + delta * (len / dist));
  bool climb = u.spec.can_traverse_cliffs;
  if (map.walkable(candidate, climb)) return candidate;
  Vec2 along_x{candidate.x, u.pos.y};
  if (map.walkable(along_x, climb)) return along_x;
  Vec2 along_y{u.pos.x, candidate.y};
  if (map.walkable(along_y, climb)) return along_y;
  return u.pos;
}

struct Damage {
  double shield = 0.0;
  double health = 0.0;
};

Damage absorb(UnitState& target, double amount) {
  Damage d;
  d.shield = std::min(target.shield, amount);
  target.shield -= d.shield;
  d.health = std::min(target.health, amount - d.shield);
  target.health -= d.health;
  return d;
}

void account(Ledger& ledger, const UnitState& target, Damage d) {
  if (target.team == Team::enemy) {
    ledger.damage_dealt += d.shield + d.health;
  } else {
    ledger.damage_taken_shield += d.shield;
    ledger.damage_taken_health += d.health;
  }
}

}  // namespace

BattleState initial_state(std::shared_ptr<const ScenarioSpec> scenario, std::uint64_t seed) {
  if (!scenario) throw ContractViolation("initial_state: null scenario");
  BattleState s;
  s.scenario = scenario;
  s.rng.seed(seed);
  UnitId next = 0;
  for (auto [team, roster] : {std::pair{Team::ally, &scenario->allies}, {Team::enemy, &scenario->enemies}}) {
    for (const Placement& p : *roster) {
      UnitState u;
      u.id = next++;
      u.team = team;
      u.spec = p.unit;
      u.spawn = p.pos;
      u.pos = p.pos;
      if (scenario->spawn_jitter > 0) {
        double jx = (2.0 * unit_uniform(s.rng) - 1.0) * scenario->spawn_jitter;
        double jy = (2.0 * unit_uniform(s.rng) - 1.0) * scenario->spawn_jitter;
        Vec2 jittered = scenario->map.clamp({p.pos.x + jx, p.pos.y + jy});
        if (scenario->map.walkable(jittered, p.unit.can_traverse_cliffs)) u.pos = jittered;
      }
      u.health = p.unit.max_health;
      u.shield = p.unit.max_shield;
      s.units.push_back(std::move(u));
    }
  }
  return s;
}

Observation observe(const BattleState& state, UnitId id) {
  const UnitState& me = state.unit(id);
  if (!me.alive) throw ContractViolation("observe: unit " + std::to_string(id) + " is dead");
  Observation o;
  o.health_frac = me.health / me.spec.max_health;
  o.shield_frac = me.spec.max_shield > 0 ? me.shield / me.spec.max_shield : 0.0;
  o.weapon_cooldown = me.weapon_cooldown;
  o.my_x = me.pos.x;
  o.my_y = me.pos.y;
  o.time = state.elapsed();
  o.status = me.status;

  Team foe = opposite(me.team);
  if (auto e = closest_of(state, foe, me.pos)) o.dist_to_closest_enemy = distance(me.pos, state.unit(*e).pos);
  if (auto a = closest_of(state, me.team, me.pos, me.id)) o.dist_to_closest_ally = distance(me.pos, state.unit(*a).pos);
  Vec2 sum;
  for (const UnitState& u : state.units) {
    if (!u.alive) continue;
    if (u.team == me.team) {
      ++o.num_allies;
    } else {
      ++o.num_enemies;
      sum = sum + u.pos;
    }
  }
  if (o.num_enemies > 0) o.enemy_centroid = sum * (1.0 / o.num_enemies);
  return o;
}

std::vector<Command> enemy_commands(const BattleState& state) {
  std::vector<Command> out;
  for (const UnitState& u : state.units) {
    if (!u.alive || u.team != Team::enemy) continue;
    auto target = closest_of(state, Team::ally, u.pos);
    double reach = std::max(u.spec.attack_range, kEnemySight);
    if (target && u.spec.can_attack() && distance(u.pos, state.unit(*target).pos) <= reach + kRangeEpsilon) {
      out.push_back(Command::attack(u.id, *target));
    } else if (u.spec.speed > 0) {
      out.push_back(Command::move(u.id, state.scenario->enemy_rally));
    } else {
      out.push_back(Command::hold(u.id));
    }
  }
  return out;
}

Command resolve_action(const BattleState& state, UnitId id, const Action& action) {
  const UnitState& me = state.unit(id);
  Team foe = opposite(me.team);
  const MapSpec& map = state.scenario->map;
  switch (action.kind) {
    case ActionKind::attack_weakest_enemy:
      if (auto t = weakest_of(state, foe)) return Command::attack(id, *t);
      return Command::hold(id);
    case ActionKind::attack_closest_enemy:
      if (auto t = closest_of(state, foe, me.pos)) return Command::attack(id, *t);
      return Command::hold(id);
    case ActionKind::attack_focus:
      return Command::focus(id);
    case ActionKind::move_to:
      return Command::move(id, map.clamp({action.a, action.b}));
    case ActionKind::retreat_from_closest_enemy: {
      auto e = closest_of(state, foe, me.pos);
      if (!e || action.a <= 0) return Command::hold(id);
      Vec2 threat = state.unit(*e).pos;
      Vec2 away = me.pos - threat;
      double len = away.length();
      Vec2 dir = len > 1e-12 ? away * (1.0 / len) : Vec2{0.0, -1.0};
      Vec2 dest = map.clamp(me.pos + dir * action.a);
      if (distance(dest, me.pos) < 1e-6) {
        // Pinned against a wall: slide along it, away from the threat.
        Vec2 left = map.clamp(me.pos + Vec2{-dir.y, dir.x} * action.a);
        Vec2 right = map.clamp(me.pos + Vec2{dir.y, -dir.x} * action.a);
        dest = distance(right, threat) > distance(left, threat) ? right : left;
      }
      return Command::move(id, dest);
    }
    case ActionKind::hold:
      break;
  }
  return Command::hold(id);
}

BattleState step(BattleState state, std::span<const Command> ally_commands) {
  const ScenarioSpec& sc = *state.scenario;
  const std::size_t n = state.units.size();

  std::vector<Command> orders(n);
  for (std::size_t i = 0; i < n; ++i) orders[i] = Command::hold(static_cast<UnitId>(i));
  for (const Command& c : ally_commands) {
    if (c.unit < 0 || static_cast<std::size_t>(c.unit) >= n) {
      throw ContractViolation("command for unknown unit " + std::to_string(c.unit));
    }
    const UnitState& u = state.units[static_cast<std::size_t>(c.unit)];
    if (u.team != Team::ally) throw ContractViolation("command for non-allied unit " + std::to_string(c.unit));
    if (!u.alive) throw ContractViolation("command for dead unit " + std::to_string(c.unit));
    orders[static_cast<std::size_t>(c.unit)] = c;
  }
  for (const Command& c : enemy_commands(state)) orders[static_cast<std::size_t>(c.unit)] = c;

  // Shared focus target persists until it dies.
  if (state.ally_focus && !state.units[static_cast<std::size_t>(*state.ally_focus)].alive) state.ally_focus.reset();
  for (Command& c : orders) {
    if (c.kind != Command::Kind::attack_focus) continue;
    if (!state.ally_focus) state.ally_focus = weakest_of(state, Team::enemy);
    c = state.ally_focus ? Command::attack(c.unit, *state.ally_focus) : Command::hold(c.unit);
  }

  // Movement: every unit moves from the tick's starting positions.
  std::vector<Vec2> next_pos(n);
  for (std::size_t i = 0; i < n; ++i) {
    const UnitState& u = state.units[i];
    next_pos[i] = u.pos;
    if (!u.alive) continue;
    double max_step = u.spec.speed * kTickSeconds;
    const Command& c = orders[i];
    if (c.kind == Command::Kind::move) {
      next_pos[i] = move_toward(sc.map, u, c.destination, max_step);
    } else if (c.kind == Command::Kind::attack) {
      const UnitState& t = state.units[static_cast<std::size_t>(c.target)];
      if (!t.alive) continue;
      double reach = u.spec.can_attack() ? u.spec.attack_range : kHealRange;
      double gap = distance(u.pos, t.pos) - reach;
      if (gap > kRangeEpsilon) next_pos[i] = move_toward(sc.map, u, t.pos, std::min(max_step, gap));
    }
  }
  for (std::size_t i = 0; i < n; ++i) state.units[i].pos = next_pos[i];

  // Attacks: everyone alive at the start of the phase fires; damage lands in id order.
  struct Shot {
    UnitId attacker;
    UnitId target;
  };
  std::vector<Shot> shots;
  for (std::size_t i = 0; i < n; ++i) {
    UnitState& u = state.units[i];
    const Command& c = orders[i];
    if (!u.alive || c.kind != Command::Kind::attack || !u.spec.can_attack()) continue;
    const UnitState& t = state.units[static_cast<std::size_t>(c.target)];
    if (!t.alive || u.weapon_cooldown > 0) continue;
    if (distance(u.pos, t.pos) > u.spec.attack_range + kRangeEpsilon) continue;
    shots.push_back({u.id, t.id});
    u.weapon_cooldown = u.spec.attack_period();
  }
  std::vector<bool> damaged(n, false);
  auto hit = [&](UnitState& target, double amount) {
    if (target.health <= 0) return;
    Damage d = absorb(target, amount);
    account(state.ledger, target, d);
    damaged[static_cast<std::size_t>(target.id)] = true;
  };
  for (const Shot& shot : shots) {
    const UnitState& attacker = state.units[static_cast<std::size_t>(shot.attacker)];
    UnitState& target = state.units[static_cast<std::size_t>(shot.target)];
    double effective = std::max(1.0, attacker.spec.damage - target.spec.defense);
    Vec2 centre = target.pos;
    Team victims = target.team;
    hit(target, effective);
    if (attacker.spec.splash_radius > 0) {
      for (UnitState& other : state.units) {
        if (other.id == target.id || other.team != victims || !other.alive) continue;
        if (distance(other.pos, centre) <= attacker.spec.splash_radius + kRangeEpsilon) hit(other, effective);
      }
    }
  }
  for (const Shot& shot : shots) {
    UnitState& attacker = state.units[static_cast<std::size_t>(shot.attacker)];
    if (attacker.spec.suicide_on_attack) attacker.alive = false;
  }
  for (UnitState& u : state.units) {
    if (u.alive && u.health <= 0) {
      u.alive = false;
      if (u.team == Team::enemy) ++state.ledger.enemy_kills;
    }
  }

  // Healing: lowest health fraction living teammate in range, ties to lowest id.
  for (std::size_t i = 0; i < n; ++i) {
    const UnitState& healer = state.units[i];
    if (!healer.alive || healer.spec.heal_rate <= 0) continue;
    UnitState* best = nullptr;
    double best_frac = std::numeric_limits<double>::infinity();
    for (UnitState& u : state.units) {
      if (!u.alive || u.team != healer.team || u.id == healer.id || u.health >= u.spec.max_health) continue;
      if (distance(u.pos, healer.pos) > kHealRange + kRangeEpsilon) continue;
      double frac = u.health / u.spec.max_health;
      if (frac < best_frac) {
        best_frac = frac;
        best = &u;
      }
    }
    if (!best) continue;
    double amount = std::min(healer.spec.heal_rate * kTickSeconds, best->spec.max_health - best->health);
    best->health += amount;
    if (best->team == Team::enemy) state.ledger.damage_dealt -= amount;
  }

  for (std::size_t i = 0; i < n; ++i) {
    UnitState& u = state.units[i];
    if (!u.alive) continue;
    if (damaged[i]) {
      u.seconds_since_damaged = 0.0;
    } else {
      if (u.seconds_since_damaged >= kShieldRegenDelay && u.shield < u.spec.max_shield) {
        double regen = std::min(kShieldRegenPerSecond * kTickSeconds, u.spec.max_shield - u.shield);
        u.shield += regen;
        if (u.team == Team::enemy) state.ledger.damage_dealt -= regen;
      }
      u.seconds_since_damaged += kTickSeconds;
    }
    u.weapon_cooldown = std::max(0.0, u.weapon_cooldown - kTickSeconds);
  }

  if (state.ally_focus && !state.units[static_cast<std::size_t>(*state.ally_focus)].alive) state.ally_focus.reset();
  ++state.tick;
  return state;
}

}  // namespace microforge::arena
