// SPDX-License-Identifier: Apache-2.0
#include "microforge/arena/rollout.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <memory>
#include <thread>

#include "microforge/common/errors.hpp"
#include "microforge/common/numfmt.hpp"

namespace microforge::arena {

std::string to_string(Result result) {
  switch (result) {
    case Result::win:
      return "win";
    case Result::lose:
      return "lose";
    case Result::tie:
      break;
  }
  return "tie";
}

std::optional<Result> check_outcome(const BattleState& state) {
  int allies = state.living(Team::ally);
  int enemies = state.living(Team::enemy);
  if (allies == 0 && enemies == 0) return Result::tie;
  if (enemies == 0) return Result::win;
  if (allies == 0) return Result::lose;
  if (state.elapsed() >= state.scenario->step_limit_seconds) return Result::tie;
  return std::nullopt;
}

namespace {

EpisodeOutcome run_one(const std::shared_ptr<const ScenarioSpec>& scenario, const Controller& controller,
                       std::uint64_t seed) {
  BattleState state = initial_state(scenario, seed);
  for (UnitState& u : state.units) {
    if (u.team == Team::ally) u.status = controller.initial_status(u.spec);
  }
  std::optional<Result> result;
  while (!(result = check_outcome(state))) {
    Controller::Decision decision = controller.decide(state);
    for (auto& [id, vars] : decision.status_updates) {
      UnitState& u = state.units.at(static_cast<std::size_t>(id));
      if (u.team != Team::ally || !u.alive) throw ContractViolation("status update for a non-controlled unit");
      u.status = std::move(vars);
    }
    state = step(std::move(state), decision.commands);
  }

  EpisodeOutcome out;
  out.result = *result;
  out.seed = seed;
  out.ticks_elapsed = state.tick;
  out.surviving_allies = state.living(Team::ally);
  out.surviving_enemies = state.living(Team::enemy);
  out.damage_dealt = state.ledger.damage_dealt;
  out.damage_taken_health = state.ledger.damage_taken_health;
  out.damage_taken_shield = state.ledger.damage_taken_shield;
  out.enemy_kills = state.ledger.enemy_kills;
  out.score = out.damage_dealt + 10.0 * out.enemy_kills + (out.result == Result::win ? 100.0 : 0.0);
  for (const UnitState& u : state.units) {
    if (u.team != Team::enemy) continue;
    out.enemy_pool_lost += (u.spec.max_health + u.spec.max_shield) - u.pool();
  }
  return out;
}

}  // namespace

EpisodeOutcome run_episode(const ScenarioSpec& scenario, const Controller& controller, std::uint64_t seed) {
  controller.bind(scenario);
  return run_one(std::make_shared<const ScenarioSpec>(scenario), controller, seed);
}

BattleReport aggregate(std::vector<EpisodeOutcome> outcomes) {
  BattleReport r;
  r.episodes = static_cast<int>(outcomes.size());
  for (const EpisodeOutcome& o : outcomes) {
    if (o.result == Result::win) ++r.wins;
    if (o.result == Result::tie) ++r.ties;
    if (o.result == Result::lose) ++r.losses;
    r.mean_score += o.score;
    r.mean_damage_dealt += o.damage_dealt;
    r.mean_damage_taken_health += o.damage_taken_health;
    r.mean_damage_taken_shield += o.damage_taken_shield;
    r.mean_surviving_allies += o.surviving_allies;
    r.mean_surviving_enemies += o.surviving_enemies;
  }
  if (r.episodes > 0) {
    double n = r.episodes;
    r.mean_score /= n;
    r.mean_damage_dealt /= n;
    r.mean_damage_taken_health /= n;
    r.mean_damage_taken_shield /= n;
    r.mean_surviving_allies /= n;
    r.mean_surviving_enemies /= n;
    r.win_rate = r.wins / n;
  }
  r.outcomes = std::move(outcomes);
  return r;
}

BattleReport run_rollouts(const ScenarioSpec& scenario, const Controller& controller, int episodes,
                          std::uint64_t base_seed, int jobs) {
  if (episodes < 1) throw ContractViolation("run_rollouts: episodes must be >= 1");
  controller.bind(scenario);
  auto shared = std::make_shared<const ScenarioSpec>(scenario);
  const auto count = static_cast<std::size_t>(episodes);
  std::vector<std::optional<EpisodeOutcome>> results(count);
  std::vector<std::exception_ptr> errors(count);

  auto run_index = [&](std::size_t i) {
    try {
      results[i] = run_one(shared, controller, base_seed + i);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  };

  jobs = std::clamp(jobs, 1, episodes);
  if (jobs == 1) {
    for (std::size_t i = 0; i < count; ++i) {
      run_index(i);
      if (errors[i]) break;
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> workers;
    for (int w = 0; w < jobs; ++w) {
      workers.emplace_back([&] {
        for (std::size_t i = next++; i < count; i = next++) run_index(i);
      });
    }
  }

  std::vector<EpisodeOutcome> outcomes;
  for (std::size_t i = 0; i < count; ++i) {
    if (errors[i]) {
      try {
        std::rethrow_exception(errors[i]);
      } catch (const EpisodeError& e) {
        throw e.with_episode(static_cast<int>(i));
      }
    }
    outcomes.push_back(*results[i]);
  }
  return aggregate(std::move(outcomes));
}

nlohmann::json to_json(const EpisodeOutcome& o) {
  return {
      {"seed", o.seed},
      {"result", to_string(o.result)},
      {"ticks_elapsed", o.ticks_elapsed},
      {"surviving_allies", o.surviving_allies},
      {"surviving_enemies", o.surviving_enemies},
      {"damage_dealt", o.damage_dealt},
      {"damage_taken_health", o.damage_taken_health},
      {"damage_taken_shield", o.damage_taken_shield},
      {"enemy_kills", o.enemy_kills},
      {"score", o.score},
  };
}

nlohmann::json to_json(const BattleReport& r) {
  nlohmann::json outcomes = nlohmann::json::array();
  for (const EpisodeOutcome& o : r.outcomes) outcomes.push_back(to_json(o));
  return {
      {"episodes", r.episodes},
      {"wins", r.wins},
      {"ties", r.ties},
      {"losses", r.losses},
      {"win_rate", r.win_rate},
      {"mean_score", r.mean_score},
      {"mean_damage_dealt", r.mean_damage_dealt},
      {"mean_damage_taken_health", r.mean_damage_taken_health},
      {"mean_damage_taken_shield", r.mean_damage_taken_shield},
      {"mean_surviving_allies", r.mean_surviving_allies},
      {"mean_surviving_enemies", r.mean_surviving_enemies},
      {"outcomes", std::move(outcomes)},
  };
}

std::string serialize(const BattleReport& report) { return to_json(report).dump(2); }

std::string render_report_text(const BattleReport& r) {
  auto f = [](double v) { return format_trimmed(v); };
  return "You win " + std::to_string(r.wins) + " times, tie " + std::to_string(r.ties) + " times, and lose " +
         std::to_string(r.losses) + " times out of " + std::to_string(r.episodes) + " combats.\n" + "There are " +
         f(r.mean_surviving_allies) + " units and " + f(r.mean_surviving_enemies) + " enemy units left.\n" +
         "You achieve " + f(r.mean_score) + " scores, give " + f(r.mean_damage_dealt) +
         " damages to the enemy, take " + f(r.mean_damage_taken_health) + " damage on health, and take " +
         f(r.mean_damage_taken_shield) + " damage on the shield.";
}

}  // namespace microforge::arena
