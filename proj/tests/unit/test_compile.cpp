// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include "microforge/arena/battle.hpp"
#include "microforge/policy/compile.hpp"
#include "microforge/policy/parser.hpp"
#include "test_support.hpp"

using namespace microforge;
using namespace microforge::policy;
using arena::ActionKind;

namespace {

arena::Observation obs() {
  arena::Observation o;
  o.health_frac = 1;
  o.shield_frac = 1;
  o.num_allies = 2;
  o.num_enemies = 1;
  return o;
}

}  // namespace

TEST(Compile, TypeMismatchReportsSpan) {
  try {
    compile(parse("policy \"p\" { unit m {\n  if time + 1 { hold() } } }"));
    FAIL();
  } catch (const CompileError& e) {
    EXPECT_EQ(e.span().line, 2);
  }
  EXPECT_THROW(compile(parse("policy \"p\" { unit m { move_to(1 > 2, 3) } }")), CompileError);
  EXPECT_THROW(compile(parse("policy \"p\" { unit m { var v = 0 set v = time > 1 } }")), CompileError);
  EXPECT_THROW(compile(parse("policy \"p\" { unit m { if not time { hold() } } }")), CompileError);
  EXPECT_THROW(compile(parse("policy \"p\" { unit m { if (1 > 2) + 1 > 0 { hold() } } }")), CompileError);
  EXPECT_THROW(compile(parse("policy \"p\" { unit m { if 1 > 2 == 3 > 4 { hold() } } }")), Error);
}

TEST(Compile, AlwaysAttackWeakestTargetsMinimalPool) {
  auto sc = mf_test::scenario_ptr("3m_vs_3m");
  auto policy = compile(parse("policy \"p\" { unit marine { attack_weakest_enemy() } }"));
  arena::BattleState s = arena::initial_state(sc, 0);
  s.units[4].health = 10;
  auto d = policy.decide(s);
  ASSERT_EQ(d.commands.size(), 3u);
  for (const auto& c : d.commands) {
    EXPECT_EQ(c.kind, arena::Command::Kind::attack);
    EXPECT_EQ(c.target, 4);
  }
}

TEST(Compile, CooldownRetreatMirrorsHitAndRun) {
  auto policy = compile(parse(mf_test::read_file(mf_test::data_path("policies/hit_and_run.pol"))));
  arena::Observation o = obs();
  o.weapon_cooldown = 0.5;
  EXPECT_EQ(policy.evaluate("stalker", o, 0).action.kind, ActionKind::retreat_from_closest_enemy);
  EXPECT_DOUBLE_EQ(policy.evaluate("stalker", o, 0).action.a, 2);
  o.weapon_cooldown = 0;
  EXPECT_EQ(policy.evaluate("stalker", o, 0).action.kind, ActionKind::attack_weakest_enemy);
}

TEST(Compile, DivisionByZeroIsEpisodeErrorAtSpan) {
  auto policy = compile(parse("policy \"p\" { unit m {\n  move_to(1 / (num_enemies - 1), 0) } }"));
  try {
    policy.evaluate("m", obs(), 17);
    FAIL();
  } catch (const EpisodeError& e) {
    EXPECT_EQ(e.tick(), 17);
    ASSERT_TRUE(e.span().has_value());
    EXPECT_EQ(e.span()->line, 2);
  }
}

TEST(Compile, StatusVariablesPersistAndUpdate) {
  auto policy = compile(parse(mf_test::read_file(mf_test::data_path("policies/shield_kite.pol"))));
  arena::UnitSpec stalker;
  stalker.name = "stalker";
  arena::StatusVars vars = policy.initial_status(stalker);
  ASSERT_EQ(vars.size(), 1u);
  EXPECT_DOUBLE_EQ(vars.at("recharging"), 0);

  arena::Observation o = obs();
  o.shield_frac = 0.1;
  o.status = vars;
  auto d = policy.evaluate("stalker", o, 0);
  EXPECT_EQ(d.action.kind, ActionKind::retreat_from_closest_enemy);
  EXPECT_DOUBLE_EQ(d.status.at("recharging"), 1);

  o.shield_frac = 0.5;
  o.status = d.status;
  d = policy.evaluate("stalker", o, 1);
  EXPECT_EQ(d.action.kind, ActionKind::retreat_from_closest_enemy);

  o.shield_frac = 0.95;
  o.status = d.status;
  d = policy.evaluate("stalker", o, 2);
  EXPECT_EQ(d.action.kind, ActionKind::attack_weakest_enemy);
  EXPECT_DOUBLE_EQ(d.status.at("recharging"), 0);
}

TEST(Compile, ImplicitHoldAndMissingBlock) {
  auto policy = compile(parse("policy \"p\" { unit m { if time > 5 { attack_focus() } } }"));
  EXPECT_EQ(policy.evaluate("m", obs(), 0).action.kind, ActionKind::hold);
  EXPECT_EQ(policy.evaluate("other", obs(), 0).action.kind, ActionKind::hold);
  arena::Observation late = obs();
  late.time = 6;
  EXPECT_EQ(policy.evaluate("m", late, 0).action.kind, ActionKind::attack_focus);
}

TEST(Compile, ConstantsAndArithmetic) {
  auto policy = compile(parse(
      "policy \"p\" { const A = 2 const B = 0.5 unit m { move_to(A * 3 - 1, -B + A / 4) } }"));
  auto a = policy.evaluate("m", obs(), 0).action;
  EXPECT_EQ(a.kind, ActionKind::move_to);
  EXPECT_DOUBLE_EQ(a.a, 5);
  EXPECT_DOUBLE_EQ(a.b, 0);
}

TEST(Compile, BindRejectsUnknownUnitType) {
  auto policy = compile(parse("policy \"p\" { unit zergling { hold() } }"));
  EXPECT_THROW(policy.bind(mf_test::scenario("3m_vs_3m")), EpisodeError);
  EXPECT_NO_THROW(mf_test::policy_file("focus_fire").bind(mf_test::scenario("3m_vs_3m")));
}

TEST(Compile, TotalOverGeneratedPolicies) {
  mf_test::PolicyGen gen(8);
  auto sc = mf_test::scenario_ptr("3m_vs_3m");
  for (int i = 0; i < 100; ++i) {
    auto policy = mf_test::policy_text(gen.policy("marine"));
    arena::BattleState s = arena::initial_state(sc, static_cast<std::uint64_t>(i));
    for (int t = 0; t < 30 && !arena::check_outcome(s); ++t) {
      auto d = policy.decide(s);
      ASSERT_EQ(static_cast<int>(d.commands.size()), s.living(arena::Team::ally));
      s = arena::step(std::move(s), d.commands);
    }
  }
}
