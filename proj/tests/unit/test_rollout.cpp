// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include "microforge/arena/rollout.hpp"
#include "test_support.hpp"

using namespace microforge;
using namespace microforge::arena;

TEST(RunEpisode, HoldingAgainstAdvancingMarinesLoses) {
  auto outcome = run_episode(mf_test::scenario("10m_vs_11m"), mf_test::policy_file("hold"), 0);
  EXPECT_EQ(outcome.result, Result::lose);
  EXPECT_EQ(outcome.surviving_allies, 0);
  EXPECT_GT(outcome.surviving_enemies, 0);
}

TEST(RunEpisode, StepLimitGivesTie) {
  auto outcome = run_episode(mf_test::scenario("standoff"), mf_test::policy_file("hold"), 0);
  EXPECT_EQ(outcome.result, Result::tie);
  EXPECT_EQ(outcome.ticks_elapsed, 40);
  EXPECT_DOUBLE_EQ(outcome.score, 0.0);
}

TEST(RunEpisode, ShieldKiteWinsSeedZero) {
  auto outcome = run_episode(mf_test::scenario("2s_vs_1sc"), mf_test::policy_file("shield_kite"), 0);
  EXPECT_EQ(outcome.result, Result::win);
  EXPECT_EQ(outcome.surviving_allies, 2);
  EXPECT_DOUBLE_EQ(outcome.score, outcome.damage_dealt + 10 * 1 + 100);
}

TEST(RunEpisode, ScoreFormula) {
  auto outcome = run_episode(mf_test::scenario("3m_vs_3m"), mf_test::policy_file("focus_fire"), 3);
  double win = outcome.result == Result::win ? 100.0 : 0.0;
  EXPECT_DOUBLE_EQ(outcome.score, outcome.damage_dealt + 10.0 * outcome.enemy_kills + win);
}

TEST(RunEpisode, UnboundPolicyIsEpisodeError) {
  EXPECT_THROW(run_episode(mf_test::scenario("2s_vs_1sc"), mf_test::policy_file("focus_fire"), 0), EpisodeError);
}

TEST(RunEpisode, RuntimeFaultCarriesTickAndSpan) {
  auto policy = mf_test::policy_text(
      "policy \"bad\" {\n  unit marine {\n    if time / (num_enemies - num_enemies) > 1 {\n      hold()\n    }\n  }\n}\n");
  try {
    run_episode(mf_test::scenario("3m_vs_3m"), policy, 0);
    FAIL() << "expected EpisodeError";
  } catch (const EpisodeError& e) {
    EXPECT_EQ(e.tick(), 0);
    ASSERT_TRUE(e.span().has_value());
    EXPECT_EQ(e.span()->line, 3);
  }
}

TEST(RunRollouts, DefaultsToTenEpisodes) {
  auto report = run_rollouts(mf_test::scenario("3m_vs_3m"), mf_test::policy_file("focus_fire"));
  EXPECT_EQ(report.episodes, 10);
  EXPECT_EQ(report.outcomes.size(), 10u);
  EXPECT_EQ(report.wins + report.ties + report.losses, 10);
  for (int i = 0; i < 10; ++i) EXPECT_EQ(report.outcomes[static_cast<std::size_t>(i)].seed, static_cast<std::uint64_t>(i));
}

TEST(RunRollouts, RepeatRunsAreByteIdentical) {
  auto sc = mf_test::scenario("3m_vs_3m");
  auto policy = mf_test::policy_file("kiting");
  EXPECT_EQ(serialize(run_rollouts(sc, policy, 10, 5)), serialize(run_rollouts(sc, policy, 10, 5)));
}

TEST(RunRollouts, ParallelMatchesSequential) {
  auto sc = mf_test::scenario("3m_vs_3m");
  auto policy = mf_test::policy_file("focus_fire");
  EXPECT_EQ(serialize(run_rollouts(sc, policy, 24, 100, 1)), serialize(run_rollouts(sc, policy, 24, 100, 4)));
}

TEST(RunRollouts, ErrorTaggedWithEpisodeIndex) {
  auto policy = mf_test::policy_text("policy \"bad\" { unit marine { if 1 / (time - 0.5) > 0 { hold() } } }");
  for (int jobs : {1, 3}) {
    try {
      run_rollouts(mf_test::scenario("3m_vs_3m"), policy, 5, 0, jobs);
      FAIL() << "expected EpisodeError";
    } catch (const EpisodeError& e) {
      ASSERT_TRUE(e.episode().has_value());
      EXPECT_EQ(*e.episode(), 0);
      EXPECT_EQ(e.tick(), 4);
    }
  }
}

TEST(RunRollouts, NonPositiveEpisodesIsContractViolation) {
  EXPECT_THROW(run_rollouts(mf_test::scenario("3m_vs_3m"), mf_test::policy_file("focus_fire"), 0), ContractViolation);
}

TEST(Aggregate, WinRateFromCounts) {
  std::vector<EpisodeOutcome> outcomes(10);
  for (int i = 0; i < 4; ++i) outcomes[static_cast<std::size_t>(i)].result = Result::win;
  for (int i = 4; i < 10; ++i) outcomes[static_cast<std::size_t>(i)].result = Result::lose;
  BattleReport r = aggregate(outcomes);
  EXPECT_EQ(r.wins, 4);
  EXPECT_EQ(r.losses, 6);
  EXPECT_DOUBLE_EQ(r.win_rate, 0.4);
}

TEST(ReportText, SentenceTemplate) {
  BattleReport r;
  r.episodes = 10;
  r.wins = 4;
  r.losses = 6;
  r.mean_score = 227.5;
  r.mean_damage_dealt = 280;
  r.mean_damage_taken_health = 140.6625;
  r.mean_damage_taken_shield = 170.7625;
  r.mean_surviving_allies = 0.8;
  r.mean_surviving_enemies = 0.6;
  EXPECT_EQ(render_report_text(r),
            "You win 4 times, tie 0 times, and lose 6 times out of 10 combats.\n"
            "There are 0.8 units and 0.6 enemy units left.\n"
            "You achieve 227.5 scores, give 280 damages to the enemy, take 140.6625 damage on health, and take "
            "170.7625 damage on the shield.");
}

TEST(Conservation, DamageDealtMatchesEnemyPoolLoss) {
  auto sc = mf_test::scenario("2s_vs_1sc");
  for (const char* name : {"shield_kite", "attack_weakest", "hit_and_run"}) {
    auto report = run_rollouts(sc, mf_test::policy_file(name), 10, 0);
    for (const auto& o : report.outcomes) EXPECT_EQ(o.damage_dealt, o.enemy_pool_lost) << name << " seed " << o.seed;
  }
}

TEST(FocusFire, BeatsAttackClosest) {
  auto sc = mf_test::scenario("3m_vs_3m");
  auto focus = run_rollouts(sc, mf_test::policy_file("focus_fire"), 100, 0);
  auto closest = run_rollouts(sc, mf_test::policy_file("attack_closest"), 100, 0);
  EXPECT_GT(focus.win_rate, closest.win_rate);
}
