// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <nlohmann/json.hpp>

#include "microforge/arena/scenario.hpp"
#include "test_support.hpp"

using namespace microforge;
using namespace microforge::arena;
using nlohmann::json;

namespace {

json minimal_doc() {
  json unit = {{"name", "marine"}, {"max_health", 45}, {"attack_range", 5}, {"speed", 3.15}, {"damage", 6}, {"dps", 9.8}};
  return {
      {"name", "tiny"},
      {"map", {{"width", 10}, {"height", 10}, {"walkable_x", {0, 10}}, {"walkable_y", {0, 10}}}},
      {"allies", {{{"unit", unit}, {"pos", {1, 1}}}}},
      {"enemies", {{{"unit", unit}, {"pos", {8, 8}}}}},
      {"enemy_rally", {5, 5}},
      {"step_limit_seconds", 30},
  };
}

std::string load_error_of(const json& doc) {
  try {
    load_scenario(doc.dump());
  } catch (const LoadError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST(LoadScenario, StalkerScenarioRosterAndSpawns) {
  ScenarioSpec s = mf_test::scenario("2s_vs_1sc");
  ASSERT_EQ(s.allies.size(), 2u);
  ASSERT_EQ(s.enemies.size(), 1u);
  EXPECT_EQ(s.allies[0].unit.name, "stalker");
  EXPECT_EQ(s.allies[0].pos, (Vec2{11, 9}));
  EXPECT_EQ(s.allies[1].pos, (Vec2{17, 9}));
  EXPECT_EQ(s.enemies[0].unit.display_name, "Spine Crawler");
  EXPECT_EQ(s.enemies[0].pos, (Vec2{14, 21}));
  EXPECT_DOUBLE_EQ(s.map.walkable_x.lo, 4);
  EXPECT_DOUBLE_EQ(s.map.walkable_x.hi, 23);
}

TEST(LoadScenario, MarineScenarioRally) {
  ScenarioSpec s = mf_test::scenario("10m_vs_11m");
  EXPECT_EQ(s.enemy_rally, (Vec2{9, 16}));
  EXPECT_EQ(s.allies.size(), 10u);
  EXPECT_EQ(s.enemies.size(), 11u);
}

TEST(LoadScenario, EmptyAlliesRejected) {
  json doc = minimal_doc();
  doc["allies"] = json::array();
  EXPECT_EQ(load_error_of(doc), "allies empty");
  doc = minimal_doc();
  doc["enemies"] = json::array();
  EXPECT_EQ(load_error_of(doc), "enemies empty");
}

TEST(LoadScenario, ErrorsNameTheField) {
  json doc = minimal_doc();
  doc["map"].erase("width");
  EXPECT_NE(load_error_of(doc).find("map.width"), std::string::npos);

  doc = minimal_doc();
  doc["allies"][0]["unit"]["max_health"] = 0;
  EXPECT_NE(load_error_of(doc).find("max_health"), std::string::npos);

  doc = minimal_doc();
  doc["allies"][0]["pos"] = {20, 1};
  EXPECT_NE(load_error_of(doc).find("allies[0].pos"), std::string::npos);

  doc = minimal_doc();
  doc["step_limit_seconds"] = 0;
  EXPECT_NE(load_error_of(doc).find("step_limit_seconds"), std::string::npos);

  doc = minimal_doc();
  doc["map"]["walkable_x"] = {0, 11};
  EXPECT_NE(load_error_of(doc).find("map.walkable_x"), std::string::npos);

  EXPECT_THROW(load_scenario("{not json"), LoadError);
}

TEST(LoadScenario, DefaultsApplied) {
  json doc = minimal_doc();
  doc.erase("step_limit_seconds");
  ScenarioSpec s = load_scenario(doc.dump());
  EXPECT_DOUBLE_EQ(s.step_limit_seconds, 120.0);
  EXPECT_DOUBLE_EQ(s.spawn_jitter, 0.0);
  EXPECT_EQ(s.allies[0].unit.display_name, "Marine");
}

TEST(TaskText, StalkerScenarioSentences) {
  const std::string text = mf_test::scenario("2s_vs_1sc").task_text;
  EXPECT_NE(text.find("The Stalker unit has 80 health, 80 shield, 1 defense, 6 attacking range, 4.13 speed, 13 damage "
                      "with 9.7 DPS."),
            std::string::npos);
  EXPECT_NE(text.find("The available area of the x-axis is from 4 to 23, and the y-axis is from 7 to 30."),
            std::string::npos);
  EXPECT_NE(text.find("your units are at (11, 9) and (17, 9) points initially"), std::string::npos);
  EXPECT_NE(text.find("There are no terrain advantages or choke points in this map."), std::string::npos);
  EXPECT_EQ(text.find("move and attack"), std::string::npos);
}

TEST(TaskText, RallyAndTerrain) {
  EXPECT_NE(mf_test::scenario("10m_vs_11m").task_text.find("move and attack (9, 16) points"), std::string::npos);
  const std::string standoff = mf_test::scenario("standoff").task_text;
  EXPECT_NE(standoff.find("cliff"), std::string::npos);
  EXPECT_NE(standoff.find("(20, 4) and (20, 15)"), std::string::npos);
}
