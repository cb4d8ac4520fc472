// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include "microforge/policy/parser.hpp"
#include "microforge/policy/printer.hpp"
#include "test_support.hpp"

using namespace microforge::policy;

TEST(PrettyPrint, CanonicalLayout) {
  PolicyAst ast = parse(
      "policy \"p\"{const K=2 unit stalker{var v=0 set v=v+1 if shield_frac<0.2{retreat_from_closest_enemy(K*2.5)}"
      "elif (1+2)*3>v{hold()}else{attack_weakest_enemy()}}}");
  EXPECT_EQ(pretty_print(ast),
            "policy \"p\" {\n"
            "  const K = 2\n"
            "  unit stalker {\n"
            "    var v = 0\n"
            "    set v = v + 1\n"
            "    if shield_frac < 0.2 {\n"
            "      retreat_from_closest_enemy(K * 2.5)\n"
            "    } elif (1 + 2) * 3 > v {\n"
            "      hold()\n"
            "    } else {\n"
            "      attack_weakest_enemy()\n"
            "    }\n"
            "  }\n"
            "}\n");
}

TEST(PrettyPrint, MinimalParentheses) {
  auto expr_of = [](const std::string& cond) {
    return print_expr(parse("policy \"p\" { unit m { if " + cond + " { hold() } } }").blocks[0].body[0].branches[0].condition);
  };
  EXPECT_EQ(expr_of("1 - (2 - 3) > 0"), "1 - (2 - 3) > 0");
  EXPECT_EQ(expr_of("(1 - 2) - 3 > 0"), "1 - 2 - 3 > 0");
  EXPECT_EQ(expr_of("-(1 + 2) > 0"), "-(1 + 2) > 0");
  EXPECT_EQ(expr_of("not (1 > 2 or 2 > 3)"), "not (1 > 2 or 2 > 3)");
  EXPECT_EQ(expr_of("(1 > 2 and 2 > 3) or 1 > 0"), "1 > 2 and 2 > 3 or 1 > 0");
  EXPECT_EQ(expr_of("1 > 2 and (2 > 3 or 1 > 0)"), "1 > 2 and (2 > 3 or 1 > 0)");
  EXPECT_EQ(expr_of("time / (2 * 3) > 0"), "time / (2 * 3) > 0");
}

TEST(PrettyPrint, EscapesPolicyName) {
  PolicyAst ast = parse("policy \"a\\\"b\\\\c\" { unit m { hold() } }");
  EXPECT_EQ(ast.name, "a\"b\\c");
  EXPECT_EQ(parse(pretty_print(ast)).name, ast.name);
}

TEST(RoundTrip, BundledPolicies) {
  for (const char* name : {"shield_kite", "hit_and_run", "kiting", "focus_fire", "attack_closest", "hold"}) {
    PolicyAst ast = parse(mf_test::read_file(mf_test::data_path(std::string("policies/") + name + ".pol")));
    std::string printed = pretty_print(ast);
    EXPECT_TRUE(same_structure(parse(printed), ast)) << name;
    EXPECT_EQ(pretty_print(parse(printed)), printed) << name;
  }
}

TEST(RoundTrip, GeneratedPolicies) {
  mf_test::PolicyGen gen(2024);
  for (int i = 0; i < 500; ++i) {
    std::string text = gen.policy(i % 2 ? "marine" : "stalker");
    PolicyAst ast = parse(text);
    std::string printed = pretty_print(ast);
    PolicyAst again = parse(printed);
    ASSERT_TRUE(same_structure(again, ast)) << text << "\n---\n" << printed;
    ASSERT_EQ(pretty_print(again), printed);
  }
}
