// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <algorithm>
#include <functional>

#include "microforge/arena/rollout.hpp"
#include "microforge/policy/clone.hpp"
#include "microforge/policy/compile.hpp"
#include "microforge/policy/lexer.hpp"
#include "microforge/policy/parser.hpp"
#include "microforge/policy/printer.hpp"
#include "test_support.hpp"

using namespace microforge;
using namespace microforge::policy;

namespace {

// Exponential reference LCS over small streams, memoised on index pairs.
std::size_t lcs_oracle(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  std::vector<std::vector<long>> memo(a.size() + 1, std::vector<long>(b.size() + 1, -1));
  std::function<long(std::size_t, std::size_t)> go = [&](std::size_t i, std::size_t j) -> long {
    if (i == a.size() || j == b.size()) return 0;
    long& m = memo[i][j];
    if (m >= 0) return m;
    if (a[i] == b[j]) return m = 1 + go(i + 1, j + 1);
    return m = std::max(go(i + 1, j), go(i, j + 1));
  };
  return static_cast<std::size_t>(go(0, 0));
}

NormalizedAst norm_file(const std::string& name) {
  return normalize(parse(mf_test::read_file(mf_test::data_path("policies/" + name + ".pol"))));
}

const char* kKite =
    "policy \"kite\" {\n  const RETREAT_DIST = 3\n  const KITE_DIST = 2\n  unit marine {\n    var mode = 0\n"
    "    if weapon_cooldown > 0 { retreat_from_closest_enemy(KITE_DIST) } else { attack_closest_enemy() }\n  }\n}\n";
const char* kKiteRenamed =
    "# reformatted and renamed\npolicy \"other\"{const A=3 const B=2\nunit marine{var zz=0\nif weapon_cooldown>0{"
    "retreat_from_closest_enemy(B)}\nelse{attack_closest_enemy()}}}";

}  // namespace

TEST(Normalize, RenamesInDeclarationOrder) {
  NormalizedAst n = normalize(parse(kKite));
  EXPECT_EQ(n.ast.name, "P");
  EXPECT_EQ(n.ast.consts[0].name, "C0");
  EXPECT_EQ(n.ast.consts[1].name, "C1");
  EXPECT_EQ(n.ast.blocks[0].vars[0].name, "V0");
  EXPECT_EQ(n.ast.blocks[0].body[0].branches[0].body[0].args[0].name, "C1");
  std::vector<std::string> expected;
  for (const Token& t : tokenize(pretty_print(n.ast))) {
    if (t.kind != TokenKind::end) expected.push_back(t.kind == TokenKind::string ? "\"" + t.text + "\"" : t.text);
  }
  EXPECT_EQ(n.tokens, expected);
  EXPECT_EQ(n.tokens.front(), "policy");
  EXPECT_EQ(n.tokens[1], "\"P\"");
}

TEST(Normalize, Idempotent) {
  mf_test::PolicyGen gen(5);
  for (int i = 0; i < 200; ++i) {
    NormalizedAst once = normalize(parse(gen.policy("marine")));
    NormalizedAst twice = normalize(once.ast);
    ASSERT_TRUE(same_structure(once.ast, twice.ast));
    ASSERT_EQ(once.tokens, twice.tokens);
  }
}

TEST(Normalize, RenamedCloneHasIdenticalStream) {
  EXPECT_EQ(normalize(parse(kKite)).tokens, normalize(parse(kKiteRenamed)).tokens);
}

TEST(Normalize, PreservesBehaviour) {
  mf_test::PolicyGen gen(77);
  auto sc = mf_test::scenario("3m_vs_3m");
  for (int i = 0; i < 40; ++i) {
    PolicyAst ast = parse(gen.policy("marine"));
    auto a = arena::run_rollouts(sc, compile(ast), 3, static_cast<std::uint64_t>(i));
    auto b = arena::run_rollouts(sc, compile(normalize(ast).ast), 3, static_cast<std::uint64_t>(i));
    ASSERT_EQ(arena::serialize(a), arena::serialize(b));
  }
}

TEST(Similarity, IdentityAndClone) {
  NormalizedAst a = normalize(parse(kKite));
  EXPECT_DOUBLE_EQ(similarity(a, a), 100.0);
  EXPECT_DOUBLE_EQ(similarity(a, normalize(parse(kKiteRenamed))), 100.0);
}

TEST(Similarity, BundledPairMatchesOracle) {
  NormalizedAst a = norm_file("focus_fire");
  NormalizedAst b = norm_file("kiting");
  std::size_t l = lcs_oracle(a.tokens, b.tokens);
  EXPECT_EQ(lcs_length(a.tokens, b.tokens), l);
  EXPECT_DOUBLE_EQ(similarity(a, b), 100.0 * 2.0 * static_cast<double>(l) / static_cast<double>(a.tokens.size() + b.tokens.size()));
  EXPECT_LT(similarity(a, b), 90.0);
}

TEST(Similarity, SymmetricBoundedAndMatchesOracle) {
  mf_test::PolicyGen gen(99);
  for (int i = 0; i < 100; ++i) {
    NormalizedAst a = normalize(parse(gen.policy("marine")));
    NormalizedAst b = normalize(parse(gen.policy("marine")));
    double ab = similarity(a, b);
    ASSERT_DOUBLE_EQ(ab, similarity(b, a));
    ASSERT_GE(ab, 0.0);
    ASSERT_LE(ab, 100.0);
    ASSERT_EQ(ab == 100.0, a.tokens == b.tokens);
    ASSERT_EQ(lcs_length(a.tokens, b.tokens), lcs_oracle(a.tokens, b.tokens));
  }
  std::vector<std::string> empty;
  EXPECT_DOUBLE_EQ(similarity(empty, empty), 100.0);
}

TEST(Dedup, SingletonKept) {
  std::vector<PolicySource> corpus = {{"only", kKite, Origin::handwritten}};
  DedupResult r = dedup(corpus, 90);
  ASSERT_EQ(r.kept.size(), 1u);
  EXPECT_TRUE(r.dropped.empty());
}

TEST(Dedup, CloneClusterCollapses) {
  std::vector<PolicySource> corpus;
  for (int i = 0; i < 5; ++i) {
    std::string text = kKite;
    text.replace(text.find("kite"), 4, "kite" + std::to_string(i));
    std::string from = "RETREAT_DIST";
    for (std::size_t p; (p = text.find(from)) != std::string::npos;) text.replace(p, from.size(), "R" + std::to_string(i));
    corpus.push_back({"copy" + std::to_string(i), text, Origin::augmented});
  }
  DedupResult r = dedup(corpus, 90);
  ASSERT_EQ(r.kept.size(), 1u);
  EXPECT_EQ(r.kept[0].id, "copy0");
  ASSERT_EQ(r.dropped.size(), 4u);
  for (const DedupDrop& d : r.dropped) {
    EXPECT_EQ(d.kept, "copy0");
    EXPECT_DOUBLE_EQ(*d.similarity, 100.0);
    EXPECT_EQ(d.reason, "duplicate");
  }
}

TEST(Dedup, UnrelatedPoliciesBothKept) {
  std::vector<PolicySource> corpus = {
      {"focus", mf_test::read_file(mf_test::data_path("policies/focus_fire.pol")), Origin::handwritten},
      {"kite", mf_test::read_file(mf_test::data_path("policies/kiting.pol")), Origin::handwritten}};
  EXPECT_EQ(dedup(corpus, 90).kept.size(), 2u);
}

TEST(Dedup, ParseFailureRecordedNotFatal) {
  std::vector<PolicySource> corpus = {{"bad", "policy {", Origin::llm}, {"good", kKite, Origin::llm}};
  DedupResult r = dedup(corpus, 90);
  ASSERT_EQ(r.kept.size(), 1u);
  ASSERT_EQ(r.dropped.size(), 1u);
  EXPECT_EQ(r.dropped[0].dropped, "bad");
  EXPECT_EQ(r.dropped[0].reason, "parse-failure");
  EXPECT_FALSE(r.dropped[0].kept.has_value());
  nlohmann::json j = to_json(r);
  EXPECT_TRUE(j[0]["kept"].is_null());
}

TEST(Dedup, ThresholdContract) {
  std::vector<PolicySource> corpus = {{"a", kKite, Origin::llm}};
  EXPECT_THROW(dedup(corpus, 0), ContractViolation);
  EXPECT_THROW(dedup(corpus, 100.5), ContractViolation);
  EXPECT_NO_THROW(dedup(corpus, 100));
}

TEST(Dedup, PartitionAndOrderStable) {
  mf_test::PolicyGen gen(3);
  std::vector<PolicySource> corpus;
  for (int i = 0; i < 30; ++i) corpus.push_back({"g" + std::to_string(i), gen.policy("marine"), Origin::augmented});
  corpus.push_back({"dup", corpus[4].text, Origin::augmented});
  DedupResult r = dedup(corpus, 90);
  EXPECT_EQ(r.kept.size() + r.dropped.size(), corpus.size());
  EXPECT_EQ(to_json(dedup(corpus, 90)), to_json(r));
  for (std::size_t i = 1; i < r.kept.size(); ++i) {
    auto pos = [&](const std::string& id) {
      return std::find_if(corpus.begin(), corpus.end(), [&](const PolicySource& s) { return s.id == id; }) - corpus.begin();
    };
    EXPECT_LT(pos(r.kept[i - 1].id), pos(r.kept[i].id));
  }
  EXPECT_TRUE(std::any_of(r.dropped.begin(), r.dropped.end(), [](const DedupDrop& d) { return d.dropped == "dup"; }));
}
