// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "microforge/llm/backend.hpp"
#include "microforge/llm/templates.hpp"
#include "mock_llm_server.hpp"
#include "test_support.hpp"

using namespace microforge;
using namespace microforge::llm;

namespace {

std::filesystem::path temp_file(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / "microforge_test_llm";
  std::filesystem::create_directories(dir);
  return dir / name;
}

llm::TemplateSet shipped() { return TemplateSet::load(MICROFORGE_TEMPLATE_DIR); }

ChatRequest request(const std::string& user) {
  return ChatRequest{"m", {{"system", "sys"}, {"user", user}}, 0.7};
}

HttpConfig mock_config(const mf_test::MockLlmServer& server) {
  HttpConfig config;
  config.base_url = server.base_url();
  config.api_key = "secret";
  config.initial_backoff = std::chrono::milliseconds(0);
  config.timeout = std::chrono::seconds(5);
  return config;
}

}  // namespace

TEST(Templates, ShippedSetLoadsEveryId) {
  const auto set = shipped();
  for (const auto& id : template_ids()) EXPECT_TRUE(set.contains(id)) << id;
}

TEST(Templates, MissingTaskInformationNamesThePlaceholder) {
  const auto set = shipped();
  try {
    render_prompt(set, "planner.system", {});
    FAIL() << "expected RenderError";
  } catch (const RenderError& e) {
    EXPECT_EQ(e.placeholder(), "TASK INFORMATION");
  }
}

TEST(Templates, PlaceholderFreeTemplateIsVerbatim) {
  const auto set = shipped();
  const auto messages = render_prompt(set, "coder.system", {});
  ASSERT_EQ(messages.size(), 1u);
  EXPECT_EQ(messages[0].role, "system");
  EXPECT_EQ(messages[0].content, set.get("coder.system").text);
}

TEST(Templates, GroupRendersSystemThenUser) {
  const auto set = shipped();
  const auto messages = render_prompt(set, "critic", {{"TASK INFORMATION", "T"}, {"CODE", "C"}, {"RESULT", "R"}});
  ASSERT_EQ(messages.size(), 2u);
  EXPECT_EQ(messages[0].role, "system");
  EXPECT_EQ(messages[1].role, "user");
  EXPECT_NE(messages[1].content.find("C\nThe result is:\nR"), std::string::npos);
}

TEST(Templates, UnknownPlaceholderRejectedAtLoad) {
  EXPECT_THROW(PromptTemplate::from_text("x.user", "hello {{NOPE}}"), LoadError);
}

TEST(Templates, RenderingIsInjectiveInEachBinding) {
  const auto tmpl = PromptTemplate::from_text("t.user", "a {{CODE}} b {{RESULT}} c");
  std::set<std::string> seen;
  for (const auto& code : {"x", "y", "xy", ""}) {
    for (const auto& result : {"1", "2", "12"}) {
      seen.insert(render(tmpl, {{"CODE", code}, {"RESULT", result}}));
    }
  }
  EXPECT_EQ(seen.size(), 12u);
}

TEST(Digest, DependsOnMessagesOnly) {
  auto a = request("hi");
  auto b = a;
  b.temperature = 0.2;
  b.model = "other";
  EXPECT_EQ(request_digest(a.messages), request_digest(b.messages));
  EXPECT_NE(request_digest(a.messages), request_digest(request("hi!").messages));
  EXPECT_EQ(request_digest(a.messages).size(), 64u);
}

TEST(Digest, RoleAndContentBoundariesMatter) {
  const std::vector<ChatMessage> a{{"system", "ab"}, {"user", "c"}};
  const std::vector<ChatMessage> b{{"system", "a"}, {"user", "bc"}};
  EXPECT_NE(request_digest(a), request_digest(b));
}

TEST(Replay, ServesInOrderThenExhausts) {
  Transcript t{{{request_digest(request("one").messages), "r1"}, {request_digest(request("two").messages), "r2"}}};
  ReplayBackend replay(t);
  EXPECT_EQ(replay.complete(request("one")), "r1");
  EXPECT_EQ(replay.complete(request("two")), "r2");
  EXPECT_THROW(replay.complete(request("three")), ReplayExhausted);
}

TEST(Replay, StrictMismatchThrowsWarnModeRecords) {
  Transcript t{{{request_digest(request("one").messages), "r1"}}};
  ReplayBackend strict(t);
  try {
    strict.complete(request("other"));
    FAIL() << "expected ReplayMismatch";
  } catch (const ReplayMismatch& e) {
    EXPECT_EQ(e.index(), 0u);
  }
  ReplayBackend warn(t, MismatchPolicy::warn);
  EXPECT_EQ(warn.complete(request("other")), "r1");
  EXPECT_EQ(warn.warnings().size(), 1u);
}

TEST(Record, TranscriptGrowsByOnePerCall) {
  const auto path = temp_file("record.jsonl");
  auto inner = std::make_shared<ScriptedBackend>(std::vector<std::string>{"a", "b", "c"});
  RecordBackend rec(inner, path);
  for (int i = 0; i < 3; ++i) {
    rec.complete(request("q" + std::to_string(i)));
    EXPECT_EQ(load_transcript(path).records.size(), static_cast<std::size_t>(i + 1));
  }
  const auto t = load_transcript(path);
  EXPECT_EQ(t.records[1].response, "b");
  EXPECT_EQ(t.records[1].digest, request_digest(request("q1").messages));
}

TEST(Transcript, EmptyFileHasNoRecords) {
  const auto path = temp_file("empty.jsonl");
  std::ofstream(path).close();
  EXPECT_TRUE(load_transcript(path).records.empty());
}

TEST(Transcript, TruncatedRecordReportsLine) {
  const auto path = temp_file("truncated.jsonl");
  {
    std::ofstream out(path);
    out << to_jsonl({"d1", "ok"}) << "{\"digest\": \"d2\", \"resp";
  }
  try {
    load_transcript(path);
    FAIL() << "expected LoadError";
  } catch (const LoadError& e) {
    ASSERT_TRUE(e.line().has_value());
    EXPECT_EQ(*e.line(), 2);
  }
}

TEST(Request, ValidateRequiresLeadingSystemMessage) {
  ChatRequest bad{"m", {{"user", "hi"}}, 0.7};
  EXPECT_THROW(bad.validate(), ContractViolation);
  ChatRequest empty{"m", {{"system", "s"}, {"user", ""}}, 0.7};
  EXPECT_THROW(empty.validate(), ContractViolation);
}

TEST(MakeBackend, RejectsUnknownSelector) {
  EXPECT_THROW(make_backend("carrier-pigeon", HttpConfig{}), ContractViolation);
}

TEST(Http, SendsChatCompletionWithBearerKey) {
  mf_test::MockLlmServer server({"hello back"});
  HttpBackend http(mock_config(server));
  EXPECT_EQ(http.complete(request("hello")), "hello back");
  const auto bodies = server.bodies();
  ASSERT_EQ(bodies.size(), 1u);
  EXPECT_EQ(bodies[0]["messages"][1]["content"], "hello");
  EXPECT_DOUBLE_EQ(bodies[0]["temperature"].get<double>(), 0.7);
  EXPECT_EQ(server.auth_headers()[0], "Bearer secret");
}

TEST(Http, RetriesServerErrorsThenSucceeds) {
  mf_test::MockLlmServer server({"finally"});
  server.fail_next(503, 2);
  HttpBackend http(mock_config(server));
  EXPECT_EQ(http.complete(request("x")), "finally");
  EXPECT_EQ(server.request_count(), 3u);
}

TEST(Http, GivesUpAfterThreeAttempts) {
  mf_test::MockLlmServer server({"never"});
  server.fail_next(429, 3);
  HttpBackend http(mock_config(server));
  EXPECT_THROW(http.complete(request("x")), BackendError);
  EXPECT_EQ(server.request_count(), 3u);
}

TEST(Http, ClientErrorIsNotRetried) {
  mf_test::MockLlmServer server({"never"});
  server.fail_next(401);
  HttpBackend http(mock_config(server));
  EXPECT_THROW(http.complete(request("x")), BackendError);
  EXPECT_EQ(server.request_count(), 1u);
}
