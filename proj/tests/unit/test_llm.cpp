#include <gtest/gtest.h>

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <random>
#include <thread>

#include <httplib.h>

#include "rai/llm/hash_embedder.hpp"
#include "rai/llm/http_provider.hpp"
#include "rai/llm/message.hpp"
#include "rai/llm/scripted.hpp"
#include "support/oracles.hpp"

using namespace rai::llm;
using nlohmann::json;
using rai::toolkit::ParamType;
using rai::toolkit::ToolSpec;
using rai::testing::oracle_cosine;
using rai::testing::oracle_embed;

namespace {

double norm(const EmbeddingVector& v) {
  double s = 0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

std::vector<ToolSpec> distance_tools() {
  return {{"get_distance_to_objects", "measure", {{"object_names", ParamType::kTextList, true, ""}}}};
}

}  // namespace

TEST(Fnv1a, KnownVectors) {
  EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ull);
  EXPECT_EQ(fnv1a64("a"), 0xaf63dc4c8601ec8cull);
  EXPECT_EQ(fnv1a64("foobar"), 0x85944171f73967e8ull);
}

TEST(HashEmbedder, EmptyTextIsE0) {
  const auto v = hash_embed("");
  ASSERT_EQ(v.size(), kDefaultEmbeddingDim);
  EXPECT_EQ(v[0], 1.0);
  for (std::size_t i = 1; i < v.size(); ++i) EXPECT_EQ(v[i], 0.0);
}

TEST(HashEmbedder, RepetitionCancelsUnderNormalization) { EXPECT_EQ(hash_embed("chair chair"), hash_embed("chair")); }

TEST(HashEmbedder, CosineMatchesOracle) {
  const double got = cosine(hash_embed("red cube"), hash_embed("red cube on table"));
  const double want = oracle_cosine(oracle_embed("red cube", 64), oracle_embed("red cube on table", 64));
  EXPECT_NEAR(got, want, 1e-12);
}

TEST(HashEmbedder, EmbedContract) {
  HashEmbedder e;
  const auto same = e.embed({"a", "a"});
  ASSERT_EQ(same.size(), 2u);
  EXPECT_EQ(same[0], same[1]);
  const auto ab = e.embed({"a", "b"});
  EXPECT_LT(cosine(ab[0], ab[1]), 1.0);
  EXPECT_NEAR(cosine(ab[0], ab[1]), oracle_cosine(oracle_embed("a", 64), oracle_embed("b", 64)), 1e-12);
}

TEST(HashEmbedderProperty, MatchesOracleAndUnitNorm) {
  std::mt19937_64 rng(21);
  const char* words[] = {"Red", "cube", "on", "the", "TABLE", "7", "x9", "tractor", "", "!!", "crate"};
  for (int i = 0; i < 500; ++i) {
    std::string text;
    for (int n = static_cast<int>(rng() % 8); n > 0; --n) {
      text += words[rng() % 11];
      text += (rng() % 3 == 0) ? ", " : " ";
    }
    const std::size_t dim = 1 + rng() % 100;
    const auto v = hash_embed(text, dim);
    const auto o = oracle_embed(text, dim);
    ASSERT_EQ(v.size(), dim);
    for (std::size_t k = 0; k < dim; ++k) ASSERT_NEAR(v[k], o[k], 1e-12) << text;
    ASSERT_NEAR(norm(v), 1.0, 1e-9);
  }
}

TEST(HashEmbedderProperty, TokenOrderNeverMatters) {
  std::mt19937_64 rng(8);
  std::vector<std::string> words{"alpha", "beta", "gamma", "beta", "delta", "9", "epsilon"};
  for (int i = 0; i < 100; ++i) {
    std::shuffle(words.begin(), words.end(), rng);
    std::string a, b;
    for (const auto& w : words) a += w + " ";
    auto copy = words;
    std::shuffle(copy.begin(), copy.end(), rng);
    for (const auto& w : copy) b += w + "-";
    ASSERT_EQ(hash_embed(a), hash_embed(b));
  }
}

TEST(ScriptedProvider, EchoesFixtureInOrder) {
  ScriptedProvider p(ScriptedProvider::parse(json::parse(R"([
    {"reply": {"tool_calls": [{"name": "get_distance_to_objects", "arguments": {"object_names": ["chair"]}}]}},
    {"reply": {"text": "hello"}}
  ])")));
  const std::vector<ChatMessage> conv{ChatMessage::user("hi")};
  const auto first = p.complete(conv, distance_tools(), {});
  ASSERT_FALSE(first.is_final());
  ASSERT_EQ(first.tool_calls.size(), 1u);
  EXPECT_EQ(first.tool_calls[0].name, "get_distance_to_objects");
  EXPECT_EQ(first.tool_calls[0].arguments, json({{"object_names", {"chair"}}}));
  const auto second = p.complete(conv, distance_tools(), {});
  EXPECT_EQ(second.final_text, "hello");
  EXPECT_THROW(p.complete(conv, distance_tools(), {}), ScriptExhausted);
  EXPECT_EQ(p.calls(), 3u);
}

TEST(ScriptedProvider, PredicateSkipsUntilPresent) {
  ScriptedProvider p(ScriptedProvider::parse(json::parse(R"([
    {"when": {"contains": "branch"}, "reply": {"text": "drive on"}},
    {"reply": {"text": "generic"}}
  ])")));
  EXPECT_EQ(p.complete({ChatMessage::user("a rock ahead")}, {}, {}).final_text, "generic");
  EXPECT_EQ(p.remaining(), 1u);
  EXPECT_EQ(p.complete({ChatMessage::user("a branch ahead")}, {}, {}).final_text, "drive on");
  EXPECT_EQ(p.remaining(), 0u);
}

TEST(ScriptedProvider, PredicateSeesImageMarkers) {
  ScriptedProvider p(ScriptedProvider::parse(json::parse(R"([
    {"when": {"contains": "[image:tractor_image]"}, "reply": {"text": "seen"}}
  ])")));
  auto msg = ChatMessage::user("look");
  msg.parts.push_back(rai::toolkit::ContentPart::make_image("tractor_image"));
  EXPECT_EQ(p.complete({msg}, {}, {}).final_text, "seen");
}

TEST(ScriptedProvider, UnofferedToolIsMalformed) {
  ScriptedProvider p(ScriptedProvider::parse(json::parse(R"([{"reply": {"tool_calls": [{"name": "fly", "arguments": {}}]}}])")));
  EXPECT_THROW(p.complete({ChatMessage::user("x")}, distance_tools(), {}), MalformedReply);
}

TEST(ScriptedProvider, BadFixtureRejected) {
  EXPECT_THROW(ScriptedProvider::parse(json::object()), std::invalid_argument);
  EXPECT_THROW(ScriptedProvider::parse(json::parse(R"([{"reply": {}}])")), std::invalid_argument);
}

TEST(RecordingProvider, ReplayGivesSameReplies) {
  ScriptedProvider inner(ScriptedProvider::parse(json::parse(R"([{"reply": {"text": "one"}}, {"reply": {"text": "two"}}])")));
  RecordingProvider rec(inner);
  rec.complete({ChatMessage::user("x")}, {}, {});
  rec.complete({ChatMessage::user("y")}, {}, {});
  ScriptedProvider replay(ScriptedProvider::parse(rec.fixture()));
  EXPECT_EQ(replay.complete({ChatMessage::user("z")}, {}, {}).final_text, "one");
  EXPECT_EQ(replay.complete({ChatMessage::user("z")}, {}, {}).final_text, "two");
}

TEST(CheckRequest, FirstMessageRule) {
  EXPECT_THROW(check_request({}), std::invalid_argument);
  EXPECT_THROW(check_request({ChatMessage::assistant("hi")}), std::invalid_argument);
  EXPECT_NO_THROW(check_request({ChatMessage::system("s"), ChatMessage::user("u")}));
}

TEST(CheckConversation, Invariants) {
  rai::toolkit::ToolCall call{"c1", "get_distance_to_objects", json::object()};
  std::vector<ChatMessage> ok{ChatMessage::user("u"), ChatMessage::assistant_calls({call}),
                              ChatMessage::tool(rai::toolkit::ToolOutcome::success("c1", "r"))};
  EXPECT_FALSE(check_conversation(ok));
  std::vector<ChatMessage> orphan{ChatMessage::user("u"),
                                  ChatMessage::tool(rai::toolkit::ToolOutcome::success("c9", "r"))};
  EXPECT_TRUE(check_conversation(orphan));
  auto bad = ChatMessage::assistant("a");
  bad.parts.push_back(rai::toolkit::ContentPart::make_image("img"));
  EXPECT_TRUE(check_conversation({ChatMessage::user("u"), bad}));
}

TEST(MessageJson, RoundTrip) {
  rai::toolkit::ToolCall call{"c1", "get_distance_to_objects", json{{"object_names", {"chair"}}}};
  auto user = ChatMessage::user("look");
  user.parts.push_back(rai::toolkit::ContentPart::make_image("self"));
  for (const auto& m : {ChatMessage::system("s"), user, ChatMessage::assistant_calls({call}),
                        ChatMessage::tool(rai::toolkit::ToolOutcome::error("c1", "bad"))}) {
    EXPECT_EQ(message_from_json(to_json(m)), m);
  }
  EXPECT_EQ(reply_from_json(to_json(ModelReply::text("t"))), ModelReply::text("t"));
}

TEST(Base64, Rfc4648Vectors) {
  EXPECT_EQ(base64_encode(""), "");
  EXPECT_EQ(base64_encode("f"), "Zg==");
  EXPECT_EQ(base64_encode("fo"), "Zm8=");
  EXPECT_EQ(base64_encode("foobar"), "Zm9vYmFy");
}

TEST(HttpConfig, FromEnv) {
  ::unsetenv("RAI_LLM_BASE_URL");
  EXPECT_THROW(HttpConfig::from_env(), std::invalid_argument);
  ::setenv("RAI_LLM_BASE_URL", "http://localhost:9", 1);
  ::setenv("RAI_LLM_API_KEY", "k", 1);
  const auto c = HttpConfig::from_env();
  EXPECT_EQ(c.base_url, "http://localhost:9");
  EXPECT_EQ(c.api_key, "k");
  ::unsetenv("RAI_LLM_BASE_URL");
  ::unsetenv("RAI_LLM_API_KEY");
}

TEST(HttpProvider, RequestBodyShape) {
  HttpConfig c;
  c.base_url = "http://localhost:1";
  HttpProvider p(c, [](const std::string& id) -> std::optional<ImageData> {
    if (id == "self") return ImageData{"image/png", "PNG"};
    return std::nullopt;
  });
  auto user = ChatMessage::user("what am I?");
  user.parts.push_back(rai::toolkit::ContentPart::make_image("self"));
  CompletionParams params;
  params.model = "m";
  const auto body = p.request_body({ChatMessage::system("sys"), user}, distance_tools(), params);
  EXPECT_EQ(body["model"], "m");
  EXPECT_EQ(body["tool_choice"], "auto");
  EXPECT_EQ(body["tools"][0]["type"], "function");
  EXPECT_EQ(body["tools"][0]["function"]["name"], "get_distance_to_objects");
  EXPECT_EQ(body["messages"][0]["role"], "system");
  const auto& parts = body["messages"][1]["content"];
  ASSERT_EQ(parts.size(), 2u);
  EXPECT_EQ(parts[1]["image_url"]["url"], "data:image/png;base64," + base64_encode("PNG"));
}

TEST(HttpProvider, ParseResponse) {
  const auto reply = HttpProvider::parse_response(json::parse(R"({"choices": [{"message": {"role": "assistant",
    "content": null, "tool_calls": [{"id": "call_1", "type": "function", "function": {
    "name": "get_distance_to_objects", "arguments": "{\"object_names\": [\"chair\"]}"}}]}}]})"),
                                                  distance_tools());
  ASSERT_EQ(reply.tool_calls.size(), 1u);
  EXPECT_EQ(reply.tool_calls[0].id, "call_1");
  EXPECT_EQ(reply.tool_calls[0].arguments, json({{"object_names", {"chair"}}}));
  EXPECT_THROW(HttpProvider::parse_response(json::object(), {}), MalformedReply);
}

namespace {

struct MockServer {
  httplib::Server server;
  std::thread thread;
  int port = 0;

  MockServer() { port = server.bind_to_any_port("127.0.0.1"); }
  void start() {
    thread = std::thread([this] { server.listen_after_bind(); });
    server.wait_until_ready();
  }
  ~MockServer() {
    server.stop();
    if (thread.joinable()) thread.join();
  }
  HttpConfig config() const {
    HttpConfig c;
    c.base_url = "http://127.0.0.1:" + std::to_string(port);
    c.api_key = "secret";
    c.backoff_base_ms = 1;
    c.timeout_s = 5;
    return c;
  }
};

const char* kFinalReply = R"({"choices": [{"message": {"role": "assistant", "content": "hello"}}]})";

}  // namespace

TEST(HttpProviderLive, RetriesOn5xxThenSucceeds) {
  MockServer mock;
  std::atomic<int> hits{0};
  std::string auth;
  mock.server.Post("/v1/chat/completions", [&](const httplib::Request& req, httplib::Response& res) {
    auth = req.get_header_value("Authorization");
    if (++hits < 3) {
      res.status = 503;
      return;
    }
    res.set_content(kFinalReply, "application/json");
  });
  mock.start();
  HttpProvider p(mock.config());
  EXPECT_EQ(p.complete({ChatMessage::user("hi")}, {}, {}).final_text, "hello");
  EXPECT_EQ(hits.load(), 3);
  EXPECT_EQ(auth, "Bearer secret");
}

TEST(HttpProviderLive, GivesUpAfterTwoRetries) {
  MockServer mock;
  std::atomic<int> hits{0};
  mock.server.Post("/v1/chat/completions", [&](const httplib::Request&, httplib::Response& res) {
    ++hits;
    res.status = 429;
  });
  mock.start();
  HttpProvider p(mock.config());
  try {
    p.complete({ChatMessage::user("hi")}, {}, {});
    FAIL() << "expected ProviderError";
  } catch (const ProviderError& e) {
    EXPECT_EQ(e.status(), 429);
    EXPECT_EQ(e.attempts(), 3);
    EXPECT_TRUE(e.retryable());
  }
  EXPECT_EQ(hits.load(), 3);
}

TEST(HttpProviderLive, ClientErrorNotRetried) {
  MockServer mock;
  std::atomic<int> hits{0};
  mock.server.Post("/v1/chat/completions", [&](const httplib::Request&, httplib::Response& res) {
    ++hits;
    res.status = 400;
  });
  mock.start();
  HttpProvider p(mock.config());
  try {
    p.complete({ChatMessage::user("hi")}, {}, {});
    FAIL() << "expected ProviderError";
  } catch (const ProviderError& e) {
    EXPECT_EQ(e.status(), 400);
    EXPECT_FALSE(e.retryable());
  }
  EXPECT_EQ(hits.load(), 1);
}

TEST(HttpProviderLive, GarbageBodyIsMalformed) {
  MockServer mock;
  mock.server.Post("/v1/chat/completions",
                   [&](const httplib::Request&, httplib::Response& res) { res.set_content("not json", "text/plain"); });
  mock.start();
  HttpProvider p(mock.config());
  EXPECT_THROW(p.complete({ChatMessage::user("hi")}, {}, {}), MalformedReply);
}

TEST(HttpProviderLive, NoServerIsStatusZero) {
  int port;
  {
    MockServer probe;
    port = probe.port;
  }
  HttpConfig c;
  c.base_url = "http://127.0.0.1:" + std::to_string(port);
  c.backoff_base_ms = 1;
  c.timeout_s = 1;
  HttpProvider p(c);
  try {
    p.complete({ChatMessage::user("hi")}, {}, {});
    FAIL() << "expected ProviderError";
  } catch (const ProviderError& e) {
    EXPECT_EQ(e.status(), 0);
  }
}

TEST(HttpEmbedderLive, OrdersByIndex) {
  MockServer mock;
  mock.server.Post("/v1/embeddings", [&](const httplib::Request&, httplib::Response& res) {
    res.set_content(R"({"data": [{"index": 1, "embedding": [0, 1]}, {"index": 0, "embedding": [1, 0]}]})",
                    "application/json");
  });
  mock.start();
  HttpEmbedder e(mock.config(), "embed-model", 2);
  const auto v = e.embed({"a", "b"});
  ASSERT_EQ(v.size(), 2u);
  EXPECT_EQ(v[0], (EmbeddingVector{1, 0}));
  EXPECT_EQ(v[1], (EmbeddingVector{0, 1}));
}
