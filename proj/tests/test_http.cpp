#include "doctest.h"

#include <atomic>
#include <cstdlib>
#include <thread>

#include "graphsos/errors.hpp"
#include "graphsos/ssm.hpp"
#include "graphsos/tuning_data.hpp"
#include "httplib.h"
#include "json.hpp"

using namespace graphsos;
using nlohmann::json;

namespace {

class LocalServer {
 public:
  LocalServer() {
    server_.Post("/score", [this](const httplib::Request& req, httplib::Response& res) {
      last_auth = req.get_header_value("Authorization");
      const auto body = json::parse(req.body);
      const double l1 = body.at("text").get<std::string>().find("Edge List") != std::string::npos ? std::log(3.0) : 0.0;
      res.set_content(json{{"logits", {0.0, l1}}}.dump(), "application/json");
    });
    server_.Post("/llm", [](const httplib::Request& req, httplib::Response& res) {
      const auto body = json::parse(req.body);
      if (body.contains("target")) {
        res.set_content(json{{"nll", 1.25}}.dump(), "application/json");
      } else {
        const auto& msg = body.at("messages").at(0).at("content");
        res.set_content(json{{"choices", {{{"message", {{"role", "assistant"}, {"content", "echo " + msg.get<std::string>()}}}}}}}.dump(),
                        "application/json");
      }
    });
    server_.Post("/flaky", [this](const httplib::Request& req, httplib::Response& res) {
      if (++flaky_calls <= 2) {
        res.status = 503;
        return;
      }
      last_body = json::parse(req.body);
      res.set_content(json{{"choices", {{{"message", {{"content", "Analysis: a Reasoning: b Answer: c"}}}}}}}.dump(),
                      "application/json");
    });
    server_.Post("/broken", [](const httplib::Request&, httplib::Response& res) {
      res.set_content("not json", "text/plain");
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~LocalServer() {
    server_.stop();
    thread_.join();
  }
  std::string url(const std::string& path) const { return "http://127.0.0.1:" + std::to_string(port_) + path; }

  std::string last_auth;
  json last_body;
  std::atomic<int> flaky_calls{0};

 private:
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

const RetryPolicy kFast{3, std::chrono::milliseconds(1)};

}  // namespace

TEST_CASE("http scoring oracle") {
  LocalServer server;
  ::setenv("GRAPHSOS_BACKEND_TOKEN", "s3cret", 1);
  auto oracle = make_scoring_oracle("http:" + server.url("/score"), {});
  TextGraph g({{0, "a", {}}, {1, "b", {}}}, {{0, 1}});
  CHECK(std::abs(score_subgraph(render_subgraph(g), *oracle).p1 - 0.75) < 1e-12);
  CHECK(server.last_auth == "Bearer s3cret");
  ::unsetenv("GRAPHSOS_BACKEND_TOKEN");
  HttpScoringOracle plain(server.url("/score"), kFast);
  plain.score(render_subgraph(g));
  CHECK(server.last_auth.empty());

  HttpScoringOracle broken(server.url("/broken"), kFast);
  CHECK_THROWS_AS(broken.score(render_subgraph(g)), TransportError);
}

TEST_CASE("http llm backend") {
  LocalServer server;
  auto llm = make_llm_backend(server.url("/llm"), kFast);
  CHECK(llm->nll({"prompt", "target"}) == 1.25);
  CHECK(llm->answer({"what?", "gold"}) == "echo what?");
  CHECK_FALSE(llm->is_mock());
}

TEST_CASE("http retries and transport errors") {
  LocalServer server;
  HttpChatEndpoint chat(server.url("/flaky"), kFast);
  CHECK(chat.complete({{{"user", "hi"}}, 0.9, 512}) == "Analysis: a Reasoning: b Answer: c");
  CHECK(server.flaky_calls == 3);
  CHECK(server.last_body["temperature"] == 0.9);
  CHECK(server.last_body["max_tokens"] == 512);

  try {
    post_json("http://127.0.0.1:1/none", json::object(), kFast);
    FAIL("expected a transport error");
  } catch (const TransportError& e) {
    CHECK(e.attempts() == 3);
  }
  CHECK_THROWS_AS(post_json("https://example.com/x", json::object(), kFast), TransportError);
}

TEST_CASE("distillation over http") {
  LocalServer server;
  auto endpoint = make_chat_endpoint("http:" + server.url("/flaky"), RetryPolicy{1, std::chrono::milliseconds(0)});
  DistillConfig cfg;
  cfg.retry = kFast;
  const auto r = distill({{"p", "req", "sft"}}, *endpoint, cfg);
  CHECK(r.records.size() == 1);
  CHECK(server.flaky_calls == 3);
}
