#include "graphsos/backend.hpp"

#include <cstdlib>
#include <thread>

#include "graphsos/errors.hpp"
#include "graphsos/format.hpp"
#include "graphsos/serialization.hpp"
#include "httplib.h"

namespace graphsos {

using nlohmann::json;

namespace {

struct UrlParts {
  std::string origin;  // scheme://host[:port]
  std::string path;
};

UrlParts split_url(const std::string& url) {
  const std::string scheme = "http://";
  if (url.rfind(scheme, 0) != 0) throw TransportError("only http:// URLs are supported: " + url, 0);
  auto slash = url.find('/', scheme.size());
  if (slash == std::string::npos) return {url, "/"};
  return {url.substr(0, slash), url.substr(slash)};
}

}  // namespace

std::string url_from_spec(std::string_view spec) {
  if (spec.rfind("http://", 0) == 0) return std::string(spec);
  return std::string(spec.substr(5));
}

json post_json(const std::string& url, const json& body, const RetryPolicy& retry) {
  const auto parts = split_url(url);
  httplib::Headers headers;
  if (const char* token = std::getenv("GRAPHSOS_BACKEND_TOKEN"); token && *token)
    headers.emplace("Authorization", std::string("Bearer ") + token);

  std::string last_error = "no attempt made";
  const int attempts = std::max(1, retry.max_attempts);
  for (int attempt = 1; attempt <= attempts; ++attempt) {
    if (attempt > 1) std::this_thread::sleep_for(retry.base_delay * (1 << (attempt - 2)));
    httplib::Client client(parts.origin);
    client.set_connection_timeout(10, 0);
    client.set_read_timeout(120, 0);
    auto res = client.Post(parts.path, headers, body.dump(), "application/json");
    if (!res) {
      last_error = "request to " + url + " failed: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status < 200 || res->status >= 300) {
      last_error = "request to " + url + " returned HTTP " + std::to_string(res->status);
      continue;
    }
    try {
      return json::parse(res->body);
    } catch (const json::parse_error&) {
      last_error = "response from " + url + " is not JSON";
    }
  }
  throw TransportError(last_error, attempts);
}

// --- MockLlm ---------------------------------------------------------------

MockLlm::MockLlm(std::string_view spec) {
  std::string_view mode = spec.substr(0, spec.find(':'));
  if (mode == "identity-only")
    mode_ = Mode::IdentityOnly;
  else if (mode == "identity-preferring")
    mode_ = Mode::IdentityPreferring;
  else if (mode == "order-insensitive" || mode == "constant")
    mode_ = Mode::OrderInsensitive;
  else
    throw FormatError("unknown mock backend '" + std::string(mode) + "'");

  if (auto colon = spec.find(':'); colon != std::string_view::npos) {
    std::string_view rest = spec.substr(colon + 1);
    while (!rest.empty()) {
      auto comma = rest.find(',');
      std::string_view kv = rest.substr(0, comma);
      rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
      auto eq = kv.find('=');
      if (eq == std::string_view::npos) throw FormatError("mock option must be key=value: " + std::string(kv));
      auto key = kv.substr(0, eq);
      double value = parse_double(kv.substr(eq + 1));
      if (key == "alpha")
        alpha_ = value;
      else if (key == "beta")
        beta_ = value;
      else if (key == "threshold")
        threshold_ = value;
      else
        throw FormatError("unknown mock option '" + std::string(key) + "'");
    }
  }
}

double MockLlm::order_distance(std::string_view prompt) {
  const auto listed = scan_listed_elements(prompt);
  double total = 0.0;
  int lists = 0;
  if (!listed.feature_ids.empty()) {
    total += normalized_kendall_distance(listed.feature_ids);
    ++lists;
  }
  if (!listed.edges.empty()) {
    total += normalized_kendall_distance(listed.edges);
    ++lists;
  }
  if (!listed.triples.empty()) {
    total += normalized_kendall_distance(listed.triples);
    ++lists;
  }
  return lists == 0 ? 0.0 : total / lists;
}

double MockLlm::nll(const LlmQuery& query) {
  if (mode_ == Mode::OrderInsensitive) return beta_;
  return alpha_ * order_distance(query.prompt) + beta_;
}

std::string MockLlm::answer(const LlmQuery& query) {
  switch (mode_) {
    case Mode::OrderInsensitive: return query.reference;
    case Mode::IdentityOnly:
      return order_distance(query.prompt) == 0.0 ? query.reference : std::string(kWrongAnswer);
    case Mode::IdentityPreferring:
      return order_distance(query.prompt) <= threshold_ ? query.reference : std::string(kWrongAnswer);
  }
  return std::string(kWrongAnswer);
}

// --- HttpLlm ---------------------------------------------------------------

HttpLlm::HttpLlm(std::string url, RetryPolicy retry, int max_tokens)
    : url_(std::move(url)), retry_(retry), max_tokens_(max_tokens) {}

double HttpLlm::nll(const LlmQuery& query) {
  json reply = post_json(url_, {{"prompt", query.prompt}, {"target", query.reference}}, retry_);
  if (!reply.contains("nll") || !reply["nll"].is_number())
    throw TransportError("scoring response from " + url_ + " lacks a numeric 'nll'", 1);
  return reply["nll"].get<double>();
}

std::string HttpLlm::answer(const LlmQuery& query) {
  ChatRequest req{{{"user", query.prompt}}, 0.0, max_tokens_};
  HttpChatEndpoint chat(url_, retry_);
  return chat.complete(req);
}

std::unique_ptr<LlmBackend> make_llm_backend(std::string_view spec, RetryPolicy retry) {
  if (spec.rfind("mock:", 0) == 0) return std::make_unique<MockLlm>(spec.substr(5));
  if (spec.rfind("http:", 0) == 0) return std::make_unique<HttpLlm>(url_from_spec(spec), retry);
  throw FormatError("backend must be mock:<spec> or http:<url>, got '" + std::string(spec) + "'");
}

// --- chat ------------------------------------------------------------------

json ChatRequest::to_json() const {
  json msgs = json::array();
  for (const auto& m : messages) msgs.push_back({{"role", m.role}, {"content", m.content}});
  return {{"messages", std::move(msgs)}, {"temperature", temperature}, {"max_tokens", max_tokens}};
}

HttpChatEndpoint::HttpChatEndpoint(std::string url, RetryPolicy retry) : url_(std::move(url)), retry_(retry) {}

std::string HttpChatEndpoint::complete(const ChatRequest& request) {
  json reply = post_json(url_, request.to_json(), retry_);
  try {
    return reply.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const json::exception&) {
    throw TransportError("chat response from " + url_ + " lacks choices[0].message.content", 1);
  }
}

MockChatEndpoint::MockChatEndpoint(std::string_view spec) : mode_(spec) {
  if (mode_ != "cot" && mode_ != "no-reasoning" && mode_ != "fail")
    throw FormatError("unknown mock chat endpoint '" + mode_ + "'");
}

std::string MockChatEndpoint::complete(const ChatRequest& request) {
  {
    std::lock_guard lock(mutex_);
    captured_.push_back(request.to_json());
  }
  if (mode_ == "fail") throw TransportError("mock endpoint configured to fail", 1);

  const std::string& prompt = request.messages.empty() ? std::string() : request.messages.back().content;
  const auto listed = scan_listed_elements(prompt);
  std::string analysis = "Analysis: The graph lists " + std::to_string(listed.feature_ids.size()) +
                         " node descriptions, " + std::to_string(listed.edges.size()) + " edges and " +
                         std::to_string(listed.triples.size()) + " triples. ";
  if (!listed.edges.empty())
    analysis += "Node " + std::to_string(listed.edges.front().u) + " connects to node " +
                std::to_string(listed.edges.front().v) + ". ";
  std::string reasoning = "Reasoning: Neighbouring nodes share topics, so the target follows its neighbours. ";
  std::string answer = "Answer: see analysis.";
  if (mode_ == "no-reasoning") return analysis + answer;
  return analysis + reasoning + answer;
}

std::vector<json> MockChatEndpoint::captured() const {
  std::lock_guard lock(mutex_);
  return captured_;
}

std::unique_ptr<ChatEndpoint> make_chat_endpoint(std::string_view spec, RetryPolicy retry) {
  if (spec.rfind("mock:", 0) == 0) return std::make_unique<MockChatEndpoint>(spec.substr(5));
  if (spec.rfind("http:", 0) == 0) return std::make_unique<HttpChatEndpoint>(url_from_spec(spec), retry);
  throw FormatError("endpoint must be mock:<mode> or http:<url>, got '" + std::string(spec) + "'");
}

}  // namespace graphsos
