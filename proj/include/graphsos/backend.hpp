#pragma once

#include <chrono>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace graphsos {

struct RetryPolicy {
  int max_attempts = 3;
  std::chrono::milliseconds base_delay{200};
};

/// URL of an `http:<url>` spec; a bare `http://...` spec is taken as is.
std::string url_from_spec(std::string_view spec);

/// POSTs `body` as JSON to an http:// URL and returns the parsed JSON reply.
/// Adds `Authorization: Bearer $GRAPHSOS_BACKEND_TOKEN` when that variable is set.
/// Retries with exponential backoff; throws TransportError when attempts run out.
nlohmann::json post_json(const std::string& url, const nlohmann::json& body, const RetryPolicy& retry = {});

/// One request to a language model. `reference` is the gold output: mocks use
/// it to decide what to answer; HTTP backends never send it for answering.
struct LlmQuery {
  std::string prompt;
  std::string reference;
};

/// A frozen language model: scores targets and answers prompts.
class LlmBackend {
 public:
  virtual ~LlmBackend() = default;
  /// -log pi(reference | prompt).
  virtual double nll(const LlmQuery& query) = 0;
  virtual std::string answer(const LlmQuery& query) = 0;
  virtual bool is_mock() const { return false; }
};

/// Order-aware mock whose behaviour depends on how far the element lists in the
/// prompt are from ascending order (normalized Kendall-tau distance d, averaged
/// over the Feature/Edge/Triple lists present).
///
///   identity-only        answers correctly iff d == 0;  nll = alpha*d + beta
///   identity-preferring  answers correctly iff d <= threshold; nll = alpha*d + beta
///   order-insensitive    always answers correctly; nll = beta
///
/// Spec string: `<mode>[:key=value,...]` with keys alpha, beta, threshold.
class MockLlm : public LlmBackend {
 public:
  enum class Mode { IdentityOnly, IdentityPreferring, OrderInsensitive };

  explicit MockLlm(std::string_view spec);

  double nll(const LlmQuery& query) override;
  std::string answer(const LlmQuery& query) override;
  bool is_mock() const override { return true; }

  Mode mode() const { return mode_; }
  double alpha() const { return alpha_; }
  double beta() const { return beta_; }
  double threshold() const { return threshold_; }

  /// Distance of the prompt's listed elements from ascending order.
  static double order_distance(std::string_view prompt);

  static constexpr std::string_view kWrongAnswer = "I cannot tell.";

 private:
  Mode mode_ = Mode::OrderInsensitive;
  double alpha_ = 1.0;
  double beta_ = 0.1;
  double threshold_ = 0.25;
};

/// `http:<url>`: nll POSTs {prompt, target} and reads {nll}; answer POSTs a
/// chat-completion body and reads choices[0].message.content.
class HttpLlm : public LlmBackend {
 public:
  explicit HttpLlm(std::string url, RetryPolicy retry = {}, int max_tokens = 512);
  double nll(const LlmQuery& query) override;
  std::string answer(const LlmQuery& query) override;

 private:
  std::string url_;
  RetryPolicy retry_;
  int max_tokens_;
};

/// `mock:<spec>` or `http:<url>`.
std::unique_ptr<LlmBackend> make_llm_backend(std::string_view spec, RetryPolicy retry = {});

struct ChatMessage {
  std::string role;
  std::string content;
};

struct ChatRequest {
  std::vector<ChatMessage> messages;
  double temperature = 0.9;
  int max_tokens = 512;

  nlohmann::json to_json() const;
};

class ChatEndpoint {
 public:
  virtual ~ChatEndpoint() = default;
  /// Content of the first completion choice. Throws TransportError.
  virtual std::string complete(const ChatRequest& request) = 0;
};

/// Chat-completion-compatible HTTP endpoint.
class HttpChatEndpoint : public ChatEndpoint {
 public:
  explicit HttpChatEndpoint(std::string url, RetryPolicy retry = {});
  std::string complete(const ChatRequest& request) override;

 private:
  std::string url_;
  RetryPolicy retry_;
};

/// Offline endpoint producing Graph-CoT shaped text from the prompt.
///
///   cot           `Analysis:` / `Reasoning:` / `Answer:` sections describing the listed graph
///   no-reasoning  same text with the `Reasoning:` section missing
///   fail          always throws TransportError
/// Every request body is captured for inspection.
class MockChatEndpoint : public ChatEndpoint {
 public:
  explicit MockChatEndpoint(std::string_view spec);
  std::string complete(const ChatRequest& request) override;

  std::vector<nlohmann::json> captured() const;

 private:
  std::string mode_;
  mutable std::mutex mutex_;
  std::vector<nlohmann::json> captured_;
};

/// `mock:<mode>` or `http:<url>`.
std::unique_ptr<ChatEndpoint> make_chat_endpoint(std::string_view spec, RetryPolicy retry = {});

}  // namespace graphsos
