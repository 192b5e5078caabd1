#include "graphsos/tuning_data.hpp"

#include <cmath>
#include <fstream>
#include <thread>

#include "graphsos/errors.hpp"
#include "graphsos/parallel.hpp"
#include "graphsos/prompt.hpp"
#include "json.hpp"

namespace graphsos {

using nlohmann::json;

namespace {

constexpr std::string_view kCotInstruction =
    "First analyze the graph's features and structure under 'Analysis:', then derive the answer under "
    "'Reasoning:', ending with 'Answer:'";

}  // namespace

bool has_cot_sections(std::string_view answer) {
  auto a = answer.find(kAnalysisMarker);
  if (a == std::string_view::npos) return false;
  return answer.find(kReasoningMarker, a + kAnalysisMarker.size()) != std::string_view::npos;
}

std::string build_cot_prompt(const SerializedGraph& serialized, const std::string& question) {
  return build_task_prompt(serialized.text, question) + "\n" + std::string(kCotInstruction);
}

std::string build_cot_prompt(const TextGraph& graph, const std::string& question, SerializationKind kind) {
  return build_cot_prompt(serialize(graph, kind), question);
}

DistillResult distill(const std::vector<DistillItem>& items, ChatEndpoint& endpoint, const DistillConfig& config) {
  enum class Outcome { Ok, Invalid, Transport };
  std::vector<Outcome> outcome(items.size(), Outcome::Ok);
  std::vector<std::string> answers(items.size());

  parallel_for(items.size(), config.concurrency, [&](std::size_t i) {
    ChatRequest req{{{"user", items[i].request}}, config.temperature, config.max_tokens};
    auto request_once = [&]() -> std::optional<std::string> {
      const int attempts = std::max(1, config.retry.max_attempts);
      for (int attempt = 1; attempt <= attempts; ++attempt) {
        if (attempt > 1) std::this_thread::sleep_for(config.retry.base_delay * (1 << (attempt - 2)));
        try {
          return endpoint.complete(req);
        } catch (const TransportError&) {
        }
      }
      return std::nullopt;
    };
    for (int round = 0; round < 2; ++round) {
      auto reply = request_once();
      if (!reply) {
        outcome[i] = Outcome::Transport;
        return;
      }
      if (has_cot_sections(*reply)) {
        answers[i] = std::move(*reply);
        outcome[i] = Outcome::Ok;
        return;
      }
      outcome[i] = Outcome::Invalid;
    }
  });

  DistillResult result;
  for (std::size_t i = 0; i < items.size(); ++i) {
    switch (outcome[i]) {
      case Outcome::Ok: result.records.push_back({items[i].prompt, items[i].sft_answer, answers[i]}); break;
      case Outcome::Invalid: ++result.dropped_invalid; break;
      case Outcome::Transport: ++result.dropped_transport; break;
    }
  }
  return result;
}

double sft_loss(const std::vector<TokenLogProbs>& batch) {
  if (batch.empty()) throw Error("sft_loss needs a non-empty batch");
  double total = 0.0;
  for (const auto& ex : batch) {
    for (double lp : ex.values) {
      if (!std::isfinite(lp) || lp > 0.0) throw Error("token log-probabilities must be finite and <= 0");
      total -= lp;
    }
  }
  return total;
}

double softplus(double x) {
  return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

double dpo_loss(double lw_theta, double lw_ref, double ll_theta, double ll_ref, double beta) {
  if (!(beta > 0.0)) throw Error("dpo beta must be positive");
  const double margin = (lw_theta - lw_ref) - (ll_theta - ll_ref);
  // -log sigmoid(z) = softplus(-z)
  return softplus(-beta * margin);
}

DpoDataset build_dpo_dataset(const std::vector<CotRecord>& records) {
  DpoDataset out;
  for (const auto& r : records) {
    if (r.cot_answer.empty() || r.sft_answer.empty() || r.cot_answer == r.sft_answer) {
      ++out.skipped;
      continue;
    }
    out.pairs.push_back({r.prompt, r.cot_answer, r.sft_answer});
  }
  return out;
}

void write_sft_jsonl(const std::filesystem::path& path, const std::vector<CotRecord>& records) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write " + path.string());
  for (const auto& r : records) out << json{{"prompt", r.prompt}, {"answer", r.sft_answer}}.dump() << '\n';
}

void write_dpo_jsonl(const std::filesystem::path& path, const std::vector<PreferenceRecord>& pairs) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write " + path.string());
  for (const auto& p : pairs)
    out << json{{"prompt", p.prompt}, {"chosen", p.chosen}, {"rejected", p.rejected}}.dump() << '\n';
}

std::vector<PreferenceRecord> read_dpo_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path.string());
  std::vector<PreferenceRecord> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    try {
      auto j = json::parse(line);
      out.push_back({j.at("prompt").get<std::string>(), j.at("chosen").get<std::string>(),
                     j.at("rejected").get<std::string>()});
    } catch (const json::exception& e) {
      throw FormatError("malformed DPO record: " + std::string(e.what()));
    }
  }
  return out;
}

}  // namespace graphsos
