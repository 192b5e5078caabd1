#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "graphsos/backend.hpp"
#include "graphsos/graph.hpp"
#include "graphsos/serialization.hpp"

namespace graphsos {

inline constexpr std::string_view kAnalysisMarker = "Analysis:";
inline constexpr std::string_view kReasoningMarker = "Reasoning:";
inline constexpr std::string_view kAnswerMarker = "Answer:";

struct CotRecord {
  std::string prompt;
  std::string sft_answer;
  std::string cot_answer;
};

struct PreferenceRecord {
  std::string prompt;
  std::string chosen;    // y_w
  std::string rejected;  // y_l
};

/// Per-token log-probabilities of one answer under one policy; each entry is
/// finite and <= 0.
struct TokenLogProbs {
  std::vector<double> values;
};

/// True when `answer` contains `Analysis:` followed later by `Reasoning:`.
bool has_cot_sections(std::string_view answer);

std::string build_cot_prompt(const TextGraph& graph, const std::string& question, SerializationKind kind);
std::string build_cot_prompt(const SerializedGraph& serialized, const std::string& question);

struct DistillItem {
  /// Training prompt x (rendered graph + question).
  std::string prompt;
  /// Request sent to the teacher (x + Graph-CoT instruction).
  std::string request;
  std::string sft_answer;
};

struct DistillConfig {
  double temperature = 0.9;
  int max_tokens = 512;
  RetryPolicy retry{3, std::chrono::milliseconds(200)};
  int concurrency = 1;
};

struct DistillResult {
  std::vector<CotRecord> records;
  std::size_t dropped_invalid = 0;
  std::size_t dropped_transport = 0;
};

/// One completion per item. Completions lacking the section markers are
/// requested once more, then dropped; transport failures back off
/// exponentially up to retry.max_attempts and are then dropped.
DistillResult distill(const std::vector<DistillItem>& items, ChatEndpoint& endpoint, const DistillConfig& config = {});

/// -sum of every token log-probability in the batch.
double sft_loss(const std::vector<TokenLogProbs>& batch);

/// -log sigmoid(beta * ((lw_theta - lw_ref) - (ll_theta - ll_ref))), via softplus.
double dpo_loss(double lw_theta, double lw_ref, double ll_theta, double ll_ref, double beta = 0.1);

/// log(1 + e^x) without overflow.
double softplus(double x);

struct DpoDataset {
  std::vector<PreferenceRecord> pairs;
  std::size_t skipped = 0;
};

/// chosen = CoT answer, rejected = SFT answer. Records missing either answer,
/// or whose answers coincide, are skipped.
DpoDataset build_dpo_dataset(const std::vector<CotRecord>& records);

/// JSONL {prompt, answer}.
void write_sft_jsonl(const std::filesystem::path& path, const std::vector<CotRecord>& records);
/// JSONL {prompt, chosen, rejected}.
void write_dpo_jsonl(const std::filesystem::path& path, const std::vector<PreferenceRecord>& pairs);
std::vector<PreferenceRecord> read_dpo_jsonl(const std::filesystem::path& path);

}  // namespace graphsos
