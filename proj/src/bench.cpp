#include "graphsos/bench.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <limits>

#include "graphsos/errors.hpp"
#include "graphsos/format.hpp"
#include "graphsos/osm.hpp"
#include "graphsos/parallel.hpp"
#include "graphsos/prompt.hpp"
#include "json.hpp"

namespace graphsos {

std::vector<BenchExample> bench_examples_from_records(const std::vector<GraphRecord>& records) {
  std::vector<BenchExample> out;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    if (!r.question || !r.answer || r.answer->empty())
      throw FormatError("record " + std::to_string(i) + " needs a question and a non-empty answer");
    out.push_back({r.graph, *r.question, *r.answer});
  }
  return out;
}

std::string normalize_answer(std::string_view text) {
  std::string out;
  bool pending_space = false;
  for (char c : text) {
    auto uc = static_cast<unsigned char>(c);
    if (std::isalnum(uc) || uc >= 0x80) {
      if (pending_space && !out.empty()) out += ' ';
      pending_space = false;
      out += static_cast<char>(std::tolower(uc));
    } else {
      pending_space = true;
    }
  }
  return out;
}

namespace {

// First whole-word occurrence of `needle` in the normalized `hay`.
std::size_t find_word(const std::string& hay, const std::string& needle) {
  if (needle.empty()) return std::string::npos;
  for (std::size_t at = hay.find(needle); at != std::string::npos; at = hay.find(needle, at + 1)) {
    const bool left = at == 0 || hay[at - 1] == ' ';
    const std::size_t end = at + needle.size();
    const bool right = end == hay.size() || hay[end] == ' ';
    if (left && right) return at;
  }
  return std::string::npos;
}

double quantile(const std::vector<double>& sorted, double q) {
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = static_cast<std::size_t>(std::ceil(pos));
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

}  // namespace

bool grade_answer(std::string_view response, std::string_view gold, const std::vector<std::string>& labels) {
  const std::string g = normalize_answer(gold);
  if (g.empty()) throw Error("gold answer must be non-empty");
  const std::string r = normalize_answer(response);
  if (r.empty()) return false;
  if (labels.empty()) return r.find(g) != std::string::npos;

  const std::size_t gold_at = find_word(r, g);
  if (gold_at == std::string::npos) return false;
  for (const auto& label : labels) {
    const std::string l = normalize_answer(label);
    if (l == g) continue;
    if (find_word(r, l) < gold_at) return false;
  }
  return true;
}

TrialStats summarize(const std::vector<double>& accuracies) {
  if (accuracies.empty()) throw Error("summarize needs at least one trial");
  std::vector<double> sorted = accuracies;
  std::sort(sorted.begin(), sorted.end());
  TrialStats s;
  s.trials = sorted.size();
  double sum = 0.0;
  for (double a : sorted) sum += a;
  s.mean = sum / static_cast<double>(sorted.size());
  double ss = 0.0;
  for (double a : sorted) ss += (a - s.mean) * (a - s.mean);
  s.std = std::sqrt(ss / static_cast<double>(sorted.size()));
  s.min = sorted.front();
  s.max = sorted.back();
  s.q1 = quantile(sorted, 0.25);
  s.median = quantile(sorted, 0.5);
  s.q3 = quantile(sorted, 0.75);
  return s;
}

TrialStats summarize(const std::vector<TrialResult>& results) {
  std::vector<double> acc;
  for (const auto& r : results) acc.push_back(r.accuracy);
  return summarize(acc);
}

BenchReport run_order_trials(const std::vector<BenchExample>& dataset, LlmBackend& backend, const BenchConfig& config) {
  if (config.trials < 1) throw Error("need at least one trial");
  if (dataset.empty()) throw Error("benchmark dataset is empty");

  BenchReport report;
  for (std::size_t t = 0; t < config.trials; ++t) {
    Rng trial_rng(config.base_seed + t);
    std::vector<std::string> prompts;
    prompts.reserve(dataset.size());
    for (const auto& ex : dataset) {
      std::string text;
      if (config.pin_identity_first && t == 0) {
        text = serialize(ex.graph, config.kind).text;
      } else if (config.osm) {
        const auto set = build_candidates(ex.graph, ex.question, config.osm->m, trial_rng.next(), config.kind);
        Rng pick_rng(trial_rng.next());
        text = select_order(set, config.osm->params, config.osm->encoder, config.osm->tau, pick_rng).chosen.text;
      } else {
        text = serialize(ex.graph, Ordering::random(ex.graph, trial_rng.next()), config.kind).text;
      }
      prompts.push_back(build_answer_prompt(text, ex.question));
    }

    TrialResult result;
    result.trial = t;
    std::vector<char> correct(dataset.size(), 0), failed(dataset.size(), 0);
    parallel_for(dataset.size(), config.concurrency, [&](std::size_t i) {
      try {
        const std::string reply = backend.answer({prompts[i], dataset[i].gold});
        correct[i] = grade_answer(reply, dataset[i].gold, config.labels) ? 1 : 0;
      } catch (const Error&) {
        failed[i] = 1;
      }
    });
    std::size_t hits = 0;
    for (std::size_t i = 0; i < dataset.size(); ++i) {
      result.correct.push_back(correct[i] != 0);
      hits += correct[i] != 0;
      result.errors += failed[i] != 0;
    }
    result.accuracy = static_cast<double>(hits) / static_cast<double>(dataset.size());
    report.errors += result.errors;
    report.trials.push_back(std::move(result));
  }
  report.stats = summarize(report.trials);
  return report;
}

double identity_hit_probability(const TextGraph& graph, SerializationKind kind) {
  auto inv_factorial = [](std::size_t n) {
    double p = 1.0;
    for (std::size_t i = 2; i <= n; ++i) p /= static_cast<double>(i);
    return p;
  };
  switch (kind) {
    case SerializationKind::FeatureEdge: return inv_factorial(graph.node_count()) * inv_factorial(graph.edge_count());
    case SerializationKind::EdgeOnly: return inv_factorial(graph.edge_count());
    case SerializationKind::TripleList: return inv_factorial(graph.triples().size());
  }
  return 0.0;
}

void write_trials_csv(const std::filesystem::path& path, const std::vector<TrialResult>& trials) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write " + path.string());
  out << "trial,accuracy,errors\n";
  for (const auto& t : trials) out << t.trial << ',' << format_double(t.accuracy) << ',' << t.errors << '\n';
}

std::string stats_to_json(const TrialStats& stats, std::size_t errors) {
  nlohmann::ordered_json j;
  j["mean"] = stats.mean;
  j["std"] = stats.std;
  j["min"] = stats.min;
  j["max"] = stats.max;
  j["q1"] = stats.q1;
  j["median"] = stats.median;
  j["q3"] = stats.q3;
  j["trials"] = stats.trials;
  j["errors"] = errors;
  return j.dump(2);
}

}  // namespace graphsos
