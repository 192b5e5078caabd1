#include "graphsos/cli.hpp"

#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "graphsos/attention.hpp"
#include "graphsos/bench.hpp"
#include "graphsos/encoder.hpp"
#include "graphsos/errors.hpp"
#include "graphsos/format.hpp"
#include "graphsos/graph.hpp"
#include "graphsos/graph_io.hpp"
#include "graphsos/osm.hpp"
#include "graphsos/prompt.hpp"
#include "graphsos/serialization.hpp"
#include "graphsos/ssm.hpp"
#include "graphsos/tuning_data.hpp"
#include "json.hpp"

namespace graphsos::cli {

using nlohmann::ordered_json;

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename T>
T parse_value(const std::string& key, const std::string& value) {
  T out{};
  std::istringstream in(value);
  if (!(in >> out) || !(in >> std::ws).eof()) throw FormatError("config key '" + key + "' has invalid value '" + value + "'");
  return out;
}

class Output {
 public:
  Output(const std::string& path, std::ostream& fallback) {
    if (!path.empty() && path != "-") {
      file_.open(path);
      if (!file_) throw FormatError("cannot write " + path);
    }
    stream_ = file_.is_open() ? static_cast<std::ostream*>(&file_) : &fallback;
  }
  std::ostream& operator*() { return *stream_; }

 private:
  std::ofstream file_;
  std::ostream* stream_;
};

std::vector<GraphRecord> load_input(const RunConfig& cfg) {
  if (cfg.input.empty()) throw FormatError("--input is required");
  return read_graph_jsonl(cfg.input);
}

EncoderHandle make_encoder(const std::string& spec, const std::string& fallback, int dim, std::uint64_t seed) {
  const std::string s = spec.empty() ? fallback : spec;
  if (s == "builtin") return EncoderHandle::builtin(dim, seed, false);
  if (s == "builtin-positional") return EncoderHandle::builtin(dim, seed, true);
  if (s.rfind("table:", 0) == 0) return load_embedding_table(s.substr(6));
  throw FormatError("encoder must be builtin, builtin-positional or table:<path>, got '" + s + "'");
}

AttentionParamsd load_or_init_params(const std::string& path, int heads, int dim, std::uint64_t seed) {
  if (!path.empty()) return load_attention_params(path);
  return AttentionParamsd::random(heads, dim, Rng::mix(seed ^ 0x5eed));
}

void check_dims(const AttentionParamsd& params, const EncoderHandle& encoder) {
  if (params.dim != encoder.dim())
    throw DimensionError("checkpoint dimension " + std::to_string(params.dim) + " differs from encoder dimension " +
                         std::to_string(encoder.dim()));
}

std::vector<OsmExample> osm_examples(const std::vector<GraphRecord>& records) {
  std::vector<OsmExample> out;
  for (const auto& ex : bench_examples_from_records(records)) out.push_back({ex.graph, ex.question, ex.gold});
  return out;
}

std::vector<std::string> split_labels(const std::string& csv) {
  std::vector<std::string> out;
  std::stringstream in(csv);
  std::string item;
  while (std::getline(in, item, ','))
    if (!trim(item).empty()) out.push_back(trim(item));
  return out;
}

// --- subcommands -----------------------------------------------------------

struct MetricsFlags {
  bool homophily = false;
  bool stats = false;
};

void cmd_metrics(const RunConfig& cfg, const MetricsFlags& flags, std::ostream& out) {
  const auto records = load_input(cfg);
  const bool homophily = flags.homophily || !flags.stats;
  for (const auto& r : records) {
    if (flags.stats)
      out << "nodes " << r.graph.node_count() << " edges " << r.graph.edge_count() << '\n';
    if (homophily) out << "edge_homophily " << format_decimal(edge_homophily(r.graph, r.graph.labels())) << '\n';
  }
}

void cmd_serialize(const RunConfig& cfg, const std::string& seed_flag, std::ostream& out_fallback) {
  const auto records = load_input(cfg);
  const auto kind = parse_kind(cfg.kind);
  const bool identity = seed_flag == "identity";
  Rng rng(identity ? 0 : parse_value<std::uint64_t>("seed", seed_flag));
  Output out(cfg.output, out_fallback);
  for (const auto& r : records) {
    const Ordering ordering = identity ? Ordering::identity(r.graph) : Ordering::random(r.graph, rng.next());
    *out << nlohmann::json(serialize(r.graph, ordering, kind).text).dump() << '\n';
  }
}

struct SampleFlags {
  NodeId target = 0;
  std::size_t line = 0;
  bool no_restart = false;
};

void cmd_sample(const RunConfig& cfg, const SampleFlags& flags, std::ostream& out_fallback) {
  const auto records = load_input(cfg);
  if (flags.line >= records.size()) throw LookupError("input has no record " + std::to_string(flags.line));
  const auto& graph = records[flags.line].graph;
  const auto encoder = make_encoder(cfg.encoder, "builtin", cfg.dim, 1);
  const auto params = load_or_init_params(cfg.params, cfg.heads, encoder.dim(), cfg.seed);
  check_dims(params, encoder);

  SampleConfig sc{cfg.n_max, cfg.k, !flags.no_restart, cfg.seed};
  const auto trace = sample_subgraph(graph, flags.target, params, encoder, sc);

  ordered_json j;
  j["target"] = trace.target;
  j["visited"] = trace.visited;
  j["exhausted"] = trace.exhausted;
  j["neighborhood"] = trace.neighborhood;
  j["attention"] = std::vector<double>(trace.attention.data(), trace.attention.data() + trace.attention.size());
  ordered_json steps = ordered_json::array();
  for (const auto& s : trace.steps)
    steps.push_back({{"from", s.from}, {"chosen", s.chosen}, {"index", s.weight_index}, {"log_prob", s.log_prob}});
  j["steps"] = std::move(steps);
  j["serialized"] = render_subgraph(trace.subgraph).text;
  Output out(cfg.output, out_fallback);
  *out << j.dump() << '\n';
}

void cmd_train_ssm(const RunConfig& cfg, std::ostream& log) {
  const auto records = load_input(cfg);
  if (cfg.output.empty()) throw FormatError("--out is required");
  // Records are relabelled into disjoint id ranges so one oracle sees every graph's labels.
  std::vector<TextGraph> graphs;
  LabelAssignment labels;
  NodeId next = 0;
  for (const auto& r : records) {
    const auto& g = r.graph;
    if (g.nodes().empty()) continue;
    const NodeId shift = next - g.nodes().front().id;
    std::vector<NodeRecord> nodes = g.nodes();
    for (auto& n : nodes) n.id += shift;
    std::vector<Edge> edges = g.edges();
    for (auto& e : edges) e = {e.u + shift, e.v + shift};
    graphs.emplace_back(std::move(nodes), std::move(edges), g.triples(), GraphOptions{g.directed(), true});
    for (const auto& [id, label] : g.labels()) labels.emplace(id + shift, label);
    next = g.nodes().back().id + shift + 1;
  }
  const auto encoder = make_encoder(cfg.encoder, "builtin", cfg.dim, 1);
  const auto init = load_or_init_params(cfg.params, cfg.heads, encoder.dim(), cfg.seed);
  check_dims(init, encoder);
  auto oracle = make_scoring_oracle(cfg.oracle, labels);

  TrainSsmConfig tc;
  tc.sample = SampleConfig{cfg.n_max, cfg.k, true, cfg.seed};
  tc.steps = cfg.steps;
  tc.lr = cfg.lr;
  tc.temperature = cfg.T;
  tc.baseline_decay = cfg.baseline_decay;
  tc.optimizer = parse_optimizer(cfg.optimizer);
  tc.seed = cfg.seed;
  const auto result = train_ssm(init, graphs, encoder, *oracle, tc);
  save_attention_params(cfg.output, result.params);

  std::ofstream curve(cfg.output + ".loss.csv");
  curve << "step,loss,reward\n";
  for (std::size_t i = 0; i < result.losses.size(); ++i)
    curve << i << ',' << format_double(result.losses[i]) << ',' << format_double(result.rewards[i]) << '\n';
  double tail = 0.0;
  const std::size_t n = std::min<std::size_t>(50, result.losses.size());
  for (std::size_t i = result.losses.size() - n; i < result.losses.size(); ++i) tail += result.losses[i];
  log << "trained " << result.losses.size() << " steps; mean loss over last " << n << ": "
      << format_double(n ? tail / static_cast<double>(n) : 0.0) << '\n';
}

void cmd_select_order(const RunConfig& cfg, std::ostream& out_fallback) {
  const auto records = load_input(cfg);
  const auto kind = parse_kind(cfg.kind);
  const auto encoder = make_encoder(cfg.encoder, "builtin-positional", cfg.dim, 1);
  const auto params = load_or_init_params(cfg.params, cfg.heads, encoder.dim(), cfg.seed);
  check_dims(params, encoder);
  Rng rng(cfg.seed);
  Output out(cfg.output, out_fallback);
  for (const auto& r : records) {
    const auto set = build_candidates(r.graph, r.question.value_or(""), cfg.m, rng.next(), kind);
    const auto sel = select_order(set, params, encoder, cfg.tau, rng);
    ordered_json j;
    j["index"] = sel.index;
    j["text"] = sel.chosen.text;
    j["weights"] = std::vector<double>(sel.weights.data(), sel.weights.data() + sel.weights.size());
    *out << j.dump() << '\n';
  }
}

void cmd_train_osm(const RunConfig& cfg, bool exact, std::ostream& log) {
  const auto records = load_input(cfg);
  if (cfg.output.empty()) throw FormatError("--out is required");
  const auto dataset = osm_examples(records);
  const auto encoder = make_encoder(cfg.encoder, "builtin-positional", cfg.dim, 1);
  const auto init = load_or_init_params(cfg.params, cfg.heads, encoder.dim(), cfg.seed);
  check_dims(init, encoder);
  auto llm = make_llm_backend(cfg.backend);

  TrainOsmConfig tc;
  tc.m = cfg.m;
  tc.tau = cfg.tau;
  tc.steps = cfg.steps;
  tc.lr = cfg.lr;
  tc.exact_expectation = exact;
  tc.optimizer = parse_optimizer(cfg.optimizer);
  tc.seed = cfg.seed;
  tc.kind = parse_kind(cfg.kind);
  tc.concurrency = cfg.concurrency;
  const auto result = train_osm(init, dataset, encoder, *llm, tc);
  save_attention_params(cfg.output, result.params);

  std::ofstream curve(cfg.output + ".loss.csv");
  curve << "step,nll\n";
  for (std::size_t i = 0; i < result.losses.size(); ++i) curve << i << ',' << format_double(result.losses[i]) << '\n';
  log << "trained " << result.losses.size() << " steps, skipped " << result.skipped_steps << '\n';
}

struct CotFlags {
  std::string sft_out;
  std::string dpo_out;
};

void cmd_cot_build(const RunConfig& cfg, const CotFlags& flags, std::ostream& log) {
  const auto records = load_input(cfg);
  const auto kind = parse_kind(cfg.kind);
  std::vector<DistillItem> items;
  for (const auto& ex : bench_examples_from_records(records)) {
    const auto serialized = serialize(ex.graph, kind);
    items.push_back({build_task_prompt(serialized.text, ex.question), build_cot_prompt(serialized, ex.question), ex.gold});
  }
  auto endpoint = make_chat_endpoint(cfg.endpoint, RetryPolicy{1, std::chrono::milliseconds(0)});
  DistillConfig dc;
  dc.temperature = cfg.temperature;
  dc.max_tokens = cfg.max_tokens;
  dc.concurrency = cfg.concurrency;
  const auto distilled = distill(items, *endpoint, dc);
  const auto dpo = build_dpo_dataset(distilled.records);
  if (!flags.sft_out.empty()) write_sft_jsonl(flags.sft_out, distilled.records);
  if (!flags.dpo_out.empty()) write_dpo_jsonl(flags.dpo_out, dpo.pairs);
  log << "records " << distilled.records.size() << " dropped_invalid " << distilled.dropped_invalid
      << " dropped_transport " << distilled.dropped_transport << " dpo_pairs " << dpo.pairs.size() << " skipped "
      << dpo.skipped << '\n';
}

struct BenchFlags {
  std::string labels;
  bool pin_identity_first = false;
  std::string osm_params;
};

void cmd_bench_order(const RunConfig& cfg, const BenchFlags& flags, std::ostream& log) {
  const auto records = load_input(cfg);
  if (cfg.output.empty()) throw FormatError("--out is required");
  const auto dataset = bench_examples_from_records(records);
  auto backend = make_llm_backend(cfg.backend);

  BenchConfig bc;
  bc.trials = cfg.trials;
  bc.base_seed = cfg.seed;
  bc.kind = parse_kind(cfg.kind);
  bc.pin_identity_first = flags.pin_identity_first;
  bc.concurrency = cfg.concurrency;
  bc.labels = split_labels(flags.labels);
  if (!flags.osm_params.empty()) {
    OsmRouting routing;
    routing.encoder = make_encoder(cfg.encoder, "builtin-positional", cfg.dim, 1);
    routing.params = load_attention_params(flags.osm_params);
    check_dims(routing.params, routing.encoder);
    routing.m = cfg.m;
    routing.tau = cfg.tau;
    bc.osm = std::move(routing);
  }
  const auto report = run_order_trials(dataset, *backend, bc);
  write_trials_csv(cfg.output, report.trials);
  std::ofstream stats(cfg.output + ".stats.json");
  if (!stats) throw FormatError("cannot write " + cfg.output + ".stats.json");
  stats << stats_to_json(report.stats, report.errors) << '\n';
  log << "mean " << format_double(report.stats.mean) << " std " << format_double(report.stats.std) << " errors "
      << report.errors << '\n';
}

}  // namespace

void apply_config_file(const std::filesystem::path& path, RunConfig& c) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open config " + path.string());
  const std::map<std::string, std::function<void(const std::string&, const std::string&)>> setters = {
      {"input", [&](auto&, auto& v) { c.input = v; }},
      {"output", [&](auto&, auto& v) { c.output = v; }},
      {"params", [&](auto&, auto& v) { c.params = v; }},
      {"backend", [&](auto&, auto& v) { c.backend = v; }},
      {"oracle", [&](auto&, auto& v) { c.oracle = v; }},
      {"endpoint", [&](auto&, auto& v) { c.endpoint = v; }},
      {"kind", [&](auto&, auto& v) { c.kind = v; }},
      {"encoder", [&](auto&, auto& v) { c.encoder = v; }},
      {"n_max", [&](auto& k, auto& v) { c.n_max = parse_value<int>(k, v); }},
      {"k", [&](auto& k, auto& v) { c.k = parse_value<int>(k, v); }},
      {"heads", [&](auto& k, auto& v) { c.heads = parse_value<int>(k, v); }},
      {"dim", [&](auto& k, auto& v) { c.dim = parse_value<int>(k, v); }},
      {"m", [&](auto& k, auto& v) { c.m = parse_value<std::size_t>(k, v); }},
      {"tau", [&](auto& k, auto& v) { c.tau = parse_value<double>(k, v); }},
      {"T", [&](auto& k, auto& v) { c.T = parse_value<double>(k, v); }},
      {"beta", [&](auto& k, auto& v) { c.beta = parse_value<double>(k, v); }},
      {"lr", [&](auto& k, auto& v) { c.lr = parse_value<double>(k, v); }},
      {"steps", [&](auto& k, auto& v) { c.steps = parse_value<std::size_t>(k, v); }},
      {"trials", [&](auto& k, auto& v) { c.trials = parse_value<std::size_t>(k, v); }},
      {"seed", [&](auto& k, auto& v) { c.seed = parse_value<std::uint64_t>(k, v); }},
      {"concurrency", [&](auto& k, auto& v) { c.concurrency = parse_value<int>(k, v); }},
      {"baseline_decay", [&](auto& k, auto& v) { c.baseline_decay = parse_value<double>(k, v); }},
      {"optimizer", [&](auto&, auto& v) { c.optimizer = v; }},
      {"temperature", [&](auto& k, auto& v) { c.temperature = parse_value<double>(k, v); }},
      {"max_tokens", [&](auto& k, auto& v) { c.max_tokens = parse_value<int>(k, v); }},
  };
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw FormatError(path.string() + ":" + std::to_string(lineno) + ": expected key=value");
    const std::string key = trim(t.substr(0, eq)), value = trim(t.substr(eq + 1));
    auto it = setters.find(key);
    if (it == setters.end()) throw FormatError(path.string() + ":" + std::to_string(lineno) + ": unknown key '" + key + "'");
    it->second(key, value);
  }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  // Config values become flag defaults, so load them before parsing.
  for (std::size_t i = 1; i + 1 < args.size(); ++i) {
    if (args[i] == "--config") {
      try {
        apply_config_file(args[i + 1], cfg);
      } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return 1;
      }
    }
  }

  CLI::App app{"Graph serialization-order and subgraph-sampling pipeline", "graphsos"};
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default();
  std::string config_path;

  auto add_common = [&](CLI::App* sub) {
    sub->option_defaults()->always_capture_default();
    sub->add_option("--config", config_path, "key=value config file; flags override its values");
    sub->add_option("--input", cfg.input, "graph interchange JSONL file");
    sub->add_option("--seed", cfg.seed, "seed for every random choice");
  };
  auto add_model = [&](CLI::App* sub) {
    sub->add_option("--params", cfg.params, "attention checkpoint (random init from --seed when empty)");
    sub->add_option("--heads", cfg.heads, "attention heads for fresh parameters");
    sub->add_option("--dim", cfg.dim, "built-in encoder dimension");
    sub->add_option("--encoder", cfg.encoder, "builtin | builtin-positional | table:<path> (empty: subcommand default)");
  };

  MetricsFlags metrics_flags;
  auto* metrics = app.add_subcommand("metrics", "graph statistics");
  add_common(metrics);
  metrics->add_flag("--homophily", metrics_flags.homophily, "print edge_homophily per record (default)");
  metrics->add_flag("--stats", metrics_flags.stats, "print node and edge counts per record");

  std::string serialize_seed = "identity";
  auto* ser = app.add_subcommand("serialize", "render graphs as text, one JSON string per line");
  ser->option_defaults()->always_capture_default();
  ser->add_option("--config", config_path, "key=value config file; flags override its values");
  ser->add_option("--input", cfg.input, "graph interchange JSONL file");
  ser->add_option("--kind", cfg.kind, "feature-edge | edge | triple");
  ser->add_option("--seed", serialize_seed, "ordering seed (u64) or 'identity'");
  ser->add_option("--out", cfg.output, "output path (stdout when empty)");

  SampleFlags sample_flags;
  auto* sample = app.add_subcommand("sample", "attention-guided subgraph sample around one node");
  add_common(sample);
  add_model(sample);
  sample->add_option("--target", sample_flags.target, "target node id")->required();
  sample->add_option("--line", sample_flags.line, "record index in the input file");
  sample->add_option("--n-max", cfg.n_max, "maximum sampled node count");
  sample->add_option("--k", cfg.k, "hop radius");
  sample->add_flag("--no-restart", sample_flags.no_restart, "stop instead of restarting at the target");
  sample->add_option("--out", cfg.output, "output path (stdout when empty)");

  auto* tssm = app.add_subcommand("train-ssm", "train the subgraph sampler against a scoring oracle");
  add_common(tssm);
  add_model(tssm);
  tssm->add_option("--oracle", cfg.oracle, "builtin | http:<url>");
  tssm->add_option("--steps", cfg.steps, "policy-gradient steps");
  tssm->add_option("--lr", cfg.lr, "learning rate");
  tssm->add_option("--t", cfg.T, "loss temperature T");
  tssm->add_option("--n-max", cfg.n_max, "maximum sampled node count");
  tssm->add_option("--k", cfg.k, "hop radius");
  tssm->add_option("--baseline-decay", cfg.baseline_decay, "EMA decay of the reward baseline");
  tssm->add_option("--optimizer", cfg.optimizer, "adam or sgd");
  tssm->add_option("--out", cfg.output, "checkpoint path")->required();

  auto* sel = app.add_subcommand("select-order", "pick one of m serialization orders per record");
  add_common(sel);
  add_model(sel);
  sel->add_option("--m", cfg.m, "order candidates");
  sel->add_option("--tau", cfg.tau, "Gumbel-softmax temperature");
  sel->add_option("--kind", cfg.kind, "feature-edge | edge | triple");
  sel->add_option("--out", cfg.output, "output path (stdout when empty)");

  bool exact = false;
  auto* tosm = app.add_subcommand("train-osm", "train the order selector against a frozen LLM");
  add_common(tosm);
  add_model(tosm);
  tosm->add_option("--backend", cfg.backend, "mock:<spec> | http:<url>");
  tosm->add_option("--m", cfg.m, "order candidates");
  tosm->add_option("--tau", cfg.tau, "Gumbel-softmax temperature");
  tosm->add_option("--steps", cfg.steps, "training steps");
  tosm->add_option("--lr", cfg.lr, "learning rate");
  tosm->add_option("--optimizer", cfg.optimizer, "adam or sgd");
  tosm->add_option("--kind", cfg.kind, "feature-edge | edge | triple");
  tosm->add_option("--concurrency", cfg.concurrency, "in-flight backend requests");
  tosm->add_flag("--exact-expectation", exact, "score every candidate instead of only the chosen one");
  tosm->add_option("--out", cfg.output, "checkpoint path")->required();

  CotFlags cot_flags;
  auto* cot = app.add_subcommand("cot-build", "distill Graph-CoT answers and build SFT/DPO datasets");
  add_common(cot);
  cot->add_option("--endpoint", cfg.endpoint, "mock:cot | mock:no-reasoning | http:<url>");
  cot->add_option("--kind", cfg.kind, "feature-edge | edge | triple");
  cot->add_option("--temperature", cfg.temperature, "sampling temperature sent to the endpoint");
  cot->add_option("--max-tokens", cfg.max_tokens, "completion token cap sent to the endpoint");
  cot->add_option("--concurrency", cfg.concurrency, "in-flight requests");
  cot->add_option("--sft-out", cot_flags.sft_out, "SFT JSONL output");
  cot->add_option("--dpo-out", cot_flags.dpo_out, "DPO JSONL output");

  BenchFlags bench_flags;
  auto* bench = app.add_subcommand("bench-order", "order-sensitivity trials against an answer backend");
  add_common(bench);
  bench->add_option("--backend", cfg.backend, "mock:<spec> | http:<url>");
  bench->add_option("--trials", cfg.trials, "independent trials");
  bench->add_option("--labels", bench_flags.labels, "comma-separated label set for grading");
  bench->add_flag("--pin-identity-first", bench_flags.pin_identity_first, "trial 0 uses the identity ordering");
  bench->add_option("--concurrency", cfg.concurrency, "in-flight backend requests");
  bench->add_option("--kind", cfg.kind, "feature-edge | edge | triple");
  bench->add_option("--osm-params", bench_flags.osm_params, "route orderings through a trained order selector");
  bench->add_option("--m", cfg.m, "order candidates when routing through the selector");
  bench->add_option("--tau", cfg.tau, "Gumbel-softmax temperature when routing through the selector");
  bench->add_option("--encoder", cfg.encoder, "selector encoder (default builtin-positional)");
  bench->add_option("--dim", cfg.dim, "built-in encoder dimension");
  bench->add_option("--out", cfg.output, "CSV output; statistics go to <out>.stats.json")->required();

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  try {
    if (metrics->parsed()) cmd_metrics(cfg, metrics_flags, out);
    else if (ser->parsed()) cmd_serialize(cfg, serialize_seed, out);
    else if (sample->parsed()) cmd_sample(cfg, sample_flags, out);
    else if (tssm->parsed()) cmd_train_ssm(cfg, err);
    else if (sel->parsed()) cmd_select_order(cfg, out);
    else if (tosm->parsed()) cmd_train_osm(cfg, exact, err);
    else if (cot->parsed()) cmd_cot_build(cfg, cot_flags, err);
    else if (bench->parsed()) cmd_bench_order(cfg, bench_flags, err);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}

}  // namespace graphsos::cli
