#include "doctest.h"

#include <algorithm>
#include <sstream>

#include "graphsos/attention.hpp"
#include "graphsos/cli.hpp"
#include "json.hpp"
#include "test_support.hpp"

using namespace graphsos;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "graphsos");
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string fx(const char* name) { return test::fixture(name).string(); }

}  // namespace

TEST_CASE("metrics") {
  const auto r = run({"metrics", "--input", fx("triangle.jsonl"), "--homophily"});
  CHECK(r.code == 0);
  CHECK(r.out == "edge_homophily 1.0\n");
  const auto s = run({"metrics", "--input", fx("triangle.jsonl"), "--stats"});
  CHECK(s.out == "nodes 3 edges 3\n");
}

TEST_CASE("usage and runtime errors") {
  CHECK(run({}).code == 1);
  CHECK(run({"frobnicate"}).code == 1);
  const auto bad_flag = run({"metrics", "--bogus"});
  CHECK(bad_flag.code == 1);
  CHECK(run({"metrics", "--input", "/nonexistent.jsonl"}).code == 2);
  CHECK(run({"serialize", "--input", fx("triangle.jsonl"), "--kind", "xml"}).code == 2);
  CHECK(run({"serialize", "--input", fx("triangle.jsonl"), "--seed", "seven"}).code == 2);
}

TEST_CASE("help lists every flag with its default") {
  for (const char* sub : {"metrics", "serialize", "sample", "train-ssm", "select-order", "train-osm", "cot-build",
                          "bench-order"}) {
    const auto r = run({sub, "--help"});
    CHECK(r.code == 0);
    CHECK(r.out.find("--input") != std::string::npos);
  }
  const auto r = run({"train-ssm", "--help"});
  CHECK(r.out.find("--t") != std::string::npos);
  CHECK(r.out.find("5") != std::string::npos);
  CHECK(run({"select-order", "--help"}).out.find("0.5") != std::string::npos);
  CHECK(run({"bench-order", "--help"}).out.find("mock:order-insensitive") != std::string::npos);
}

TEST_CASE("serialize is deterministic per seed") {
  const auto dir = test::scratch_dir("cli_serialize");
  const auto a = (dir / "a.txt").string(), b = (dir / "b.txt").string(), c = (dir / "c.txt").string();
  CHECK(run({"serialize", "--input", fx("six_node.jsonl"), "--seed", "7", "--out", a}).code == 0);
  CHECK(run({"serialize", "--input", fx("six_node.jsonl"), "--seed", "7", "--out", b}).code == 0);
  CHECK(run({"serialize", "--input", fx("six_node.jsonl"), "--seed", "8", "--out", c}).code == 0);
  CHECK(test::slurp(a) == test::slurp(b));
  CHECK(test::slurp(a) != test::slurp(c));

  const auto id = run({"serialize", "--input", fx("triangle.jsonl")});
  CHECK(nlohmann::json::parse(id.out).get<std::string>() ==
        "Feature List: [Node 0: graph neural networks | Node 1: message passing | Node 2: spectral filters], "
        "Edge List: [(0, 1) (0, 2) (1, 2)]");
  const auto kg = run({"serialize", "--input", fx("kg.jsonl"), "--kind", "triple"});
  CHECK(kg.out.find("Triple List: [") != std::string::npos);
}

TEST_CASE("config file supplies defaults and flags win") {
  const auto dir = test::scratch_dir("cli_config");
  {
    std::ofstream cfg(dir / "run.cfg");
    cfg << "# test config\ninput = " << fx("kg.jsonl") << "\nkind=triple\n";
  }
  const auto r = run({"serialize", "--config", (dir / "run.cfg").string()});
  CHECK(r.code == 0);
  CHECK(r.out.find("Triple List") != std::string::npos);
  const auto flag = run({"serialize", "--config", (dir / "run.cfg").string(), "--input", fx("triangle.jsonl"),
                         "--kind", "edge"});
  CHECK(flag.out.find("Edge List") != std::string::npos);

  {
    std::ofstream cfg(dir / "bad.cfg");
    cfg << "colour = blue\n";
  }
  CHECK(run({"serialize", "--config", (dir / "bad.cfg").string()}).code == 1);

  cli::RunConfig rc;
  {
    std::ofstream cfg(dir / "all.cfg");
    cfg << "n_max=7\nk=3\nm=4\ntau=0.25\nT=2\nbeta=0.5\ntrials=3\nseed=9\noptimizer=sgd\n";
  }
  cli::apply_config_file(dir / "all.cfg", rc);
  CHECK(rc.n_max == 7);
  CHECK(rc.m == 4);
  CHECK(rc.T == 2.0);
  CHECK(rc.beta == 0.5);
  CHECK(rc.seed == 9);
  CHECK(rc.heads == 4);
  CHECK(rc.optimizer == "sgd");
}

TEST_CASE("sample, train and select") {
  const auto dir = test::scratch_dir("cli_pipeline");
  const auto ssm = (dir / "ssm.ckpt").string();
  CHECK(run({"train-ssm", "--input", fx("six_node.jsonl"), "--steps", "20", "--out", ssm}).code == 0);
  CHECK(load_attention_params(ssm).heads == 4);
  CHECK(test::slurp(ssm + ".loss.csv").rfind("step,loss,reward\n", 0) == 0);

  const auto s = run({"sample", "--input", fx("six_node.jsonl"), "--target", "0", "--params", ssm, "--n-max", "3"});
  REQUIRE(s.code == 0);
  const auto j = nlohmann::json::parse(s.out);
  CHECK(j["visited"].size() <= 3);
  CHECK(j["visited"][0] == 0);
  CHECK(run({"sample", "--input", fx("six_node.jsonl"), "--target", "99"}).code == 2);

  const auto osm = (dir / "osm.ckpt").string();
  CHECK(run({"train-osm", "--input", fx("six_node.jsonl"), "--backend", "mock:identity-preferring", "--m", "4",
             "--steps", "10", "--out", osm})
            .code == 0);
  const auto sel = run({"select-order", "--input", fx("six_node.jsonl"), "--params", osm, "--m", "4"});
  CHECK(sel.code == 0);
  std::istringstream lines(sel.out);
  std::string line;
  int count = 0;
  while (std::getline(lines, line)) {
    const auto rec = nlohmann::json::parse(line);
    CHECK(rec["index"].get<int>() < 4);
    ++count;
  }
  CHECK(count == 8);
  // a checkpoint whose width does not match the encoder is rejected
  CHECK(run({"select-order", "--input", fx("six_node.jsonl"), "--params", osm, "--dim", "32"}).code == 2);
}

TEST_CASE("cot-build and bench-order") {
  const auto dir = test::scratch_dir("cli_data");
  const auto sft = (dir / "sft.jsonl").string(), dpo = (dir / "dpo.jsonl").string();
  const auto r = run({"cot-build", "--input", fx("six_node.jsonl"), "--sft-out", sft, "--dpo-out", dpo});
  CHECK(r.code == 0);
  CHECK(r.err.find("records 8") != std::string::npos);
  const auto pairs = test::slurp(dpo);
  CHECK(std::count(pairs.begin(), pairs.end(), '\n') == 8);

  const auto csv = (dir / "bench.csv").string();
  const auto b = run({"bench-order", "--input", fx("six_node.jsonl"), "--backend", "mock:identity-only", "--trials",
                      "10", "--seed", "1", "--out", csv});
  CHECK(b.code == 0);
  const auto stats = nlohmann::json::parse(test::slurp(csv + ".stats.json"));
  CHECK(stats["mean"].get<double>() == 0.0);
  CHECK(stats["trials"] == 10);
  CHECK(test::slurp(csv).rfind("trial,accuracy,errors\n", 0) == 0);
}
