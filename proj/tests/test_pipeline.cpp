#include <doctest.h>

#include <sstream>

#include "fixtures.hpp"
#include "kgcoref/cli.hpp"
#include "kgcoref/error.hpp"
#include "kgcoref/io.hpp"
#include "kgcoref/pipeline.hpp"

using namespace kgcoref;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome cli_run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

// Synthetic inputs in a temp dir plus a config pointing at them.
struct Workspace {
  testing::TempDir dir{"pipeline"};
  PipelineConfig config;

  explicit Workspace(double ambiguity = 0.0, std::uint64_t seed = 1) {
    SyntheticParams p;
    p.seed = seed;
    p.ambiguity_rate = ambiguity;
    cmd_synth(p, dir / "data");
    config.graph = (dir / "data/graph.json").string();
    config.corpus = (dir / "data/corpus.jsonl").string();
    config.out = (dir / "out").string();
  }
};

}  // namespace

TEST_CASE("config keys parse and validate") {
  PipelineConfig c;
  c.set("theta", "0.25");
  c.set("max-iter", " 7 ");
  c.set("update-rule", "damped");
  c.set("dump-states", "true");
  CHECK(c.theta == 0.25);
  CHECK(c.max_iter == 7);
  CHECK(c.rule == kernels::UpdateRule::kDamped);
  CHECK(c.dump_states);
  CHECK_THROWS_AS(c.set("theta", "abc"), InputError);
  CHECK_THROWS_AS(c.set("dim", "-3"), InputError);
  CHECK_THROWS_AS(c.set("colour", "red"), InputError);
  CHECK_THROWS_AS(c.set("provider", "magic"), InputError);

  for (auto [key, value] : std::vector<std::pair<std::string, std::string>>{
           {"theta", "1.5"}, {"lambda", "-0.1"}, {"alpha", "2"}, {"epsilon", "0"},
           {"max-iter", "0"}, {"dim", "0"}, {"window", "0"}, {"gain", "0"},
           {"provider", "file"}}) {
    PipelineConfig bad;
    bad.set(key, value);
    CHECK_THROWS_AS(bad.validate(), InputError);
  }
  PipelineConfig ok;
  CHECK_NOTHROW(ok.validate());
}

TEST_CASE("config echo round trips through set") {
  PipelineConfig c;
  c.theta = 0.1;
  c.lambda = 1.0 / 3.0;
  c.epsilon = 1e-7;
  c.seed = 99;
  PipelineConfig back;
  for (const auto& [k, v] : c.echo()) back.set(k, v);
  CHECK(back.echo() == c.echo());
  CHECK(back.lambda == c.lambda);
  CHECK(c.echo().at("theta") == "0.1");
  CHECK(c.echo().count("threads") == 0);
  CHECK(c.echo().count("out") == 0);
}

TEST_CASE("config files") {
  testing::TempDir dir("cfg");
  write_file(dir / "a.cfg", "# run\ntheta = 0.3\n\nwindow=4  # narrow\n");
  PipelineConfig c;
  apply_config_file(dir / "a.cfg", c);
  CHECK(c.theta == 0.3);
  CHECK(c.window == 4);

  write_file(dir / "b.cfg", "theta 0.3\n");
  CHECK_THROWS_WITH_AS(apply_config_file(dir / "b.cfg", c), doctest::Contains("b.cfg:1"),
                       InputError);
  write_file(dir / "c.json", R"({"config":{"theta":"0.7","dim":"32"}})");
  apply_config_file(dir / "c.json", c);
  CHECK(c.theta == 0.7);
  CHECK(c.dimension == 32);
  write_file(dir / "d.json", R"({"gain":3})");
  apply_config_file(dir / "d.json", c);
  CHECK(c.gain == 3.0);
}

TEST_CASE("link writes parseable outputs") {
  Workspace ws;
  cmd_link(ws.config);
  const fs::path out = ws.config.out;
  CHECK(fs::exists(out / "links.jsonl"));
  const auto clusters = nlohmann::json::parse(read_file(out / "clusters.json"));
  CHECK(clusters["clusters"].is_array());
  std::istringstream lines(read_file(out / "links.jsonl"));
  std::string line;
  std::size_t count = 0;
  while (std::getline(lines, line)) {
    const auto j = nlohmann::json::parse(line);
    CHECK(j.contains("likelihood"));
    ++count;
  }
  CHECK(count == 100);
  CHECK_FALSE(fs::exists(out / "states"));
}

TEST_CASE("state dumps hold one vector file per step") {
  Workspace ws;
  ws.config.dump_states = true;
  cmd_link(ws.config);
  const fs::path states = fs::path(ws.config.out) / "states";
  REQUIRE(fs::exists(states / "round0_iter1.vec"));
  const auto table = load_vectors(states / "round0_iter1.vec", ws.config.dimension);
  CHECK(table.size() == 50);
  CHECK(table.count("entity:e0000") == 1);
}

TEST_CASE("zero propagation rounds equals plain linking") {
  Workspace ws(0.5);
  ws.config.rounds = 0;
  const auto run = run_link(ws.config);
  const auto provider = EmbeddingProvider::hashed(ws.config.provider_settings());
  const auto plain = filter_links(
      link_all(build_score_matrix(run.corpus.mentions, run.graph,
                                  provider.embed_entities(run.graph), provider),
               ws.config.gain),
      ws.config.theta);
  CHECK(links_to_jsonl(run.result.decisions) == links_to_jsonl(plain));
}

TEST_CASE("eval on a separable corpus is perfect and repeatable") {
  Workspace ws;
  const auto report = cmd_eval(ws.config);
  CHECK(report.linking.f1 == 1.0);
  CHECK(report.pairs.f1 == 1.0);
  const std::string first = read_file(fs::path(ws.config.out) / "report.json");
  cmd_eval(ws.config);
  CHECK(read_file(fs::path(ws.config.out) / "report.json") == first);

  // Re-running from the echoed config reproduces the report.
  PipelineConfig again;
  apply_config_file(fs::path(ws.config.out) / "report.json", again);
  again.out = (ws.dir / "again").string();
  cmd_eval(again);
  CHECK(read_file(fs::path(again.out) / "report.json") == first);
}

TEST_CASE("eval without gold fails and leaves nothing behind") {
  Workspace ws;
  write_file(ws.dir / "plain.jsonl", "{\"doc_id\":\"d\",\"text\":\"nothing to see\"}\n");
  ws.config.corpus = (ws.dir / "plain.jsonl").string();
  CHECK_THROWS_WITH_AS(cmd_eval(ws.config), doctest::Contains("gold"), InputError);
  CHECK_FALSE(fs::exists(ws.config.out));
}

TEST_CASE("sweep reuses one scoring pass") {
  Workspace ws(0.5);
  std::vector<double> thetas;
  for (int i = 0; i <= 10; ++i) thetas.push_back(i / 10.0);
  const auto reports = cmd_sweep(ws.config, thetas);
  REQUIRE(reports.size() == 11);
  for (std::size_t i = 1; i < reports.size(); ++i) {
    CHECK(reports[i].linking.recall <= reports[i - 1].linking.recall);
  }
  CHECK(reports.back().linking.recall == 0.0);
  const auto summary = nlohmann::json::parse(
      read_file(fs::path(ws.config.out) / "sweep_summary.json"));
  CHECK(summary["rows"].size() == 11);

  // A single-theta sweep matches eval at that theta.
  PipelineConfig at = ws.config;
  at.theta = 0.7;
  at.out = (ws.dir / "eval").string();
  cmd_eval(at);
  PipelineConfig sw = ws.config;
  sw.out = (ws.dir / "single").string();
  const std::vector<double> one{0.7};
  cmd_sweep(sw, one);
  CHECK(read_file(fs::path(sw.out) / "theta_0.700/report.json") ==
        read_file(fs::path(at.out) / "report.json"));

  const std::vector<double> bad{0.5, 1.2};
  sw.out = (ws.dir / "bad").string();
  CHECK_THROWS_AS(cmd_sweep(sw, bad), InputError);
  CHECK_THROWS_AS(cmd_sweep(sw, std::vector<double>{}), InputError);
}

TEST_CASE("synth files parse back cleanly") {
  testing::TempDir dir("synth");
  SyntheticParams p;
  cmd_synth(p, dir / "a");
  cmd_synth(p, dir / "b");
  for (const char* f : {"graph.json", "corpus.jsonl", "gold.jsonl"}) {
    CHECK(read_file(dir / "a" / f) == read_file(dir / "b" / f));
  }
  const auto g = load_graph(dir / "a/graph.json");
  CHECK(validate(g).empty());
  const auto c = load_corpus(dir / "a/corpus.jsonl");
  CHECK(gold_from_corpus(c, g).assignments.size() == 100);
}

TEST_CASE("inspect summarizes inputs") {
  Workspace ws;
  const auto text = cmd_inspect(ws.config.graph, ws.config.corpus);
  CHECK(text.find("entities:   50") != std::string::npos);
  CHECK(text.find("violations: 0") != std::string::npos);
  CHECK(text.find("mentions:   100") != std::string::npos);
  CHECK_THROWS_AS(cmd_inspect("", ""), InputError);
}

TEST_CASE("cli exit codes") {
  Workspace ws;
  auto r = cli_run({"link", "--graph", "/missing/graph.json", "--corpus", ws.config.corpus,
                    "--out", ws.config.out});
  CHECK(r.code == 1);
  CHECK(r.err.find("/missing/graph.json") != std::string::npos);
  CHECK_FALSE(fs::exists(ws.config.out));

  r = cli_run({"eval", "--graph", ws.config.graph, "--corpus", ws.config.corpus, "--theta", "2",
               "--out", ws.config.out});
  CHECK(r.code == 1);
  r = cli_run({"link", "--bogus"});
  CHECK(r.code == 1);
  r = cli_run({});
  CHECK(r.code == 1);
  r = cli_run({"--help"});
  CHECK(r.code == 0);
  CHECK(r.out.find("sweep") != std::string::npos);

  r = cli_run({"eval", "--graph", ws.config.graph, "--corpus", ws.config.corpus, "--out",
               ws.config.out, "--threads", "1"});
  CHECK(r.code == 0);
  CHECK(r.out.find("F1=1.000000") != std::string::npos);
}

TEST_CASE("cli flags override the config file") {
  Workspace ws;
  write_file(ws.dir / "run.cfg", "graph = " + ws.config.graph + "\ncorpus = " +
                                      ws.config.corpus + "\ntheta = 0.2\ngain = 4\n");
  const auto r = cli_run({"eval", "--config", (ws.dir / "run.cfg").string(), "--theta", "0.6",
                          "--out", ws.config.out});
  REQUIRE(r.code == 0);
  const auto report = nlohmann::json::parse(read_file(fs::path(ws.config.out) / "report.json"));
  CHECK(report["config"]["theta"] == "0.6");
  CHECK(report["config"]["gain"] == "4");
}

TEST_CASE("cli synth, sweep and inspect") {
  testing::TempDir dir("cli");
  auto r = cli_run({"synth", "--seed", "3", "--ambiguity", "0.5", "--out", (dir / "d").string()});
  REQUIRE(r.code == 0);
  r = cli_run({"sweep", "--graph", (dir / "d/graph.json").string(), "--corpus",
               (dir / "d/corpus.jsonl").string(), "--thetas", "0.2,0.9", "--out",
               (dir / "s").string()});
  REQUIRE(r.code == 0);
  CHECK(fs::exists(dir / "s/theta_0.200/report.md"));
  CHECK(fs::exists(dir / "s/sweep_summary.md"));
  r = cli_run({"sweep", "--graph", (dir / "d/graph.json").string(), "--corpus",
               (dir / "d/corpus.jsonl").string(), "--thetas", "0.2,x"});
  CHECK(r.code == 1);
  r = cli_run({"inspect", "--graph", (dir / "d/graph.json").string()});
  CHECK(r.code == 0);
  CHECK(r.out.find("relations:") != std::string::npos);
  r = cli_run({"synth", "--entities", "1", "--out", (dir / "e").string()});
  CHECK(r.code == 1);
}
