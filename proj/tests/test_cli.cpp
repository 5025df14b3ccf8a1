#include <doctest.h>

#include <unistd.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "gelato/autocovariance.hpp"
#include "gelato/cli/commands.hpp"
#include "gelato/cli/config.hpp"
#include "gelato/errors.hpp"
#include "gelato/graph_io.hpp"
#include "gelato/local_heuristics.hpp"
#include "gelato/text_format.hpp"
#include "support/oracles.hpp"
#include "support/sbm.hpp"

using namespace gelato;
using namespace gelato::cli;
namespace fs = std::filesystem;

namespace {

struct Workspace {
  fs::path dir;
  Workspace() {
    static int counter = 0;
    dir = fs::temp_directory_path() /
          ("gelato_cli_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::create_directories(dir);
    const sbm::Dataset d = sbm::make(40, 0.3, 0.03, 6, 8);
    std::ofstream e(path("g.txt"));
    write_edge_list(e, d.g);
    std::ofstream x(path("x.csv"));
    write_attributes_csv(x, d.x);
  }
  ~Workspace() { fs::remove_all(dir); }
  std::string path(const std::string& name) const { return (dir / name).string(); }
};

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run_cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("config round trip is the identity") {
    ExperimentConfig c;
    c.edges = "/data/edges.txt";
    c.mode = Mode::kHeuristic;
    c.heuristic = HeuristicKind::kRa;
    c.ratios = {0.7, 0.1, 0.2};
    c.enhancer.alpha = 0.123456789;
    c.enhancer.self_loop_mode = SelfLoopMode::kIsolatedOnly;
    c.trainer.loss = LossKind::kBce;
    c.trainer.regime = Regime::kBiased;
    c.trainer.lr = 1.0 / 3.0;
    c.prec = {0.25, 0.5};
    c.hits = {7};
    c.export_nodes = {3, 1, 4};
    c.workers = 2;
    std::ostringstream once;
    write_config(once, c);
    std::istringstream in(once.str());
    const ExperimentConfig back = parse_config(in);
    CHECK(back == c);
    std::ostringstream twice;
    write_config(twice, back);
    CHECK(twice.str() == once.str());

    std::istringstream defaults_text("");
    CHECK(parse_config(defaults_text) == ExperimentConfig{});
  }

  TEST_CASE("config parse errors") {
    std::istringstream unknown("nonsense = 1\n");
    CHECK_THROWS_AS(parse_config(unknown), ConfigError);
    std::istringstream noeq("alpha 0.5\n");
    CHECK_THROWS_AS(parse_config(noeq), ConfigError);
    std::istringstream bad_mode("mode = heuristic:xyz\n");
    CHECK_THROWS_AS(parse_config(bad_mode), ConfigError);
    std::istringstream bad_num("epochs = -3\n");
    CHECK_THROWS_AS(parse_config(bad_num), ConfigError);
    std::istringstream comment("# header\nalpha = 0.25  # inline\n\n");
    CHECK(parse_config(comment).enhancer.alpha == 0.25);
  }

  TEST_CASE("split: deterministic bytes, counts, bad ratios") {
    Workspace ws;
    const Result a = run_cli({"split", "--edges", ws.path("g.txt"), "--split", ws.path("a.txt"),
                              "--split-seed", "4"});
    REQUIRE(a.code == 0);
    CHECK(a.out.find("train ") != std::string::npos);
    CHECK(a.out.find("pool_test ") != std::string::npos);
    run_cli({"split", "--edges", ws.path("g.txt"), "--split", ws.path("b.txt"), "--split-seed", "4"});
    CHECK(slurp(ws.path("a.txt")) == slurp(ws.path("b.txt")));

    const Result bad = run_cli({"split", "--edges", ws.path("g.txt"), "--split", ws.path("c.txt"),
                                "--ratio-train", "0.75"});
    CHECK(bad.code == kExitConfig);
    const Result missing = run_cli({"split", "--edges", ws.path("none.txt"), "--split", ws.path("c.txt")});
    CHECK(missing.code == kExitData);
    CHECK(run_cli({"split", "--no-such-flag"}).code == kExitConfig);
  }

  TEST_CASE("overflowing weights are a numeric error") {
    Workspace ws;
    {
      std::ofstream e(ws.path("big.txt"));
      for (const auto& [u, v] : std::vector<std::pair<int, int>>{
               {0, 1}, {1, 2}, {2, 3}, {3, 0}, {0, 2}, {1, 3}, {3, 4}, {4, 5}, {5, 0}, {2, 5}}) {
        e << u << ' ' << v << " 1e308\n";
      }
    }
    REQUIRE(run_cli({"split", "--edges", ws.path("big.txt"), "--split", ws.path("s.txt")}).code == 0);
    const Result r = run_cli({"baseline", "--mode", "ac-only", "--edges", ws.path("big.txt"),
                              "--split", ws.path("s.txt")});
    CHECK(r.code == kExitNumeric);
  }

  TEST_CASE("flags override the config file") {
    Workspace ws;
    {
      std::ofstream cfg(ws.path("exp.cfg"));
      cfg << "edges = " << ws.path("g.txt") << "\nsplit = " << ws.path("s.txt")
          << "\nsplit_seed = 1\n";
    }
    run_cli({"--config", ws.path("exp.cfg"), "split", "--split-seed", "9", "--write-config",
             ws.path("eff.cfg")});
    const ExperimentConfig eff = load_config(ws.path("eff.cfg"));
    CHECK(eff.split_seed == 9);
    CHECK(eff.edges == ws.path("g.txt"));
  }

  TEST_CASE("eval heuristic:cn matches a hand-sorted ranking; list flags") {
    Workspace ws;
    run_cli({"split", "--edges", ws.path("g.txt"), "--split", ws.path("s.txt")});
    const Result r = run_cli({"baseline", "--edges", ws.path("g.txt"), "--split", ws.path("s.txt"),
                              "--mode", "heuristic:cn", "--hits", "100", "1000", "--prec", "0.25",
                              "0.5", "1.0", "--pr-csv", ws.path("pr.csv")});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("hits@100 ") != std::string::npos);
    CHECK(r.out.find("hits@1000 ") != std::string::npos);
    CHECK(r.out.find("prec@25% ") != std::string::npos);
    CHECK(r.out.find("prec@50% ") != std::string::npos);
    CHECK(r.out.find("prec@100% ") != std::string::npos);
    CHECK(slurp(ws.path("pr.csv")).rfind("recall,precision\n", 0) == 0);

    // Oracle: CN on the train+valid graph, test pool enumerated and sorted.
    std::ifstream gs(ws.path("g.txt"));
    const Graph g = read_edge_list(gs);
    std::ifstream ss(ws.path("s.txt"));
    const EdgeSplit split = read_split(ss);
    std::vector<Edge> obs;
    for (const NodePair& p : split.train_pos) obs.push_back({p.u, p.v, 1.0});
    for (const NodePair& p : split.valid_pos) obs.push_back({p.u, p.v, 1.0});
    const Graph og = Graph::from_edges(g.num_nodes(), obs, true);
    std::vector<double> pos, neg;
    for (const NodePair& p : split.test_pos) pos.push_back(local_heuristic(LocalHeuristic::kCommonNeighbors, og, p));
    for (NodeId u = 0; u < g.num_nodes(); ++u) {
      for (NodeId v = u + 1; v < g.num_nodes(); ++v) {
        if (!g.has_arc(u, v)) neg.push_back(local_heuristic(LocalHeuristic::kCommonNeighbors, og, {u, v}));
      }
    }
    const auto b = oracle::brute_force_metrics(pos, neg, {1.0}, {100});
    std::ostringstream ap;
    ap << "ap " << text::format_double(b.ap) << '\n';
    CHECK(r.out.find(ap.str()) != std::string::npos);
    std::ostringstream auc_line;
    auc_line << "auc " << text::format_double(b.auc) << '\n';
    CHECK(r.out.find(auc_line.str()) != std::string::npos);
  }

  TEST_CASE("train/eval for trained and untrained modes") {
    Workspace ws;
    run_cli({"split", "--edges", ws.path("g.txt"), "--split", ws.path("s.txt")});
    const std::vector<std::string> common{"--edges", ws.path("g.txt"), "--attributes",
                                          ws.path("x.csv"), "--split", ws.path("s.txt"),
                                          "--workers", "1"};
    auto with = [&](std::vector<std::string> head) {
      head.insert(head.end(), common.begin(), common.end());
      return head;
    };

    const Result ac = run_cli(with({"train", "--mode", "ac-only", "--checkpoint", ws.path("none.bin")}));
    CHECK(ac.code == 0);
    CHECK(ac.out.find("no checkpoint written") != std::string::npos);
    CHECK_FALSE(fs::exists(ws.path("none.bin")));

    const Result missing = run_cli(with({"eval", "--mode", "gelato", "--checkpoint", ws.path("absent.bin")}));
    CHECK(missing.code == kExitConfig);

    const Result tr = run_cli(with({"train", "--epochs", "2", "--hidden", "8", "--checkpoint",
                                    ws.path("c.bin"), "--history", ws.path("h.txt")}));
    REQUIRE(tr.code == 0);
    CHECK(tr.out.find("skipped_batches 0") != std::string::npos);
    CHECK(slurp(ws.path("h.txt")).rfind("# epoch loss valid_prec skipped\n", 0) == 0);

    const Result ev = run_cli(with({"eval", "--hidden", "8", "--checkpoint", ws.path("c.bin")}));
    REQUIRE(ev.code == 0);
    CHECK(ev.out.find("protocol unbiased") != std::string::npos);

    const Result biased = run_cli(with({"eval", "--hidden", "8", "--checkpoint", ws.path("c.bin"),
                                        "--biased-neg-per-pos", "1"}));
    REQUIRE(biased.code == 0);
    CHECK(biased.out.find("# BIASED") != std::string::npos);
    CHECK(biased.err.find("BIASED") != std::string::npos);

    for (const char* mode : {"mlp-only", "mlp-ac-two-stage"}) {
      const Result t = run_cli(with({"train", "--mode", mode, "--epochs", "1", "--hidden", "8",
                                     "--checkpoint", ws.path("m.bin")}));
      CHECK(t.code == 0);
      CHECK(run_cli(with({"eval", "--mode", mode, "--checkpoint", ws.path("m.bin")})).code == 0);
    }
    for (const char* mode : {"cos-ac", "heuristic:aa", "heuristic:ra", "heuristic:cos", "ac-only"}) {
      CHECK(run_cli(with({"baseline", "--mode", mode})).code == 0);
    }
    CHECK(run_cli(with({"baseline", "--mode", "gelato"})).code == kExitConfig);
  }

  TEST_CASE("export-scores") {
    Workspace ws;
    run_cli({"split", "--edges", ws.path("g.txt"), "--split", ws.path("s.txt")});
    const std::vector<std::string> base{"export-scores", "--edges", ws.path("g.txt"), "--split",
                                        ws.path("s.txt"), "--mode", "ac-only"};
    auto with = [&](std::vector<std::string> tail) {
      std::vector<std::string> a = base;
      a.insert(a.end(), tail.begin(), tail.end());
      return a;
    };
    REQUIRE(run_cli(with({"--export-nodes", "5", "--scores-csv", ws.path("one.csv"),
                          "--weights-csv", ws.path("w.csv")}))
                .code == 0);
    const std::string one = slurp(ws.path("one.csv"));
    CHECK(std::count(one.begin(), one.end(), '\n') == 1);
    CHECK(std::count(one.begin(), one.end(), ',') == 39);
    CHECK(slurp(ws.path("w.csv")).rfind("u,v,weight\n", 0) == 0);

    run_cli(with({"--export-nodes", "5", "--scores-csv", ws.path("again.csv")}));
    CHECK(slurp(ws.path("again.csv")) == one);

    // Values equal the autocovariance rows of the observed graph with self-loops.
    std::ifstream gs(ws.path("g.txt"));
    const Graph g = read_edge_list(gs);
    std::ifstream ss(ws.path("s.txt"));
    const EdgeSplit split = read_split(ss);
    std::vector<Edge> obs;
    for (const NodePair& p : split.train_pos) obs.push_back({p.u, p.v, 1.0});
    for (const NodePair& p : split.valid_pos) obs.push_back({p.u, p.v, 1.0});
    const Graph og = add_self_loops(Graph::from_edges(g.num_nodes(), obs, true), SelfLoopMode::kAll);
    const std::vector<NodeId> src{5};
    const ScoreBlock block = autocovariance_rows(og, src, {3});
    std::string want;
    for (NodeId v = 0; v < g.num_nodes(); ++v) {
      if (v) want += ',';
      want += text::format_double(block.row(0)[v]);
    }
    CHECK(one == want + "\n");

    CHECK(run_cli(with({"--export-nodes", "1", "2", "3", "--export-max-nodes", "2"})).code ==
          kExitConfig);
    CHECK(run_cli(with({"--export-nodes", "400"})).code == kExitData);
  }
}
