#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "gelato/autocovariance.hpp"
#include "gelato/enhancer.hpp"
#include "gelato/errors.hpp"
#include "gelato/mlp.hpp"
#include "support/oracles.hpp"

using namespace gelato;

namespace {

// Straight-line dense forward pass written from the layer definitions.
double dense_forward(const MlpParams& p, const AttributeMatrix& x, NodeId u, NodeId v) {
  const std::size_t r = x.cols(), h = p.hidden();
  std::vector<double> in(2 * r);
  for (std::size_t k = 0; k < r; ++k) {
    in[k] = x.row(u)[k] + x.row(v)[k];
    in[r + k] = std::abs(x.row(u)[k] - x.row(v)[k]);
  }
  double z = p.b2();
  for (std::size_t j = 0; j < h; ++j) {
    double a = p.b1()[j];
    for (std::size_t k = 0; k < 2 * r; ++k) a += p.w1()[j * 2 * r + k] * in[k];
    z += p.w2()[j] * std::max(a, 0.0);
  }
  return 1.0 / (1.0 + std::exp(-z));
}

MlpParams constant_output(std::size_t r, double prob) {
  MlpParams p(r, 4);
  p.b2() = std::log(prob / (1.0 - prob));
  return p;
}

}  // namespace

TEST_SUITE("enhancer") {
  TEST_CASE("parameter count and zero case") {
    CHECK(MlpParams::count_for(10, 128) == 2 * 10 * 128 + 128 + 128 + 1);
    const MlpParams p(3, 5);
    CHECK(p.size() == MlpParams::count_for(3, 5));
    const AttributeMatrix x(2, 3, std::vector<double>(6, 0.0));
    CHECK(mlp_edge_weight(p, x, {0, 1}) == 0.5);
  }

  TEST_CASE("initialization is seeded and bounded by fan-in") {
    const MlpParams a = MlpParams::init_uniform(6, 8, 1);
    const MlpParams b = MlpParams::init_uniform(6, 8, 1);
    const MlpParams c = MlpParams::init_uniform(6, 8, 2);
    CHECK(std::equal(a.values().begin(), a.values().end(), b.values().begin()));
    CHECK_FALSE(std::equal(a.values().begin(), a.values().end(), c.values().begin()));
    for (double w : a.w1()) CHECK(std::abs(w) <= 1.0 / std::sqrt(12.0));
    for (double w : a.w2()) CHECK(std::abs(w) <= 1.0 / std::sqrt(8.0));
  }

  TEST_CASE("forward matches dense oracle and is symmetric") {
    std::mt19937_64 rng(2);
    const AttributeMatrix x = oracle::random_attributes(rng, 12, 7, 0.3, false);
    const MlpParams p = MlpParams::init_uniform(7, 16, 3);
    for (NodeId u = 0; u < 12; ++u) {
      for (NodeId v = 0; v < 12; ++v) {
        const double w = mlp_edge_weight(p, x, {u, v});
        CHECK(w == doctest::Approx(dense_forward(p, x, u, v)).epsilon(1e-13));
        CHECK(w == mlp_edge_weight(p, x, {v, u}));
        CHECK(w > 0.0);
        CHECK(w < 1.0);
      }
    }
  }

  TEST_CASE("dropout is keyed, inverted, and off in evaluation") {
    std::mt19937_64 rng(4);
    const AttributeMatrix x = oracle::random_attributes(rng, 4, 5);
    const MlpParams p = MlpParams::init_uniform(5, 64, 1);
    PairFeatures f;
    pair_features(x, {0, 1}, f);
    const DropoutSpec d1{true, 0.5, 10};
    const DropoutSpec d2{true, 0.5, 11};
    MlpActivation a, b;
    const double y1 = mlp_forward(p, f, d1, 3, &a);
    CHECK(y1 == mlp_forward(p, f, d1, 3));
    mlp_forward(p, f, d2, 3, &b);
    CHECK(a.scale != b.scale);
    std::size_t kept = 0;
    for (double s : a.scale) {
      CHECK((s == 0.0 || s == 2.0));
      kept += s > 0.0 ? 1 : 0;
    }
    CHECK(kept > 10);
    CHECK(kept < 54);
    CHECK(mlp_forward(p, f, {}, 3) == mlp_edge_weight(p, x, {0, 1}));
  }

  TEST_CASE("checkpoint round trip and format") {
    const MlpParams p = MlpParams::init_uniform(3, 4, 9);
    std::stringstream buf;
    write_checkpoint(buf, p);
    const std::string bytes = buf.str();
    CHECK(bytes.substr(0, 4) == "GPAR");
    CHECK(bytes.size() == 4 + 16 + 8 * p.size());
    const MlpParams q = read_checkpoint(buf);
    CHECK(q.attr_dim() == 3);
    CHECK(q.hidden() == 4);
    CHECK(std::equal(p.values().begin(), p.values().end(), q.values().begin()));
    std::istringstream bad("GPAX");
    CHECK_THROWS_AS(read_checkpoint(bad), DataError);
    std::istringstream cut(bytes.substr(0, bytes.size() - 3));
    CHECK_THROWS_AS(read_checkpoint(cut), DataError);
  }

  TEST_CASE("augmentation count, tie rule and eta=0") {
    const std::vector<Edge> e{{0, 1}, {1, 2}, {2, 3}, {3, 4}};
    const Graph g = Graph::from_edges(6, e, true);
    const AttributeMatrix same(6, 2, std::vector<double>(12, 1.0));
    const Augmentation none = select_augmentation_pairs(same, g, 0.0);
    CHECK(none.pairs.empty());
    const Augmentation two = select_augmentation_pairs(same, g, 0.5);
    REQUIRE(two.pairs.size() == 2);
    CHECK(two.pairs[0] == NodePair{0, 2});
    CHECK(two.pairs[1] == NodePair{0, 3});
    CHECK(two.threshold == doctest::Approx(1.0));
    CHECK_THROWS_AS(select_augmentation_pairs(same, g, 100.0), ConfigError);
  }

  TEST_CASE("property: augmentation equals brute-force top-k") {
    std::mt19937_64 rng(15);
    for (int trial = 0; trial < 15; ++trial) {
      const NodeId n = 12 + static_cast<NodeId>(trial);
      const Graph g = oracle::random_graph(rng, n, 0.15, false, false);
      // Quantized attributes produce many cosine ties.
      std::vector<double> vals(n * 3);
      for (double& v : vals) v = static_cast<double>(rng() % 3);
      const AttributeMatrix x(n, 3, vals);
      const double eta = 0.3 + 0.1 * (trial % 5);
      const auto got = select_augmentation_pairs(x, g, eta, 1 + trial % 3);

      std::vector<std::pair<double, NodePair>> cand;
      for (NodeId u = 0; u < n; ++u) {
        for (NodeId v = u + 1; v < n; ++v) {
          if (!g.has_arc(u, v)) cand.push_back({cosine_similarity(x, {u, v}), {u, v}});
        }
      }
      std::sort(cand.begin(), cand.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
      });
      // eta * m that is integral up to rounding counts as integral
      const auto k =
          static_cast<std::size_t>(std::ceil(eta * static_cast<double>(g.num_edges()) - 1e-9));
      std::vector<NodePair> want;
      for (std::size_t i = 0; i < k; ++i) want.push_back(cand[i].second);
      std::sort(want.begin(), want.end());
      CHECK(got.pairs == want);
    }
  }

  TEST_CASE("weighted combination examples") {
    // x_0 = (1, 0), x_1 = (0.8, 0.6): cosine 0.8
    const AttributeMatrix x(3, 2, {1.0, 0.0, 0.8, 0.6, 0.0, 1.0});
    const std::vector<Edge> e{{0, 1}};
    const Graph structure = Graph::from_edges(3, e, true);
    const MlpParams p = constant_output(2, 0.6);

    EnhancerConfig cfg;
    cfg.alpha = 0.5;
    cfg.beta = 0.5;
    const EnhancedGraph eg = build_enhanced_graph(structure, x, p, cfg, {});
    REQUIRE(eg.pairs.size() == 1);
    CHECK(eg.weight[0] == doctest::Approx(0.85).epsilon(1e-14));
    CHECK(eg.graph.weight(0, 1) == doctest::Approx(0.85).epsilon(1e-14));

    cfg.alpha = 0.0;
    cfg.beta = 1.0;
    const EnhancedGraph mlp_only = build_enhanced_graph(structure, x, p, cfg, {});
    CHECK(mlp_only.weight[0] == doctest::Approx(0.6).epsilon(1e-14));

    cfg.alpha = 1.0;
    const std::vector<NodePair> added{{0, 2}};
    const EnhancedGraph topo = build_enhanced_graph(structure, x, p, cfg, added);
    CHECK(topo.num_added == 1);
    CHECK(topo.graph.weight(0, 1) == 1.0);
    CHECK_FALSE(topo.graph.has_arc(0, 2));  // weight 0 dropped
    CHECK(topo.graph.degree(2) == 1.0);     // self-loop only
  }

  TEST_CASE("negative cosine is clamped to zero") {
    const AttributeMatrix x(2, 1, {1.0, -1.0});
    const std::vector<NodePair> added{{0, 1}};
    EnhancerConfig cfg;
    cfg.alpha = 0.0;
    cfg.beta = 0.0;
    const EnhancedGraph eg =
        build_enhanced_graph(Graph::from_edges(2, {}, true), x, MlpParams(), cfg, added);
    CHECK(eg.clamped[0] == 1);
    CHECK(eg.weight[0] == 0.0);
    CHECK_FALSE(eg.graph.has_arc(0, 1));
  }

  TEST_CASE("isolated-only self-loops follow the final weights") {
    const AttributeMatrix x(3, 1, {1.0, -1.0, 1.0});
    const std::vector<Edge> e{{0, 2}};
    const std::vector<NodePair> added{{0, 1}};
    EnhancerConfig cfg;
    cfg.alpha = 0.0;
    cfg.beta = 0.0;
    cfg.self_loop_mode = SelfLoopMode::kIsolatedOnly;
    const EnhancedGraph eg =
        build_enhanced_graph(Graph::from_edges(3, e, true), x, MlpParams(), cfg, added);
    CHECK(eg.graph.has_arc(1, 1));
    CHECK_FALSE(eg.graph.has_arc(0, 0));
    CHECK(eg.graph.weight(0, 2) == 1.0);
  }

  TEST_CASE("property: enhanced graph is symmetric, nonnegative, and alpha=1 reproduces AC") {
    std::mt19937_64 rng(6);
    for (int trial = 0; trial < 15; ++trial) {
      const Graph g = oracle::random_graph(rng, 20, 0.2, true, false);
      const AttributeMatrix x = oracle::random_attributes(rng, 20, 4, 0.3, false);
      const MlpParams p = MlpParams::init_uniform(4, 8, static_cast<std::uint64_t>(trial));
      const auto added = select_augmentation_pairs(x, g, 0.5).pairs;
      EnhancerConfig cfg;
      const EnhancedGraph eg = build_enhanced_graph(g, x, p, cfg, added);
      for (double w : eg.graph.weights()) CHECK(w >= 0.0);
      for (NodeId u = 0; u < 20; ++u) {
        for (NodeId v : eg.graph.neighbors(u)) CHECK(eg.graph.weight(u, v) == eg.graph.weight(v, u));
      }

      cfg.alpha = 1.0;
      const EnhancedGraph topo = build_enhanced_graph(g, x, p, cfg, added);
      const Graph raw = add_self_loops(g, SelfLoopMode::kAll, 1.0);
      std::vector<double> a(20), b(20);
      for (NodeId u = 0; u < 20; ++u) {
        Autocovariance(topo.graph, {3}).row(u, a);
        Autocovariance(raw, {3}).row(u, b);
        for (NodeId v = 0; v < 20; ++v) CHECK(a[v] == doctest::Approx(b[v]).epsilon(1e-14));
      }
    }
  }
}
