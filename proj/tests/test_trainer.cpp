#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "gelato/adam.hpp"
#include "gelato/errors.hpp"
#include "gelato/losses.hpp"
#include "gelato/trainer.hpp"
#include "support/gradcheck.hpp"
#include "support/sbm.hpp"

using namespace gelato;

TEST_SUITE("losses") {
  TEST_CASE("npair examples") {
    const std::vector<double> zero{0.0};
    CHECK(npair_loss(zero, {{0.0}}) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
    CHECK(npair_loss(zero, {{}}) == 0.0);
    const std::vector<double> ten{10.0};
    CHECK(npair_loss(ten, {{0.0}}) == doctest::Approx(std::log1p(std::exp(-10.0))).epsilon(1e-12));
    CHECK(npair_loss(ten, {{0.0}}) == doctest::Approx(4.54e-5).epsilon(1e-3));
    // Overflow-safe at large magnitudes.
    const std::vector<double> huge{1000.0};
    CHECK(std::isfinite(npair_loss(huge, {{1000.0, -1000.0}})));
    CHECK_THROWS_AS(npair_loss(zero, {}), ConfigError);
  }

  TEST_CASE("property: npair shift invariance") {
    std::mt19937_64 rng(1);
    std::normal_distribution<double> nd(0.0, 3.0);
    for (int trial = 0; trial < 50; ++trial) {
      const std::vector<double> pos{nd(rng)};
      std::vector<double> neg(1 + trial % 7);
      for (double& x : neg) x = nd(rng);
      const double c = nd(rng) * 10.0;
      std::vector<double> pos2{pos[0] + c};
      std::vector<double> neg2 = neg;
      for (double& x : neg2) x += c;
      CHECK(npair_loss(pos, {neg}) == doctest::Approx(npair_loss(pos2, {neg2})).epsilon(1e-10));
    }
  }

  TEST_CASE("bce examples") {
    const std::vector<double> s{0.0};
    const std::vector<double> one{1.0};
    CHECK(bce_loss(s, one) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
    const std::vector<double> sep{50.0, -50.0};
    const std::vector<double> lab{1.0, 0.0};
    CHECK(bce_loss(sep, lab) < 1e-20);
    // all labels 1, all probabilities p: loss = -ln p
    const std::vector<double> three{0.7, 0.7, 0.7};
    const std::vector<double> ones{1.0, 1.0, 1.0};
    const double p = 1.0 / (1.0 + std::exp(-0.7));
    CHECK(bce_loss(three, ones) == doctest::Approx(-std::log(p)).epsilon(1e-14));
    const std::vector<double> bad{0.5};
    CHECK_THROWS_AS(bce_loss(s, bad), ConfigError);
  }

  TEST_CASE("standardization examples") {
    const std::vector<double> a{1.0, 2.0, 3.0};
    const auto z = standardize_scores(a);
    CHECK(z[0] == doctest::Approx(-std::sqrt(1.5)).epsilon(1e-14));
    CHECK(z[1] == 0.0);
    CHECK(z[2] == doctest::Approx(std::sqrt(1.5)).epsilon(1e-14));
    const std::vector<double> c{4.0, 4.0, 4.0};
    for (double x : standardize_scores(c)) CHECK(x == 0.0);
    const std::vector<double> one{7.0};
    CHECK(standardize_scores(one)[0] == 0.0);
  }

  TEST_CASE("standardization backward matches finite differences") {
    std::mt19937_64 rng(2);
    std::normal_distribution<double> nd;
    std::vector<double> s(6), w(6);
    for (double& x : s) x = nd(rng);
    for (double& x : w) x = nd(rng);
    const auto f = [&](const std::vector<double>& v) {
      const auto z = standardize_scores(v);
      double acc = 0.0;
      for (std::size_t i = 0; i < v.size(); ++i) acc += w[i] * z[i] * z[i] * 0.5 + w[i] * z[i];
      return acc;
    };
    const auto z = standardize_scores(s);
    std::vector<double> gz(6);
    for (std::size_t i = 0; i < 6; ++i) gz[i] = w[i] * z[i] + w[i];
    const auto gs = standardize_backward(s, z, gz);
    for (std::size_t i = 0; i < 6; ++i) {
      auto sp = s, sm = s;
      sp[i] += 1e-6;
      sm[i] -= 1e-6;
      CHECK(gs[i] == doctest::Approx((f(sp) - f(sm)) / 2e-6).epsilon(1e-6));
    }
  }
}

TEST_SUITE("adam") {
  TEST_CASE("zero gradient leaves parameters unchanged") {
    AdamState st(3);
    std::vector<double> p{1.0, -2.0, 3.0};
    const std::vector<double> g(3, 0.0);
    adam_update(st, p, g, 0.1);
    CHECK(p == std::vector<double>{1.0, -2.0, 3.0});
  }

  TEST_CASE("first step moves by about lr against the gradient sign") {
    AdamState st(2);
    std::vector<double> p{0.0, 0.0};
    const std::vector<double> g{3.0, -0.25};
    adam_update(st, p, g, 0.001);
    CHECK(p[0] == doctest::Approx(-0.001).epsilon(1e-6));
    CHECK(p[1] == doctest::Approx(0.001).epsilon(1e-6));
  }

  TEST_CASE("descends a convex quadratic") {
    AdamState st(2);
    std::vector<double> p{2.0, -1.0};
    const auto f = [](const std::vector<double>& x) { return x[0] * x[0] + 3.0 * x[1] * x[1]; };
    double prev = f(p);
    for (int i = 0; i < 20; ++i) {
      const std::vector<double> g{2.0 * p[0], 6.0 * p[1]};
      adam_update(st, p, g, 0.01);
      const double cur = f(p);
      CHECK(cur < prev);
      prev = cur;
    }
  }

  TEST_CASE("shape mismatch") {
    AdamState st(2);
    std::vector<double> p(3, 0.0);
    const std::vector<double> g(3, 0.0);
    CHECK_THROWS_AS(adam_update(st, p, g, 0.1), ConfigError);
  }
}

TEST_SUITE("trainer") {
  TEST_CASE("gradients match finite differences") {
    for (std::uint64_t seed = 100; seed < 110; ++seed) {
      gradcheck::Instance in = gradcheck::make_instance(seed);
      const auto rep = gradcheck::check(in);
      CHECK(rep.valid);
      CHECK(rep.max_abs_grad > 0.0);
      CHECK(rep.max_rel_err < 1e-4);
    }
  }

  TEST_CASE("mlp-direct gradients match finite differences") {
    for (std::uint64_t seed = 200; seed < 204; ++seed) {
      gradcheck::Instance in = gradcheck::make_instance(seed);
      in.cfg.score_source = ScoreSource::kMlpDirect;
      const auto rep = gradcheck::check(in);
      CHECK(rep.max_rel_err < 1e-4);
    }
  }

  TEST_CASE("alpha = 1 gives exactly zero gradients and cannot be trained") {
    gradcheck::Instance in = gradcheck::make_instance(7);
    in.ctx.enhancer.alpha = 1.0;
    gradcheck::bind(in);
    const GradientResult g = compute_gradients(in.ctx, in.params, in.head, in.cfg, in.batch);
    for (double x : g.grads) CHECK(x == 0.0);
    TrainConfig tc = in.cfg;
    tc.epochs = 1;
    CHECK_THROWS_AS(train(in.ctx, in.params, tc), ConfigError);
    in.ctx.enhancer.alpha = 0.5;
    in.ctx.enhancer.beta = 0.0;
    CHECK_THROWS_AS(train(in.ctx, in.params, tc), ConfigError);
  }

  TEST_CASE("duplicated batch doubles loss and gradients") {
    gradcheck::Instance in = gradcheck::make_instance(11);
    in.cfg.loss = LossKind::kNPair;
    gradcheck::bind(in);
    const GradientResult once = compute_gradients(in.ctx, in.params, in.head, in.cfg, in.batch);
    MaskedBatch twice = in.batch;
    const std::size_t np = in.batch.batch_pos.size();
    twice.batch_pos.insert(twice.batch_pos.end(), in.batch.batch_pos.begin(),
                           in.batch.batch_pos.end());
    twice.negatives.insert(twice.negatives.end(), in.batch.negatives.begin(),
                           in.batch.negatives.end());
    const std::size_t nn = in.batch.negatives.size();
    for (std::size_t i = 1; i <= np; ++i) twice.neg_offsets.push_back(nn + in.batch.neg_offsets[i]);
    const GradientResult dbl = compute_gradients(in.ctx, in.params, in.head, in.cfg, twice);
    CHECK(dbl.loss == doctest::Approx(2.0 * once.loss).epsilon(1e-12));
    double scale = 0.0;
    for (double x : once.grads) scale = std::max(scale, std::abs(x));
    for (std::size_t i = 0; i < once.grads.size(); ++i) {
      CHECK(std::abs(dbl.grads[i] - 2.0 * once.grads[i]) <= 1e-10 * scale);
    }
  }

  TEST_CASE("negatives per positive") {
    EdgeSplit s;
    s.num_nodes = 100;
    s.train_pos.resize(40);
    s.valid_pos.resize(5);
    s.test_pos.resize(5);
    TrainConfig cfg;
    // pool = 4950 - 50 + 10 = 4910; 4910 / 40 = 122.75
    CHECK(negatives_per_positive(s, cfg) == 123);
    cfg.neg_cap = 50;
    CHECK(negatives_per_positive(s, cfg) == 50);
    cfg.regime = Regime::kBiased;
    CHECK(negatives_per_positive(s, cfg) == 1);
  }

  TEST_CASE("config validation") {
    TrainConfig cfg;
    cfg.epochs = 0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg.epochs = 1;
    cfg.lr = 0.0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg.lr = 0.001;
    cfg.dropout = 1.0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
  }

  TEST_CASE("training is deterministic and one epoch returns epoch-1 parameters") {
    sbm::Dataset d = sbm::make(60, 0.2, 0.02, 6, 3);
    TrainContext ctx = d.context();
    TrainConfig cfg;
    cfg.epochs = 1;
    cfg.batch_count = 4;
    cfg.workers = 1;
    cfg.seed = 5;
    const MlpParams init = MlpParams::init_uniform(d.x.cols(), 8, 1);
    ctx.enhancer.hidden = 8;
    const TrainResult a = train(ctx, init, cfg);
    CHECK(a.best_epoch == 1);
    CHECK(a.history.size() == 1);
    CHECK_FALSE(std::equal(a.best.values().begin(), a.best.values().end(), init.values().begin()));

    cfg.epochs = 4;
    const TrainResult b = train(ctx, init, cfg);
    const TrainResult c = train(ctx, init, cfg);
    std::ostringstream hb, hc;
    write_history(hb, b.history);
    write_history(hc, c.history);
    CHECK(hb.str() == hc.str());
    CHECK(std::equal(b.best.values().begin(), b.best.values().end(), c.best.values().begin()));

    cfg.workers = 3;
    const TrainResult par = train(ctx, init, cfg);
    CHECK(par.best_epoch == b.best_epoch);
  }

  TEST_CASE("training loss trends down on a separable two-block graph") {
    // Negatives and batches are redrawn every epoch, so single steps are
    // noisy; compare the first and last few epochs instead.
    sbm::Dataset d = sbm::make(120, 0.15, 0.01, 8, 21);
    TrainContext ctx = d.context();
    ctx.enhancer.hidden = 16;
    // Let the MLP own most of the edge weight so its effect shows quickly.
    ctx.enhancer.alpha = 0.1;
    ctx.enhancer.beta = 1.0;
    TrainConfig cfg;
    cfg.epochs = 20;
    cfg.batch_count = 5;
    cfg.dropout = 0.0;
    cfg.workers = 1;
    cfg.lr = 0.01;
    const MlpParams init = MlpParams::init_uniform(d.x.cols(), 16, 2);
    const TrainResult r = train(ctx, init, cfg);
    REQUIRE(r.history.size() == 20);
    const auto mean = [&](std::size_t from) {
      return (r.history[from].train_loss + r.history[from + 1].train_loss +
              r.history[from + 2].train_loss) / 3.0;
    };
    CHECK(mean(17) < mean(0) - 0.05);
    CHECK(r.total_skipped == 0);
  }

  TEST_CASE("history log format") {
    std::ostringstream out;
    write_history(out, {{1, 0.5, 0.25, 0}, {2, 0.375, 0.5, 1}});
    CHECK(out.str() == "# epoch loss valid_prec skipped\n1 0.5 0.25 0\n2 0.375 0.5 1\n");
  }
}
