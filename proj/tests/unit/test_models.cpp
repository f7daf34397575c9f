#include <algorithm>
#include <cmath>
#include <numbers>
#include <omp.h>

#include "doctest.h"

#include "paqreg/models/nn.hpp"
#include "paqreg/models/select.hpp"
#include "paqreg/models/trees.hpp"
#include "paqreg/models/voting.hpp"
#include "paqreg/synth.hpp"

using namespace paqreg;
using namespace paqreg::models;

namespace {

Matrix random_matrix(std::size_t rows, std::size_t cols, Rng& rng, double lo = -1.0, double hi = 1.0) {
  Matrix m(rows, cols);
  for (double& v : m.data) v = rng.uniform(lo, hi);
  return m;
}

double loss_of(const Differentiable& m, std::span<const double> x, double target) {
  const double d = m.forward(x) - target;
  return d * d;
}

/// Central-difference gradient of the squared error against every parameter.
std::vector<double> numeric_grad(Differentiable& m, std::span<const double> x, double target, double h) {
  auto p = m.params();
  std::vector<double> g(p.size());
  for (std::size_t j = 0; j < p.size(); ++j) {
    const double keep = p[j];
    p[j] = keep + h;
    const double up = loss_of(m, x, target);
    p[j] = keep - h;
    const double dn = loss_of(m, x, target);
    p[j] = keep;
    g[j] = (up - dn) / (2 * h);
  }
  return g;
}

HybridModel small_hybrid(std::size_t K, std::uint64_t seed, double scale = 1.0) {
  HybridModel m(qsim::generate_circuit(3, 4, 6, seed), K, scale);
  Rng rng(seed + 100);
  m.init(rng);
  return m;
}

}  // namespace

TEST_CASE("layer widths and parameter counts") {
  CHECK(mlp_layer_widths(32) == std::array<std::size_t, 4>{32, 16, 8, 1});
  CHECK(mlp_layer_widths(10) == std::array<std::size_t, 4>{10, 5, 2, 1});
  CHECK(mlp_param_count(32) == 528 + 136 + 9);
  CHECK(mlp_param_count(4) == 10 + 3 + 2);
  CHECK(hybrid_param_count(8, 4, 40) == 160 + 673);
  CHECK(hybrid_param_count(4, 2, 20) == 89);
  CHECK_THROWS_AS(Mlp(3), InputError);
  CHECK_THROWS_AS(hybrid_param_count(0, 1, 1), InputError);
  for (std::size_t d = 4; d < 40; ++d) CHECK(Mlp(d).n_params() == mlp_param_count(d));
  const auto h = small_hybrid(2, 1);
  CHECK(h.n_params() == hybrid_param_count(3, 2, 6));
}

TEST_CASE("mlp forward by hand") {
  Mlp m(4);
  // layer 0: 2x4 weights + 2 biases, layer 1: 1x2 + 1, layer 2: 1x1 + 1
  std::vector<double> p{1, 0, 0, 0, 0, -1, 0, 0, 0.5, 0.5,
                        1, 1, 0,
                        2, -1};
  std::copy(p.begin(), p.end(), m.params().begin());
  const std::vector<double> x{1, 2, 3, 4};
  // h1 = relu(1 + 0.5, -2 + 0.5) = (1.5, 0); h2 = relu(1.5); out = 2 * 1.5 - 1
  CHECK(m.forward(x) == doctest::Approx(2.0));
  CHECK_THROWS_AS(m.forward(std::vector<double>{1, 2}), InputError);
}

TEST_CASE("mlp gradient matches finite differences") {
  Rng rng(3);
  Mlp m(8);
  m.init(rng);
  for (int t = 0; t < 5; ++t) {
    std::vector<double> x(8);
    for (double& v : x) v = rng.uniform(-1, 1);
    std::vector<double> g(m.n_params(), 0.0);
    m.forward_backward(x, 0.3, g);
    const auto fd = numeric_grad(m, x, 0.3, 1e-6);
    for (std::size_t j = 0; j < g.size(); ++j) CHECK(g[j] == doctest::Approx(fd[j]).epsilon(1e-5).scale(1.0));
  }
}

TEST_CASE("hybrid gradient matches finite differences") {
  for (double scale : {1.0, 0.25}) {
    auto m = small_hybrid(2, 5, scale);
    Rng rng(9);
    std::vector<double> x(8);
    for (double& v : x) v = rng.uniform(-2, 2);
    std::vector<double> g(m.n_params(), 0.0);
    const double pred = m.forward_backward(x, 0.1, g);
    CHECK(pred == doctest::Approx(m.forward(x)));
    const auto fd = numeric_grad(m, x, 0.1, 1e-5);
    for (std::size_t j = 0; j < g.size(); ++j) CHECK(std::abs(g[j] - fd[j]) < 1e-6);
  }
}

TEST_CASE("hybrid sub-encoders are independent") {
  auto m = small_hybrid(3, 2);
  const std::size_t nq = 3, nf = 4;
  Rng rng(4);
  std::vector<double> x(12);
  for (double& v : x) v = rng.uniform(-1, 1);
  const auto base = m.head_input(x);
  REQUIRE(base.size() == 9);

  SUBCASE("changing one slice only moves that block of readouts") {
    for (std::size_t k = 0; k < 3; ++k) {
      auto x2 = x;
      for (std::size_t f = 0; f < nf; ++f) x2[k * nf + f] += 0.7;
      const auto moved = m.head_input(x2);
      for (std::size_t i = 0; i < moved.size(); ++i)
        if (i / nq != k) CHECK(moved[i] == base[i]);
    }
  }
  SUBCASE("changing one sub-encoder's parameters only moves its block") {
    for (std::size_t k = 0; k < 3; ++k) {
      auto m2 = m;
      for (double& p : m2.sub_params(k)) p += 0.3;
      const auto moved = m2.head_input(x);
      bool any = false;
      for (std::size_t i = 0; i < moved.size(); ++i) {
        if (i / nq != k) CHECK(moved[i] == base[i]);
        else any = any || moved[i] != base[i];
      }
      CHECK(any);
    }
  }
  SUBCASE("frozen head and zero upstream give zero gradients") {
    const auto g = m.backward(x, 0.0);
    for (const auto& s : g.sub_params)
      for (double v : s) CHECK(v == 0.0);
    for (double v : g.head) CHECK(v == 0.0);
  }
  CHECK_THROWS_AS(m.head_input(std::vector<double>(5)), InputError);
  CHECK_THROWS_AS(HybridModel(qsim::generate_circuit(2, 2, 2, 0), 1, 0.0), InputError);
}

TEST_CASE("tree ensembles on simple targets") {
  SUBCASE("constant target predicts the constant exactly") {
    Rng rng(1);
    const auto X = random_matrix(50, 3, rng);
    const std::vector<double> y(50, 3.7);
    TreeEnsemble g(TreeEnsembleSpec::gbdt_defaults());
    g.fit(X, y);
    for (double p : g.predict(X)) CHECK(p == 3.7);
    for (double v : g.feature_importance()) CHECK(v == 0.0);
  }
  SUBCASE("a single split recovers a step") {
    Matrix X(6, 1);
    X.data = {1, 2, 3, 10, 11, 12};
    const std::vector<double> y{0, 0, 0, 5, 5, 5};
    TreeEnsembleSpec s = TreeEnsembleSpec::random_forest_defaults();
    s.n_trees = 1;
    s.max_depth = 1;
    s.feature_subsample = 1.0;
    RegressionTree t;
    std::vector<std::size_t> all{0, 1, 2, 3, 4, 5};
    Rng rng(0);
    TreeParams tp;
    tp.max_depth = 1;
    t = RegressionTree::fit(X, y, all, SortedColumns(X), tp, rng);
    REQUIRE(t.nodes().size() == 3);
    CHECK(t.nodes()[0].threshold == 6.5);
    CHECK(t.predict(std::vector<double>{6.5}) == 0.0);
    CHECK(t.predict(std::vector<double>{6.6}) == 5.0);
    CHECK(RegressionTree::from_json(t.to_json()).to_json() == t.to_json());
  }
  SUBCASE("gbdt fits a sine") {
    Matrix X(400, 1);
    std::vector<double> y(400);
    for (std::size_t i = 0; i < 400; ++i) {
      X(i, 0) = 2 * std::numbers::pi * static_cast<double>(i) / 399.0;
      y[i] = std::sin(X(i, 0));
    }
    auto s = TreeEnsembleSpec::gbdt_defaults();
    s.n_trees = 300;
    TreeEnsemble g(s);
    g.fit(X, y);
    const auto p = g.predict(X);
    double mae = 0;
    for (std::size_t i = 0; i < 400; ++i) mae += std::abs(p[i] - y[i]) / 400.0;
    CHECK(mae < 0.05);
    const auto& loss = g.training_loss();
    REQUIRE(loss.size() == 301);
    for (std::size_t i = 1; i < loss.size(); ++i) CHECK(loss[i] <= loss[i - 1] + 1e-12);
  }
}

TEST_CASE("importance ignores exact duplicates and noise") {
  Rng rng(8);
  Matrix X(300, 4);
  std::vector<double> y(300);
  for (std::size_t i = 0; i < 300; ++i) {
    X(i, 0) = rng.uniform(-1, 1);
    X(i, 1) = X(i, 0);
    X(i, 2) = rng.uniform(-1, 1);
    X(i, 3) = rng.uniform(-1, 1);
    y[i] = 3 * X(i, 0) + 0.5 * X(i, 3);
  }
  TreeEnsemble g(TreeEnsembleSpec::gbdt_defaults());
  g.fit(X, y);
  const auto imp = g.feature_importance();
  CHECK(imp[1] == 0.0);
  CHECK(imp[0] > 0.8);
  CHECK(imp[3] > imp[2]);
  double s = 0;
  for (double v : imp) s += v;
  CHECK(s == doctest::Approx(1.0));
}

TEST_CASE("random forest is seeded and independent of thread count") {
  Rng rng(12);
  const auto X = random_matrix(120, 6, rng);
  std::vector<double> y(120);
  for (std::size_t i = 0; i < 120; ++i) y[i] = X(i, 0) * X(i, 1) + X(i, 2);
  auto spec = TreeEnsembleSpec::random_forest_defaults();
  spec.n_trees = 30;
  spec.seed = 4;
  const int saved = omp_get_max_threads();
  omp_set_num_threads(1);
  TreeEnsemble a(spec);
  a.fit(X, y);
  omp_set_num_threads(4);
  TreeEnsemble b(spec);
  b.fit(X, y);
  omp_set_num_threads(saved);
  CHECK(a.params_json() == b.params_json());
  spec.seed = 5;
  TreeEnsemble c(spec);
  c.fit(X, y);
  CHECK(a.params_json() != c.params_json());
  for (const auto& t : a.trees()) CHECK(t.depth() <= 16);
}

TEST_CASE("weighted voting") {
  CHECK(weighted_vote({{1.0}, {2.0}}, std::vector<double>{3, 2})[0] == doctest::Approx(1.4));
  CHECK(weighted_vote({{1.0, 4.0}, {3.0, 0.0}}, std::vector<double>{1, 1}) == std::vector<double>{2.0, 2.0});
  CHECK_THROWS_AS(weighted_vote({{1.0}}, std::vector<double>{-1}), InputError);
  CHECK_THROWS_AS(weighted_vote({{1.0}}, std::vector<double>{0}), InputError);
  CHECK_THROWS_AS(weighted_vote({}, std::vector<double>{}), InputError);
  CHECK_THROWS_AS(weighted_vote({{1.0}, {1.0, 2.0}}, std::vector<double>{1, 1}), InputError);
}

TEST_CASE("checkpoints round trip every model kind") {
  Rng rng(21);
  const auto X = random_matrix(60, 8, rng);
  std::vector<double> y(60);
  for (std::size_t i = 0; i < 60; ++i) y[i] = X(i, 0) - 2 * X(i, 5) + 0.1 * rng.normal();
  const std::vector<nlohmann::json> specs{
      {{"kind", "gbdt"}, {"n_trees", 20}},
      {{"kind", "random_forest"}, {"n_trees", 10}},
      {{"kind", "mlp"}, {"train", {{"epochs", 5}}}},
      {{"kind", "hybrid"},
       {"n_qubits", 2},
       {"n_sub_encoders", 2},
       {"features_per_qc", 4},
       {"params_per_qc", 4},
       {"angle_scale", 0.5},
       {"train", {{"epochs", 2}}}},
      {{"kind", "voting"},
       {"members",
        {{{"weight", 1.5}, {"model", {{"kind", "gbdt"}, {"n_trees", 5}}}},
         {{"weight", 1.0}, {"model", {{"kind", "random_forest"}, {"n_trees", 5}}}}}}}};
  for (const auto& s : specs) {
    CAPTURE(s.dump());
    auto m = make_model(s);
    m->fit(X, y);
    const auto ck = nlohmann::json::parse(save_checkpoint(*m).dump());
    CHECK(ck.at("format") == kCheckpointFormat);
    CHECK(ck.at("kind") == s.at("kind"));
    const auto back = load_checkpoint(ck);
    CHECK(back->predict(X) == m->predict(X));
    CHECK(save_checkpoint(*back).dump() == ck.dump());
  }
  auto m = make_model({{"kind", "gbdt"}, {"n_trees", 2}});
  m->fit(X, y);
  auto ck = save_checkpoint(*m);
  ck["format"] = 99;
  CHECK_THROWS_AS(load_checkpoint(ck), InputError);
  CHECK_THROWS_AS(make_model({{"kind", "svm"}}), InputError);
  CHECK_THROWS_AS(make_model({{"kind", "gbdt"}, {"trees", 3}}), InputError);
  CHECK_THROWS_AS(make_model({{"kind", "gbdt"}, {"n_trees", "many"}}), InputError);
}

TEST_CASE("feature selection keeps a ranked prefix within tolerance") {
  SynthOptions o;
  o.n_rows = 200;
  o.n_features = 18;
  o.n_informative = 4;
  o.n_latent = 2;
  o.curation_cases = false;
  const auto data = make_synthetic(o);
  auto X = data.dataset.features;
  std::vector<std::size_t> finite;
  for (std::size_t c = 0; c < X.n_cols(); ++c) {
    const auto col = X.values.column(c);
    if (std::all_of(col.begin(), col.end(), [](double v) { return std::isfinite(v); })) finite.push_back(c);
  }
  X = X.select_columns(finite);
  const auto y = data.dataset.targets();

  SelectionOptions opt;
  opt.n_folds = 3;
  opt.step = 2;
  opt.importance_model = [] {
    auto s = TreeEnsembleSpec::gbdt_defaults();
    s.n_trees = 30;
    return std::make_unique<TreeEnsemble>(s);
  };
  const auto r = select_features(X, y, opt);
  REQUIRE(r.ranking.size() == X.n_cols());
  REQUIRE(!r.retained.empty());
  CHECK(std::equal(r.retained.begin(), r.retained.end(), r.ranking.begin()));
  for (std::size_t i = 1; i < r.ranking.size(); ++i)
    CHECK(r.importance[r.ranking[i - 1]] >= r.importance[r.ranking[i]]);
  double best = r.trace.front().mae;
  for (std::size_t i = 1; i < r.trace.size(); ++i) {
    CHECK(r.trace[i].n_features < r.trace[i - 1].n_features);
    if (r.trace[i].n_features >= r.retained.size()) {
      CHECK(r.trace[i].mae <= best * (1 + opt.tolerance));
      best = std::min(best, r.trace[i].mae);
    }
  }
  CHECK(r.best_mae == doctest::Approx(best));

  opt.tolerance = std::numeric_limits<double>::infinity();
  const auto all = select_features(X, y, opt);
  CHECK(all.trace.back().n_features == 1);
  CHECK(all.retained.size() == 1);
  CHECK(all.to_json(X.column_names).at("retained").size() == 1);
  opt.step = 0;
  CHECK_THROWS_AS(select_features(X, y, opt), InputError);
}
