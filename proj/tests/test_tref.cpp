#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <random>

#include "cmcs/metrics.hpp"
#include "cmcs/tref.hpp"
#include "gradcheck.hpp"
#include "helpers.hpp"

using namespace cmcs;
using L = TrustLevel;
using Eigen::MatrixXd;

namespace {

// Scalar-state model: input dim 1, edge dim 1, one layer of width 1. The edge
// weights map a one-hot level to its trust value and the affine map passes the
// edge part through, so each channel computes the mean trust value of its edges.
TrefModel mean_value_model() {
  TrefModel m = TrefModel::init(1, {1}, 1, 1);
  auto& p = m.layers[0];
  for (std::size_t c = 0; c < kNumLevels; ++c) {
    p.edge_out(0, static_cast<Eigen::Index>(c)) = trust_value(level_from_index(c));
    p.edge_in(0, static_cast<Eigen::Index>(c)) = trust_value(level_from_index(c));
  }
  p.w_out << 0.0, 1.0;
  p.w_in << 0.0, 1.0;
  p.b_out.setZero();
  p.b_in.setZero();
  m.head.setZero();
  return m;
}

struct Toy {
  TrustGraph g;
  std::vector<TrustEdge> edges;
  MatrixXd x;
};

Toy ten_node_toy(std::uint64_t seed, std::size_t dim = 4) {
  Toy t;
  t.g = testing::random_graph(10, 0.3, seed);
  t.edges = t.g.edges();
  t.x = deterministic_init(t.g, dim, seed).vectors * static_cast<double>(dim);  // entries in [-1, 1]
  return t;
}

}  // namespace

TEST_SUITE("tref") {

TEST_CASE("passive trust of B averages incoming levels {3,2,1} to 2") {
  const auto g = testing::make_graph({{"A", "B", L::Master}, {"C", "B", L::Journeyer}, {"D", "B", L::Apprentice}});
  const auto pg = build_propagation_graph(g, {});
  const auto s = forward(pg, MatrixXd::Zero(4, 1), mean_value_model());
  CHECK(s.final_in()(*g.find("B"), 0) == doctest::Approx(2.0));
}

TEST_CASE("active trust of B averages outgoing levels to 1.8") {
  const auto g = testing::make_graph({{"B", "a", L::Master},
                                      {"B", "b", L::Master},
                                      {"B", "c", L::Apprentice},
                                      {"B", "d", L::Apprentice},
                                      {"B", "e", L::Apprentice}});
  const auto pg = build_propagation_graph(g, {});
  const auto s = forward(pg, MatrixXd::Zero(6, 1), mean_value_model());
  CHECK(s.final_out()(*g.find("B"), 0) == doctest::Approx(1.8));
}

TEST_CASE("layer 0 equals the input; isolated node gets relu(bias) at every layer") {
  auto g = testing::random_graph(8, 0.3, 2);
  const auto iso = g.add_node("alone");
  auto m = TrefModel::init(3, {5, 4}, 2, 9);
  std::mt19937_64 rng(1);
  std::normal_distribution<double> nd(0.0, 1.0);
  for (auto& p : m.layers) {
    for (Eigen::Index i = 0; i < p.b_out.size(); ++i) p.b_out(i) = nd(rng);
    for (Eigen::Index i = 0; i < p.b_in.size(); ++i) p.b_in(i) = nd(rng);
  }
  const MatrixXd x = MatrixXd::Random(9, 3);
  const auto s = forward(build_propagation_graph(g, {}), x, m);
  CHECK(s.h_out[0] == x);
  CHECK(s.h_in[0] == x);
  for (std::size_t l = 0; l < m.layers.size(); ++l) {
    for (Eigen::Index k = 0; k < m.layers[l].b_out.cols(); ++k) {
      CHECK(s.h_out[l + 1](iso, k) == std::max(0.0, m.layers[l].b_out(0, k)));
      CHECK(s.h_in[l + 1](iso, k) == std::max(0.0, m.layers[l].b_in(0, k)));
    }
  }
}

TEST_CASE("channels stay separate") {
  const auto g = testing::random_graph(12, 0.25, 4);
  const auto pg = build_propagation_graph(g, generate_expert_knowledge(g, {0.5, 2}));
  const auto m = TrefModel::init(4, {6, 6}, 3, 3);
  const MatrixXd x = MatrixXd::Random(12, 4);
  const auto base = forward(pg, x, m);

  auto no_in = m;
  for (auto& p : no_in.layers) {
    p.edge_in.setZero();
    p.w_in.setZero();
    p.b_in.setZero();
  }
  const auto a = forward(pg, x, no_in);
  auto no_out = m;
  for (auto& p : no_out.layers) {
    p.edge_out.setZero();
    p.w_out.setZero();
    p.b_out.setZero();
  }
  const auto b = forward(pg, x, no_out);
  for (std::size_t l = 0; l < base.h_out.size(); ++l) {
    CHECK(a.h_out[l] == base.h_out[l]);
    CHECK(b.h_in[l] == base.h_in[l]);
  }
}

TEST_CASE("non-finite activation aborts with a diagnostic") {
  const auto g = testing::random_graph(5, 0.5, 1);
  auto m = TrefModel::init(2, {3}, 2, 1);
  m.layers[0].b_out(0, 1) = std::numeric_limits<double>::infinity();
  try {
    forward(build_propagation_graph(g, {}), MatrixXd::Zero(5, 2), m);
    FAIL("expected an exception");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("layer 1") != std::string::npos);
  }
}

TEST_CASE("zero head -> uniform distribution, tie goes to Observer") {
  auto m = TrefModel::init(2, {3}, 2, 1);
  m.head.setZero();
  const MatrixXd h = MatrixXd::Random(4, 3).cwiseAbs();
  const auto p = predict_level(h, h, m, 0, 1);
  for (double q : p.probs) CHECK(q == doctest::Approx(0.25));
  CHECK(p.level == L::Observer);
}

TEST_CASE("crafted head makes Master the argmax") {
  auto m = TrefModel::init(2, {3}, 2, 1);
  m.head.setZero();
  m.head.row(3).setOnes();
  const MatrixXd h = MatrixXd::Ones(4, 3);
  CHECK(predict_level(h, h, m, 0, 1).level == L::Master);
}

TEST_CASE("softmax sums to one over 1000 random pairs; ordered pairs differ") {
  const auto g = testing::random_graph(30, 0.1, 8);
  const auto m = TrefModel::init(4, {8, 8}, 3, 5);
  const auto s = forward(build_propagation_graph(g, {}), MatrixXd::Random(30, 4), m);
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<NodeIndex> node(0, 29);
  std::size_t asymmetric = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto a = node(rng), b = node(rng);
    const auto p = predict_level(s, m, a, b);
    double sum = 0.0;
    for (double q : p.probs) sum += q;
    CHECK(std::abs(sum - 1.0) <= 1e-9);
    if (a != b && p.probs != predict_level(s, m, b, a).probs) ++asymmetric;
  }
  CHECK(asymmetric > 0);
  CHECK_THROWS_AS(predict_level(s, m, 30, 0), std::out_of_range);
}

TEST_CASE("loss examples") {
  const auto m = TrefModel::init(2, {3}, 2, 1).zeros_like();
  const std::vector<std::array<double, kNumLevels>> perfect{{0, 0, 1, 0}, {1, 0, 0, 0}};
  const std::vector<L> labels{L::Journeyer, L::Observer};
  CHECK(loss(perfect, labels, 0.0, m) == 0.0);
  const std::vector<std::array<double, kNumLevels>> uniform{{.25, .25, .25, .25}, {.25, .25, .25, .25}};
  CHECK(loss(uniform, labels, 0.0, m) == doctest::Approx(std::log(4.0)).epsilon(1e-12));
  CHECK(loss(uniform, labels, 0.5, m) == doctest::Approx(std::log(4.0)).epsilon(1e-12));  // zero params
  const std::vector<std::array<double, kNumLevels>> wrong{{0, 1, 0, 0}, {0, 1, 0, 0}};
  CHECK(loss(wrong, labels, 0.0, m) == doctest::Approx(-std::log(1e-12)));
  const auto nz = TrefModel::init(2, {3}, 2, 1);
  CHECK(loss(uniform, labels, 0.1, nz) == doctest::Approx(std::log(4.0) + 0.1 * nz.squared_norm()));
}

TEST_CASE("analytic gradients match central differences") {
  for (const bool shared : {true, false}) {
    for (std::uint64_t seed : {1, 2, 3}) {
      const auto t = ten_node_toy(seed);
      const auto experts = generate_expert_knowledge(t.g, {0.5, seed});
      const auto pg = build_propagation_graph(t.g, experts);
      auto m = TrefModel::init(4, {5, 4}, 3, seed, shared);
      for (auto& p : m.layers) {
        p.b_out.setConstant(0.1);
        p.b_in.setConstant(0.1);
      }
      const auto r = testing::check_gradients(pg, t.x, m, t.edges, 1e-3);
      INFO("seed " << seed << " shared " << shared << " worst " << r.worst_tensor);
      CHECK(r.max_rel_error < 1e-4);
    }
  }
}

TEST_CASE("training memorizes a 10-node graph and is deterministic") {
  const auto g = testing::random_graph(10, 0.3, 21);
  EdgeSplit split;
  split.train = g.edges();
  const auto emb = deterministic_init(g, 16, 1);
  TrainConfig cfg;
  cfg.epochs = 50;
  cfg.patience = 0;
  cfg.validation_fraction = 0.0;
  cfg.layer_dims = {32, 32};
  const auto r = train(g, split, emb, cfg, true);
  REQUIRE(r.train_loss.size() == 50);
  CHECK(r.train_loss.back() < r.train_loss.front());
  CHECK_FALSE(r.diverged);
  std::size_t correct = 0;
  for (const auto& e : split.train) correct += predict_level(r.state, r.model, e.src, e.dst).level == e.level;
  CHECK(double(correct) / double(split.train.size()) >= 0.9);

  const auto again = train(g, split, emb, cfg, true);
  CHECK(again.train_loss == r.train_loss);
  const auto a = r.model.tensors(), b = again.model.tensors();
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(*a[i] == *b[i]);

  const auto tef = train(g, split, emb, cfg, false);
  CHECK(tef.experts.empty());
  CHECK_THROWS_AS(train(g, EdgeSplit{}, emb, cfg, true), std::invalid_argument);
}

TEST_CASE("trust value and trust benefit") {
  CHECK(trust_value(L::Observer) == 0.5);
  CHECK(trust_value(L::Master) == 3.0);
  for (std::size_t c = 1; c < kNumLevels; ++c)
    CHECK(trust_value(level_from_index(c)) > trust_value(level_from_index(c - 1)));
  CHECK(trust_benefit(3, 3) == 6.0);
  CHECK(trust_benefit(0.5, 0.5) == 1.0);
  CHECK(std::abs(trust_benefit(3, 1) - 4.0 * std::exp(-2.0)) <= 1e-12);
  CHECK(trust_benefit(3, 1) == doctest::Approx(0.5413).epsilon(1e-4));
  // Exhaustive over the 16 level combinations: symmetric, in (0, 6], max only at (3,3).
  for (auto a : kAllLevels)
    for (auto b : kAllLevels) {
      const double s = trust_benefit(trust_value(a), trust_value(b));
      CHECK(s == trust_benefit(trust_value(b), trust_value(a)));
      CHECK(s > 0.0);
      CHECK(s <= 6.0);
      if (!(a == L::Master && b == L::Master)) CHECK(s < 6.0);
    }
}

TEST_CASE("pair accuracy") {
  const auto g = testing::make_graph({{"a", "b", L::Master}, {"b", "a", L::Journeyer}, {"b", "c", L::Master}});
  const auto a = *g.find("a"), b = *g.find("b"), c = *g.find("c");
  CHECK(pair_auc(a, b, g, 0.766) == 1.0);
  CHECK(pair_auc(a, c, g, 0.766) == 0.766);
  CHECK(pair_auc(a, b, g, 0.7) * pair_auc(b, a, g, 0.7) == 1.0);
  CHECK_THROWS_AS(pair_auc(a, c, g, 0.0), std::invalid_argument);
}

TEST_CASE("evaluator: pair evaluation, level lookup, file round-trip") {
  const auto g = testing::random_graph(20, 0.15, 6);
  const auto split = split_edges(g, 0.8, 1);
  TrainConfig cfg;
  cfg.epochs = 5;
  cfg.layer_dims = {8};
  const auto r = train(g, split, deterministic_init(g, 8, 1), cfg, true);
  const auto ev = make_evaluator(r, g, split.test);
  CHECK(ev.accuracy() > 0.0);
  CHECK(ev.accuracy() <= 1.0);

  CHECK(ev.evaluate_pairs({}).empty());
  std::vector<std::pair<NodeIndex, NodeIndex>> pairs;
  for (const auto& e : split.test) pairs.push_back({e.src, e.dst});
  CHECK(ev.evaluate_pairs(pairs).size() == pairs.size());
  const auto& e0 = split.train.front();
  if (r.message_graph.has_edge(e0.src, e0.dst)) {
    const std::pair<NodeIndex, NodeIndex> bad{e0.src, e0.dst};
    CHECK_THROWS_AS(ev.evaluate_pairs(std::span(&bad, 1)), std::invalid_argument);
  }
  for (const auto& e : g.edges()) CHECK(ev.level_between(e.src, e.dst) == e.level);

  const auto path = std::filesystem::temp_directory_path() / "cmcs_test_model.bin";
  ev.save(path);
  const auto back = TrustEvaluator::load(path);
  CHECK(back.accuracy() == ev.accuracy());
  CHECK(back.observed().num_edges() == g.num_edges());
  CHECK(back.message_graph().num_edges() == r.message_graph.num_edges());
  for (NodeIndex a = 0; a < 20; ++a)
    for (NodeIndex b = 0; b < 20; ++b) CHECK(back.predict(a, b).probs == ev.predict(a, b).probs);
  std::filesystem::remove(path);
}

}  // TEST_SUITE
