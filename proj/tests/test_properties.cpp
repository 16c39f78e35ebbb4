// Randomized invariants that cut across modules.
#include <doctest.h>

#include <random>
#include <set>

#include "cmcs/baselines.hpp"
#include "cmcs/recruit.hpp"
#include "cmcs/scenario.hpp"
#include "cmcs/tref.hpp"
#include "helpers.hpp"

using namespace cmcs;

TEST_SUITE("properties") {

TEST_CASE("trust benefit: symmetric, bounded, maximal only for equal Master trust") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> v(0.5, 3.0);
  for (int i = 0; i < 10000; ++i) {
    const double a = v(rng), b = v(rng);
    const double s = trust_benefit(a, b);
    CHECK(s == trust_benefit(b, a));
    CHECK(s > 0.0);
    CHECK(s <= 6.0);
    CHECK(s <= a + b);
  }
}

TEST_CASE("splits partition the edge set for any seed and fraction") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> f(0.05, 0.95);
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto g = testing::random_graph(30, 0.1, seed);
    const auto s = split_edges(g, f(rng), seed);
    std::set<std::pair<NodeIndex, NodeIndex>> seen;
    for (const auto& e : s.train) CHECK(seen.insert({e.src, e.dst}).second);
    for (const auto& e : s.test) CHECK(seen.insert({e.src, e.dst}).second);
    CHECK(seen.size() == g.num_edges());
    for (const auto& e : s.test) CHECK(g.level(e.src, e.dst) == e.level);
  }
}

TEST_CASE("forward is finite and non-negative after ReLU on random graphs") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto g = testing::random_graph(40, 0.05, seed);
    const auto m = TrefModel::init(6, {8, 8}, 4, seed, seed % 2 == 0);
    const auto pg = build_propagation_graph(g, generate_expert_knowledge(g, {0.5, seed}));
    const auto s = forward(pg, Eigen::MatrixXd::Random(40, 6), m);
    for (std::size_t l = 1; l < s.h_out.size(); ++l) {
      CHECK(s.h_out[l].allFinite());
      CHECK(s.h_out[l].minCoeff() >= 0.0);
      CHECK(s.h_in[l].minCoeff() >= 0.0);
    }
  }
}

TEST_CASE("no solver beats the oracle; incremental QoD matches recomputation") {
  std::mt19937_64 rng(3);
  InstanceParams ip;
  ip.candidates = 11;
  ip.team_size = 4;
  for (std::uint64_t seed = 1; seed <= 25; ++seed) {
    const auto g = random_instance(ip, seed).ucrg();
    const double best = testing::oracle_best_qod(g.weight, g.task.team_size);
    for (auto a : kAllAlgorithms) {
      BaselineConfig b;
      b.seed = seed;
      b.iterations = 40;
      TabuConfig t;
      t.seed = seed;
      t.iterations = 40;
      const auto r = solve(a, g, b, t);
      CHECK(r.qod <= best + 1e-9);
      CHECK(std::abs(r.qod - qod(r.team, g.weight)) <= 1e-9);
    }
  }
}

TEST_CASE("random instances respect the recruitment range and weight invariants") {
  InstanceParams ip;
  ip.candidates = 80;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto inst = random_instance(ip, seed);
    const auto g = inst.ucrg();
    CHECK(g.size() == 80);
    for (std::size_t i = 0; i < g.size(); ++i) {
      CHECK(g.members[i].distance_km < g.task.z_km);
      if (i) CHECK(g.members[i - 1].id < g.members[i].id);
      for (std::size_t j = 0; j < g.size(); ++j) {
        CHECK(g.weight(i, j) >= 0.0);
        CHECK(g.weight(i, j) == g.weight(j, i));
        if (i != j) {
          CHECK(g.auc(i, j) > 0.0);
          CHECK(g.auc(i, j) <= 1.0);
        }
      }
    }
  }
}

TEST_CASE("collaboration selection: constraints hold; pl monotonicity is logged") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> su(0.05, 6.0), au(0.3, 0.99), zu(0.05, 0.9);
  std::size_t steps = 0, increases = 0;
  for (int rep = 0; rep < 500; ++rep) {
    const std::size_t n = 3 + std::size_t(rep % 8);
    PairMatrix s(n), a(n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        if (i != j) a(i, j) = au(rng);
        if (i < j) s(i, j) = s(j, i) = su(rng);
      }
    Task t;
    t.zeta = zu(rng);
    std::vector<std::size_t> team(n);
    for (std::size_t i = 0; i < n; ++i) team[i] = i;
    const auto c = select_collaboration_team(team, t, s, a);
    if (c.feasible) {
      CHECK(c.pl <= t.zeta);
      CHECK(c.team.size() >= 2);
      CHECK(c.team.size() <= n);
      CHECK(std::abs(privacy_loss(c.team, s, a) - c.pl) <= 1e-12);
    } else {
      CHECK(c.team.empty());
      CHECK(c.pl_trajectory.size() == n - 1);
    }
    for (std::size_t i = 1; i < c.pl_trajectory.size(); ++i) {
      ++steps;
      increases += c.pl_trajectory[i] > c.pl_trajectory[i - 1];
    }
  }
  MESSAGE("collaboration pl rose on " << increases << " of " << steps << " removal steps");
}

}  // TEST_SUITE
