#include <doctest.h>

#include <map>
#include <set>

#include "cmcs/expert_knowledge.hpp"
#include "helpers.hpp"

using namespace cmcs;
using L = TrustLevel;

namespace {

// Five ordered pairs have a direct edge and at least two two-hop paths:
// (S1,T1) (S1,T2) (S2,T1) (S2,T2) (X,T2). The levels below make exactly three
// of them agree with the max-over-paths of the per-path min.
TrustGraph six_node_toy() {
  return testing::make_graph({
      {"S1", "X", L::Master},     {"S1", "Y", L::Journeyer},  {"S2", "X", L::Apprentice},
      {"S2", "Y", L::Apprentice}, {"X", "T1", L::Journeyer},  {"Y", "T1", L::Master},
      {"X", "T2", L::Journeyer},  {"Y", "T2", L::Apprentice}, {"X", "Y", L::Master},
      {"T1", "T2", L::Journeyer}, {"S1", "T1", L::Journeyer}, {"S1", "T2", L::Observer},
      {"S2", "T1", L::Apprentice}, {"S2", "T2", L::Master},
  });
}

}  // namespace

TEST_SUITE("expert_knowledge") {

TEST_CASE("Pr on the six-node toy graph is 3/5") {
  const auto g = six_node_toy();
  REQUIRE(g.num_nodes() == 6);
  const auto oracle = testing::oracle_pr(g);
  REQUIRE(oracle.qualifying == 5);
  REQUIRE(oracle.matches == 3);
  const auto est = estimate_pr(g);
  CHECK(est.qualifying_pairs == 5);
  CHECK(est.matches == 3);
  CHECK(est.pr == doctest::Approx(0.6));
  CHECK_FALSE(est.defaulted);
}

TEST_CASE("Pr extremes: all match -> 1, none match -> 0") {
  auto all = testing::make_graph({{"a", "b", L::Master}, {"b", "c", L::Journeyer}, {"a", "d", L::Journeyer},
                                  {"d", "c", L::Master}, {"a", "c", L::Journeyer}});
  CHECK(estimate_pr(all).pr == 1.0);
  auto none = testing::make_graph({{"a", "b", L::Master}, {"b", "c", L::Journeyer}, {"a", "d", L::Journeyer},
                                   {"d", "c", L::Master}, {"a", "c", L::Observer}});
  CHECK(estimate_pr(none).pr == 0.0);
  const auto chain = testing::make_graph({{"a", "b", L::Master}, {"b", "c", L::Master}});
  const auto d = estimate_pr(chain);
  CHECK(d.defaulted);
  CHECK(d.pr == 0.5);
}

TEST_CASE("Pr agrees with the enumeration oracle on random graphs") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto g = testing::random_graph(15, 0.3, seed);
    const auto o = testing::oracle_pr(g);
    const auto e = estimate_pr(g);
    CHECK(e.qualifying_pairs == o.qualifying);
    CHECK(e.matches == o.matches);
  }
}

TEST_CASE("Pr from a split only sees training edges") {
  const auto g = six_node_toy();
  EdgeSplit split;
  split.train = g.edges();
  split.train.erase(std::remove_if(split.train.begin(), split.train.end(),
                                   [&](const TrustEdge& e) { return g.node_id(e.src) == "S2"; }),
                    split.train.end());
  const auto est = estimate_pr(split, g);
  CHECK(est.qualifying_pairs == 3);
  CHECK(est.matches == 2);
}

TEST_CASE("single-path chain: expert edge takes the min") {
  // w1 -(Journeyer=2)-> w2 -(Apprentice=1)-> w3, |N_O(w1)| = 1.
  const auto g = testing::make_graph({{"w1", "w2", L::Journeyer}, {"w2", "w3", L::Apprentice}});
  const auto experts = generate_expert_knowledge(g, {0.5, 1});
  const auto w1 = *g.find("w1"), w3 = *g.find("w3");
  bool found = false;
  for (const auto& e : experts) {
    if (e.src == w1 && e.dst == w3) {
      found = true;
      CHECK(e.level == L::Apprentice);
      CHECK_FALSE(e.draw.has_value());
    }
  }
  CHECK(found);
  CHECK(experts.size() == 1);  // the incoming edge at w3 would duplicate (w1, w3)
}

TEST_CASE("two paths: the draw selects max or min") {
  const std::vector<L> paths{L::Journeyer, L::Apprentice};
  CHECK(compose_expert_level(paths, 2, 0.2, 0.5) == L::Journeyer);
  CHECK(compose_expert_level(paths, 2, 0.8, 0.5) == L::Apprentice);
  CHECK(compose_expert_level({L::Master}, 1, std::nullopt, 0.5) == L::Master);
  CHECK_THROWS_AS(compose_expert_level(paths, 2, std::nullopt, 0.5), std::invalid_argument);
}

TEST_CASE("no two-hop non-adjacent target -> no expert edge") {
  const auto tri = testing::make_graph({{"a", "b", L::Master}, {"b", "c", L::Master}, {"a", "c", L::Master}});
  CHECK(generate_expert_knowledge(tri, {0.5, 1}).empty());
}

TEST_CASE("expert edge invariants on random graphs") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto g = testing::random_graph(25, 0.08, seed);
    const double pr = 0.1 * static_cast<double>(seed % 10);
    const auto experts = generate_expert_knowledge(g, {pr, seed});
    std::set<std::pair<NodeIndex, NodeIndex>> seen;
    std::map<std::pair<NodeIndex, int>, int> per_anchor;
    for (const auto& e : experts) {
      CHECK_FALSE(g.has_edge(e.src, e.dst));
      CHECK(e.src != e.dst);
      CHECK(seen.insert({e.src, e.dst}).second);
      CHECK(++per_anchor[{e.anchor, int(e.direction)}] == 1);
      // Exactly two hops from the anchor along the edge direction.
      const NodeIndex target = e.direction == ExpertDirection::IncomingToAnchor ? e.src : e.dst;
      const NodeIndex anchor = e.anchor;
      bool two_hop = false;
      for (NodeIndex m = 0; m < g.num_nodes(); ++m) {
        two_hop |= e.direction == ExpertDirection::IncomingToAnchor ? (g.has_edge(target, m) && g.has_edge(m, anchor))
                                                                    : (g.has_edge(anchor, m) && g.has_edge(m, target));
      }
      CHECK(two_hop);
      CHECK(e.level == compose_expert_level(e.path_levels, e.neighborhood, e.draw, pr));
      if (e.neighborhood == 1) {
        CHECK(e.level == *std::min_element(e.path_levels.begin(), e.path_levels.end()));
      }
    }
    CHECK(generate_expert_knowledge(g, {pr, seed}).size() == experts.size());
  }
}

}  // TEST_SUITE
