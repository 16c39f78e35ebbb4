#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <numbers>
#include <set>

#include "cmcs/graph_store.hpp"
#include "helpers.hpp"

using namespace cmcs;

namespace {

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("cmcs_test_" + name);
}

}  // namespace

TEST_SUITE("graph_store") {

TEST_CASE("one-hot encoding and value mapping") {
  for (auto l : kAllLevels) {
    const auto v = one_hot(l);
    double sum = 0.0;
    for (std::size_t c = 0; c < kNumLevels; ++c) {
      sum += v[c];
      CHECK(v[c] == (c == level_index(l) ? 1.0 : 0.0));
    }
    CHECK(sum == 1.0);
  }
  CHECK(trust_value(TrustLevel::Observer) == 0.5);
  CHECK(trust_value(TrustLevel::Apprentice) == 1.0);
  CHECK(trust_value(TrustLevel::Journeyer) == 2.0);
  CHECK(trust_value(TrustLevel::Master) == 3.0);
}

TEST_CASE("level tokens are case-insensitive") {
  CHECK(parse_level("Master") == TrustLevel::Master);
  CHECK(parse_level("JOURNEYER") == TrustLevel::Journeyer);
  CHECK(parse_level("apprentice") == TrustLevel::Apprentice);
  CHECK(parse_level("observer") == TrustLevel::Observer);
  CHECK_FALSE(parse_level("guru").has_value());
}

TEST_CASE("two-line file gives two nodes and two edges") {
  const auto g = parse_trust_graph("A\tB\tmaster\nB\tA\tobserver\n");
  CHECK(g.graph.num_nodes() == 2);
  CHECK(g.graph.num_edges() == 2);
  const auto a = *g.graph.find("A"), b = *g.graph.find("B");
  CHECK(g.graph.level(a, b) == TrustLevel::Master);
  CHECK(g.graph.level(b, a) == TrustLevel::Observer);
  g.graph.validate();
}

TEST_CASE("unknown level is a parse error carrying the line") {
  try {
    parse_trust_graph("A\tB\tmaster\n\nC\tD\twizard\n");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
  }
}

TEST_CASE("self-loops dropped and duplicates last-wins") {
  const auto g = parse_trust_graph("A\tA\tmaster\nA\tB\tobserver\nA\tB\tjourneyer\n# comment\n");
  CHECK(g.report.self_loops_dropped == 1);
  CHECK(g.report.duplicates_replaced == 1);
  CHECK(g.graph.num_edges() == 1);
  CHECK(g.graph.level(*g.graph.find("A"), *g.graph.find("B")) == TrustLevel::Journeyer);
}

TEST_CASE("graph stats") {
  const auto g = testing::make_graph({{"a", "b", TrustLevel::Master}, {"b", "c", TrustLevel::Master},
                                      {"c", "a", TrustLevel::Master}, {"a", "c", TrustLevel::Master}});
  const auto s = graph_stats(g);
  CHECK(s.nodes == 3);
  CHECK(s.edges == 4);
  CHECK(s.density == doctest::Approx(4.0 / 6.0));
  CHECK(s.average_degree == doctest::Approx(4.0 / 3.0));
}

TEST_CASE("save and load round-trip") {
  const auto g = testing::random_graph(40, 0.1, 3);
  const auto path = temp_file("roundtrip.tsv");
  save_trust_graph(g, path);
  const auto back = load_trust_graph(path).graph;
  CHECK(back.num_edges() == g.num_edges());
  for (const auto& e : g.edges()) {
    const auto s = back.find(g.node_id(e.src));
    const auto d = back.find(g.node_id(e.dst));
    REQUIRE(s);
    REQUIRE(d);
    CHECK(back.level(*s, *d) == e.level);
  }
  // Identical content (node indices may be interned in a different order).
  const auto content = [](const TrustGraph& x) {
    std::set<std::tuple<std::string, std::string, int>> s;
    for (const auto& e : x.edges()) s.insert({x.node_id(e.src), x.node_id(e.dst), int(level_index(e.level))});
    return s;
  };
  save_trust_graph(back, path);
  CHECK(content(load_trust_graph(path).graph) == content(g));
  std::filesystem::remove(path);
}

TEST_CASE("in/out indices are exact inverses (exhaustive, <=100 nodes)") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto g = testing::random_graph(20 * seed, 0.05, seed);
    g.validate();
    for (NodeIndex u = 0; u < g.num_nodes(); ++u) {
      std::set<std::pair<NodeIndex, int>> in_expected;
      for (NodeIndex v = 0; v < g.num_nodes(); ++v)
        if (auto l = g.level(v, u)) in_expected.insert({v, static_cast<int>(level_index(*l))});
      std::set<std::pair<NodeIndex, int>> in_actual;
      for (const auto& nb : g.in_neighbors(u)) in_actual.insert({nb.node, static_cast<int>(level_index(nb.level))});
      CHECK(in_actual == in_expected);
      CHECK(g.in_degree(u) == in_expected.size());
      std::size_t out = 0;
      for (NodeIndex v = 0; v < g.num_nodes(); ++v) out += g.has_edge(u, v) ? 1 : 0;
      CHECK(g.out_degree(u) == out);
    }
  }
}

TEST_CASE("split_edges: 10 edges at 0.8 -> 8/2, disjoint, deterministic") {
  TrustGraph g;
  for (int i = 0; i < 11; ++i) g.add_node("v" + std::to_string(i));
  for (NodeIndex i = 0; i < 10; ++i) g.set_edge(i, i + 1, TrustLevel::Apprentice);
  const auto s = split_edges(g, 0.8, 42);
  CHECK(s.train.size() == 8);
  CHECK(s.test.size() == 2);
  std::set<std::pair<NodeIndex, NodeIndex>> all;
  for (const auto& e : s.train) all.insert({e.src, e.dst});
  for (const auto& e : s.test) CHECK(all.insert({e.src, e.dst}).second);
  CHECK(all.size() == 10);
  const auto again = split_edges(g, 0.8, 42);
  CHECK(again.train == s.train);
  CHECK(again.test == s.test);
  CHECK_THROWS_AS(split_edges(g, 0.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(split_edges(g, 1.0, 1), std::invalid_argument);
}

TEST_CASE("split fraction within one edge of the request") {
  const auto g = testing::random_graph(60, 0.08, 9);
  for (double f : {0.4, 0.6, 0.8, 0.33}) {
    const auto s = split_edges(g, f, 5);
    CHECK(std::abs(static_cast<double>(s.train.size()) - f * static_cast<double>(g.num_edges())) <= 1.0);
  }
}

TEST_CASE("check-ins: valid row, invalid latitude, bad timestamp") {
  const auto one = parse_checkins("user_id,timestamp,lat,lon\nu1,2010-10-19T23:55:27Z,30.2,-97.7\n");
  REQUIRE(one.rows.size() == 1);
  CHECK(one.rows[0].user == "u1");
  CHECK(format_iso8601(one.rows[0].time) == "2010-10-19T23:55:27Z");

  const auto bad = parse_checkins("user_id,timestamp,lat,lon\nu1,2010-10-19T23:55:27Z,95,10\n");
  CHECK(bad.rows.empty());
  CHECK(bad.dropped_invalid_coordinates == 1);

  CHECK_THROWS_AS(parse_checkins("user_id,timestamp,lat,lon\nu1,yesterday,1,1\n"), ParseError);
  CHECK_THROWS_AS(load_checkins("/nonexistent/checkins.csv"), std::runtime_error);
}

TEST_CASE("timestamps with offsets normalize to UTC") {
  const auto a = parse_iso8601("2011-01-01 10:00:00+02:00");
  const auto b = parse_iso8601("2011-01-01T08:00:00Z");
  REQUIRE(a);
  REQUIRE(b);
  CHECK(*a == *b);
}

TEST_CASE("worker history") {
  CHECK(worker_history({}).empty());
  std::vector<CheckIn> single{{"u", {}, 10.0, 10.0}};
  const auto h1 = worker_history(single);
  CHECK(h1.at("u").len_km == 0.0);
  CHECK(h1.at("u").num == 1);

  using namespace std::chrono;
  std::vector<CheckIn> two{{"u", sys_seconds{seconds{100}}, 0.0, 0.9}, {"u", sys_seconds{seconds{0}}, 0.0, 0.0}};
  const auto h2 = worker_history(two);
  const double expected = 6371.0 * 0.9 * std::numbers::pi / 180.0;  // arc length on the equator
  CHECK(h2.at("u").len_km == doctest::Approx(expected).epsilon(1e-12));
  CHECK(h2.at("u").len_km == doctest::Approx(100.1).epsilon(1e-3));
  CHECK(h2.at("u").num == 2);
}

TEST_CASE("haversine basics") {
  CHECK(haversine_km({0, 0}, {0, 0}) == 0.0);
  CHECK(haversine_km({0, 0}, {0, 180}) == doctest::Approx(6371.0 * std::numbers::pi));
  CHECK(haversine_km({12, 34}, {-5, 60}) == doctest::Approx(haversine_km({-5, 60}, {12, 34})));
}

}  // TEST_SUITE
