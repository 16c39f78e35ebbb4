#include <doctest.h>

#include <filesystem>
#include <random>

#include "cmcs/region_partition.hpp"
#include "helpers.hpp"

using namespace cmcs;

TEST_SUITE("region_partition") {

TEST_CASE("k=1 centroid is the arithmetic mean") {
  const auto pts = testing::blobs(3, 40, 0.5, 2.0, 1);
  KMeansConfig cfg;
  cfg.k = 1;
  cfg.batch = 16;
  const auto r = minibatch_kmeans(pts, cfg);
  double lat = 0, lon = 0;
  for (const auto& p : pts) {
    lat += p.lat;
    lon += p.lon;
  }
  CHECK(r.centroids.points[0].lat == doctest::Approx(lat / double(pts.size())).epsilon(1e-12));
  CHECK(r.centroids.points[0].lon == doctest::Approx(lon / double(pts.size())).epsilon(1e-12));
  for (auto a : r.assignment) CHECK(a == 0);
}

TEST_CASE("k = |points| gives zero inertia") {
  const auto pts = testing::blobs(2, 10, 1.0, 5.0, 2);
  KMeansConfig cfg;
  cfg.k = pts.size();
  cfg.batch = 8;
  const auto r = minibatch_kmeans(pts, cfg);
  CHECK(r.inertia == doctest::Approx(0.0));
  std::vector<std::size_t> seen(cfg.k, 0);
  for (auto a : r.assignment) ++seen[a];
  for (auto s : seen) CHECK(s == 1);
}

TEST_CASE("two blobs 10 degrees apart: inertia within 10% of Lloyd") {
  const auto pts = testing::blobs(2, 500, 1.0, 5.0, 3);
  double lloyd_best = std::numeric_limits<double>::infinity();
  for (std::uint64_t s = 1; s <= 5; ++s) {
    const auto l = testing::lloyd(pts, 2, s);
    for (std::size_t i = 1; i < l.inertia_trace.size(); ++i)
      CHECK(l.inertia_trace[i] <= l.inertia_trace[i - 1] * (1 + 1e-12));
    lloyd_best = std::min(lloyd_best, testing::lloyd_inertia(pts, l.centroids));
  }
  KMeansConfig cfg;
  cfg.k = 2;
  cfg.batch = 100;
  const auto r = minibatch_kmeans(pts, cfg);
  CHECK(r.inertia <= 1.1 * lloyd_best);
  CHECK(r.inertia == doctest::Approx(inertia(pts, r.centroids.points, r.assignment)));
}

TEST_CASE("counts never decrease and centroids stay finite") {
  const auto pts = testing::blobs(4, 200, 0.8, 6.0, 4);
  for (const bool literal : {false, true}) {
    KMeansConfig cfg;
    cfg.k = 4;
    cfg.batch = 50;
    cfg.max_iter = 30;
    cfg.literal_batch_mean = literal;
    const auto r = minibatch_kmeans(pts, cfg);
    std::size_t total = 0;
    for (auto c : r.centroids.counts) total += c;
    CHECK(total >= cfg.batch);
    for (const auto& c : r.centroids.points) {
      CHECK(std::isfinite(c.lat));
      CHECK(std::isfinite(c.lon));
    }
  }
}

TEST_CASE("argument errors") {
  const std::vector<LatLon> pts{{0, 0}, {1, 1}};
  KMeansConfig cfg;
  cfg.k = 3;
  CHECK_THROWS_AS(minibatch_kmeans(pts, cfg), std::invalid_argument);
  cfg.k = 1;
  CHECK_THROWS_AS(minibatch_kmeans(std::vector<LatLon>{}, cfg), std::invalid_argument);
  cfg.batch = 0;
  CHECK_THROWS_AS(minibatch_kmeans(pts, cfg), std::invalid_argument);
}

TEST_CASE("deterministic per seed") {
  const auto pts = testing::blobs(5, 100, 0.7, 8.0, 5);
  KMeansConfig cfg;
  cfg.k = 5;
  cfg.batch = 64;
  const auto a = minibatch_kmeans(pts, cfg);
  const auto b = minibatch_kmeans(pts, cfg);
  CHECK(a.centroids.points == b.centroids.points);
  CHECK(a.assignment == b.assignment);
}

TEST_CASE("region bounds") {
  const std::vector<LatLon> pts{{1, 2}, {3, -4}, {10, 10}};
  Centroids c;
  c.points = {{2, -1}, {10, 10}, {50, 50}};
  c.counts = {2, 1, 0};
  const std::vector<std::size_t> assign{0, 0, 1};
  const auto rs = region_bounds(pts, assign, c);
  REQUIRE(rs.size() == 3);
  CHECK(rs[0].lat_min == 1);
  CHECK(rs[0].lat_max == 3);
  CHECK(rs[0].lon_min == -4);
  CHECK(rs[0].lon_max == 2);
  CHECK(rs[0].members == std::vector<std::size_t>{0, 1});
  CHECK(rs[1].lat_min == rs[1].lat_max);  // single point -> zero area
  CHECK(rs[1].lon_min == rs[1].lon_max);
  CHECK(rs[2].members.empty());  // empty cluster -> point box at its centroid
  CHECK(rs[2].lat_min == 50);
  CHECK(rs[2].lon_max == 50);

  const auto many = testing::blobs(6, 100, 1.0, 10.0, 6);
  KMeansConfig cfg;
  cfg.k = 6;
  cfg.batch = 100;
  const auto r = minibatch_kmeans(many, cfg);
  const auto regions = region_bounds(many, r.assignment, r.centroids);
  CHECK(regions.size() == 6);
  for (std::size_t i = 0; i < many.size(); ++i) CHECK(regions[r.assignment[i]].contains(many[i]));
  for (const auto& reg : regions) {
    CHECK(reg.lat_min <= reg.lat_max);
    CHECK(reg.lon_min <= reg.lon_max);
  }
}

TEST_CASE("assign_to_region: nearest centroid, ties to the lowest id") {
  std::vector<Region> rs(3);
  rs[0].id = 0;
  rs[0].centroid = {0, 10};
  rs[1].id = 1;
  rs[1].centroid = {0, -10};
  rs[2].id = 2;
  rs[2].centroid = {40, 0};
  CHECK(assign_to_region({40, 0}, rs) == 2);
  CHECK(assign_to_region({0, 0}, rs) == 0);  // equidistant to 0 and 1
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-60, 60);
  for (int i = 0; i < 100; ++i) {
    const LatLon p{u(rng), u(rng)};
    CHECK(assign_to_region(p, rs) == assign_to_region(p, rs));
  }
}

TEST_CASE("regions JSON round-trip") {
  const auto pts = testing::blobs(3, 30, 0.5, 4.0, 7);
  KMeansConfig cfg;
  cfg.k = 3;
  cfg.batch = 20;
  const auto r = minibatch_kmeans(pts, cfg);
  const auto regions = region_bounds(pts, r.assignment, r.centroids);
  const auto path = std::filesystem::temp_directory_path() / "cmcs_test_regions.json";
  save_regions_json(regions, path);
  const auto back = load_regions_json(path);
  REQUIRE(back.size() == regions.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    CHECK(back[i].id == regions[i].id);
    CHECK(back[i].lat_min == regions[i].lat_min);
    CHECK(back[i].lon_max == regions[i].lon_max);
    CHECK(back[i].centroid == regions[i].centroid);
  }
  std::filesystem::remove(path);
}

}  // TEST_SUITE
