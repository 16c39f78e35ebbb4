#include "cmcs/region_partition.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <json.hpp>
#include <limits>
#include <random>
#include <stdexcept>

namespace cmcs {

namespace {

double sq(double x) { return x * x; }

std::vector<LatLon> kmeanspp_seed(std::span<const LatLon> sample, std::size_t k, std::mt19937_64& rng) {
  std::vector<LatLon> centers;
  std::vector<char> used(sample.size(), 0);
  std::vector<double> d2(sample.size(), std::numeric_limits<double>::infinity());
  std::uniform_int_distribution<std::size_t> first(0, sample.size() - 1);
  std::size_t pick = first(rng);
  while (true) {
    centers.push_back(sample[pick]);
    used[pick] = 1;
    if (centers.size() == k) break;
    double total = 0.0;
    for (std::size_t i = 0; i < sample.size(); ++i) {
      d2[i] = std::min(d2[i], sq(haversine_km(sample[i], centers.back())));
      if (!used[i]) total += d2[i];
    }
    if (total > 0.0) {
      std::uniform_real_distribution<double> u(0.0, total);
      double r = u(rng);
      pick = sample.size();
      for (std::size_t i = 0; i < sample.size(); ++i) {
        if (used[i] || d2[i] <= 0.0) continue;
        pick = i;
        r -= d2[i];
        if (r <= 0.0) break;
      }
    } else {
      // Remaining points coincide with chosen centers; take any unused one.
      std::vector<std::size_t> rest;
      for (std::size_t i = 0; i < sample.size(); ++i)
        if (!used[i]) rest.push_back(i);
      std::uniform_int_distribution<std::size_t> any(0, rest.size() - 1);
      pick = rest[any(rng)];
    }
  }
  return centers;
}

}  // namespace

std::size_t nearest_centroid(const LatLon& p, std::span<const LatLon> centroids) {
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < centroids.size(); ++c) {
    const double d = haversine_km(p, centroids[c]);
    if (d < best_d) {
      best_d = d;
      best = c;
    }
  }
  return best;
}

double inertia(std::span<const LatLon> points, std::span<const LatLon> centroids,
               std::span<const std::size_t> assignment) {
  double s = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) s += sq(haversine_km(points[i], centroids[assignment[i]]));
  return s;
}

KMeansResult minibatch_kmeans(std::span<const LatLon> points, const KMeansConfig& cfg) {
  if (points.empty()) throw std::invalid_argument("minibatch_kmeans: no points");
  if (cfg.k == 0 || cfg.k > points.size()) throw std::invalid_argument("minibatch_kmeans: need 1 <= k <= |points|");
  if (cfg.batch == 0) throw std::invalid_argument("minibatch_kmeans: batch must be >= 1");

  std::mt19937_64 rng(cfg.seed);
  std::uniform_int_distribution<std::size_t> any(0, points.size() - 1);

  // Seeding sample: at least k distinct points.
  std::vector<LatLon> seed_sample;
  if (points.size() <= std::max(cfg.batch, cfg.k)) {
    seed_sample.assign(points.begin(), points.end());
  } else {
    std::vector<std::size_t> idx(points.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    const std::size_t m = std::max(cfg.batch, cfg.k);
    for (std::size_t i = 0; i < m; ++i) {
      std::uniform_int_distribution<std::size_t> pick(i, idx.size() - 1);
      std::swap(idx[i], idx[pick(rng)]);
      seed_sample.push_back(points[idx[i]]);
    }
  }

  KMeansResult r;
  r.centroids.points = kmeanspp_seed(seed_sample, cfg.k, rng);
  r.centroids.counts.assign(cfg.k, 0);

  std::vector<std::size_t> batch(cfg.batch), batch_assign(cfg.batch);
  std::vector<double> sum_lat(cfg.k), sum_lon(cfg.k);
  std::vector<std::size_t> batch_count(cfg.k);
  for (std::size_t it = 0; it < cfg.max_iter; ++it) {
    for (auto& b : batch) b = any(rng);
    for (std::size_t i = 0; i < batch.size(); ++i) {
      batch_assign[i] = nearest_centroid(points[batch[i]], r.centroids.points);
    }
    double moved = 0.0;
    if (cfg.literal_batch_mean) {
      std::fill(sum_lat.begin(), sum_lat.end(), 0.0);
      std::fill(sum_lon.begin(), sum_lon.end(), 0.0);
      std::fill(batch_count.begin(), batch_count.end(), 0);
      for (std::size_t i = 0; i < batch.size(); ++i) {
        const auto c = batch_assign[i];
        sum_lat[c] += points[batch[i]].lat;
        sum_lon[c] += points[batch[i]].lon;
        ++batch_count[c];
      }
      for (std::size_t c = 0; c < cfg.k; ++c) {
        if (batch_count[c] == 0) continue;
        const LatLon next{sum_lat[c] / double(batch_count[c]), sum_lon[c] / double(batch_count[c])};
        auto& cur = r.centroids.points[c];
        moved = std::max({moved, std::abs(next.lat - cur.lat), std::abs(next.lon - cur.lon)});
        cur = next;
        r.centroids.counts[c] += batch_count[c];
      }
    } else {
      for (std::size_t i = 0; i < batch.size(); ++i) {
        const auto c = batch_assign[i];
        auto& cur = r.centroids.points[c];
        const double eta = 1.0 / static_cast<double>(++r.centroids.counts[c]);
        const LatLon before = cur;
        cur.lat += eta * (points[batch[i]].lat - cur.lat);
        cur.lon += eta * (points[batch[i]].lon - cur.lon);
        moved = std::max({moved, std::abs(cur.lat - before.lat), std::abs(cur.lon - before.lon)});
      }
    }
    r.iterations = it + 1;
    for (const auto& c : r.centroids.points) {
      if (!std::isfinite(c.lat) || !std::isfinite(c.lon)) throw std::runtime_error("minibatch_kmeans: NaN centroid");
    }
    if (moved < cfg.tolerance_deg) break;
  }

  // Full assignment, one mean pass, final assignment.
  r.assignment.resize(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) r.assignment[i] = nearest_centroid(points[i], r.centroids.points);
  std::fill(sum_lat.begin(), sum_lat.end(), 0.0);
  std::fill(sum_lon.begin(), sum_lon.end(), 0.0);
  std::vector<std::size_t> full_count(cfg.k, 0);
  for (std::size_t i = 0; i < points.size(); ++i) {
    sum_lat[r.assignment[i]] += points[i].lat;
    sum_lon[r.assignment[i]] += points[i].lon;
    ++full_count[r.assignment[i]];
  }
  for (std::size_t c = 0; c < cfg.k; ++c) {
    if (full_count[c] == 0) continue;
    r.centroids.points[c] = {sum_lat[c] / double(full_count[c]), sum_lon[c] / double(full_count[c])};
  }
  for (std::size_t i = 0; i < points.size(); ++i) r.assignment[i] = nearest_centroid(points[i], r.centroids.points);
  r.inertia = inertia(points, r.centroids.points, r.assignment);
  return r;
}

std::vector<Region> region_bounds(std::span<const LatLon> points, std::span<const std::size_t> assignment,
                                  const Centroids& centroids) {
  if (assignment.size() != points.size()) throw std::invalid_argument("region_bounds: assignment size");
  std::vector<Region> regions(centroids.k());
  for (std::size_t c = 0; c < regions.size(); ++c) {
    auto& r = regions[c];
    r.id = c;
    r.centroid = centroids.points[c];
    r.lat_min = r.lat_max = r.centroid.lat;
    r.lon_min = r.lon_max = r.centroid.lon;
  }
  for (std::size_t i = 0; i < points.size(); ++i) {
    auto& r = regions.at(assignment[i]);
    const auto& p = points[i];
    if (r.members.empty()) {
      r.lat_min = r.lat_max = p.lat;
      r.lon_min = r.lon_max = p.lon;
    } else {
      r.lat_min = std::min(r.lat_min, p.lat);
      r.lat_max = std::max(r.lat_max, p.lat);
      r.lon_min = std::min(r.lon_min, p.lon);
      r.lon_max = std::max(r.lon_max, p.lon);
    }
    r.members.push_back(i);
  }
  return regions;
}

std::size_t assign_to_region(const LatLon& loc, std::span<const Region> regions) {
  if (regions.empty()) throw std::invalid_argument("assign_to_region: no regions");
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < regions.size(); ++i) {
    const double d = haversine_km(loc, regions[i].centroid);
    if (d < best_d || (d == best_d && regions[i].id < regions[best].id)) {
      best_d = d;
      best = i;
    }
  }
  return regions[best].id;
}

void save_regions_json(std::span<const Region> regions, const std::filesystem::path& path) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : regions) {
    arr.push_back({{"id", r.id},
                   {"centroid", {{"lat", r.centroid.lat}, {"lon", r.centroid.lon}}},
                   {"bounds",
                    {{"lon_max", r.lon_max}, {"lat_max", r.lat_max}, {"lon_min", r.lon_min}, {"lat_min", r.lat_min}}},
                   {"size", r.members.size()}});
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << nlohmann::json{{"regions", arr}}.dump(2) << '\n';
}

std::vector<Region> load_regions_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  const auto doc = nlohmann::json::parse(in);
  std::vector<Region> out;
  for (const auto& j : doc.at("regions")) {
    Region r;
    r.id = j.at("id").get<std::size_t>();
    r.centroid = {j.at("centroid").at("lat").get<double>(), j.at("centroid").at("lon").get<double>()};
    const auto& b = j.at("bounds");
    r.lon_max = b.at("lon_max").get<double>();
    r.lat_max = b.at("lat_max").get<double>();
    r.lon_min = b.at("lon_min").get<double>();
    r.lat_min = b.at("lat_min").get<double>();
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace cmcs
