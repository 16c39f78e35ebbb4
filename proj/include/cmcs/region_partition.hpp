#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "cmcs/geo.hpp"

namespace cmcs {

struct Centroids {
  std::vector<LatLon> points;
  std::vector<std::size_t> counts;  // cumulative mini-batch assignments

  std::size_t k() const { return points.size(); }
};

struct KMeansConfig {
  std::size_t k{100};
  std::size_t batch{3100};
  std::size_t max_iter{200};
  std::uint64_t seed{1};
  double tolerance_deg{1e-6};
  /// Replace each touched centroid by the plain batch mean instead of the
  /// 1/count running update.
  bool literal_batch_mean{false};
};

struct KMeansResult {
  Centroids centroids;
  std::vector<std::size_t> assignment;  // nearest centroid per point
  double inertia{0.0};                  // sum of squared haversine km
  std::size_t iterations{0};
};

/// Index of the nearest centroid; ties go to the lowest index.
std::size_t nearest_centroid(const LatLon& p, std::span<const LatLon> centroids);

double inertia(std::span<const LatLon> points, std::span<const LatLon> centroids,
               std::span<const std::size_t> assignment);

/// Mini-batch k-means with k-means++ seeding drawn from a sampled batch. After
/// the mini-batch phase one full assignment/mean pass fixes the centroids and
/// the returned assignment maps every point to its nearest final centroid.
KMeansResult minibatch_kmeans(std::span<const LatLon> points, const KMeansConfig& cfg);

struct Region {
  std::size_t id{0};
  double lon_max{0.0};
  double lat_max{0.0};
  double lon_min{0.0};
  double lat_min{0.0};
  LatLon centroid;
  std::vector<std::size_t> members;  // point indices

  bool contains(const LatLon& p) const {
    return p.lat >= lat_min && p.lat <= lat_max && p.lon >= lon_min && p.lon <= lon_max;
  }
};

/// One region per centroid; empty clusters get a zero-area box at the centroid.
std::vector<Region> region_bounds(std::span<const LatLon> points, std::span<const std::size_t> assignment,
                                  const Centroids& centroids);

/// Region with the nearest centroid; ties go to the lowest id.
std::size_t assign_to_region(const LatLon& loc, std::span<const Region> regions);

void save_regions_json(std::span<const Region> regions, const std::filesystem::path& path);
std::vector<Region> load_regions_json(const std::filesystem::path& path);

}  // namespace cmcs
