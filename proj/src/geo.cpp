#include "cmcs/geo.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace cmcs {

namespace {
constexpr double to_rad(double deg) { return deg * std::numbers::pi / 180.0; }
}  // namespace

double haversine_km(const LatLon& a, const LatLon& b) {
  const double dlat = to_rad(b.lat - a.lat);
  const double dlon = to_rad(b.lon - a.lon);
  const double s1 = std::sin(dlat / 2.0);
  const double s2 = std::sin(dlon / 2.0);
  double h = s1 * s1 + std::cos(to_rad(a.lat)) * std::cos(to_rad(b.lat)) * s2 * s2;
  h = std::clamp(h, 0.0, 1.0);
  return 2.0 * kEarthRadiusKm * std::asin(std::sqrt(h));
}

bool valid_coordinates(const LatLon& p) {
  return std::isfinite(p.lat) && std::isfinite(p.lon) && p.lat >= -90.0 && p.lat <= 90.0 &&
         p.lon >= -180.0 && p.lon <= 180.0;
}

}  // namespace cmcs
