#pragma once

namespace cmcs {

inline constexpr double kEarthRadiusKm = 6371.0;

struct LatLon {
  double lat{0.0};
  double lon{0.0};

  friend bool operator==(const LatLon&, const LatLon&) = default;
};

// Great-circle distance in kilometres.
double haversine_km(const LatLon& a, const LatLon& b);

bool valid_coordinates(const LatLon& p);

}  // namespace cmcs
