#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>

namespace adviser {

struct GeoPoint {
  double lat = 0.0;
  double lon = 0.0;
  friend bool operator==(const GeoPoint&, const GeoPoint&) = default;
};

inline constexpr double kEarthRadiusKm = 6371.0088;
inline constexpr double kKmPerDegreeLat = kEarthRadiusKm * std::numbers::pi / 180.0;

inline double deg_to_rad(double d) { return d * std::numbers::pi / 180.0; }

// Great-circle distance in kilometres.
inline double haversine_km(GeoPoint a, GeoPoint b) {
  const double dlat = deg_to_rad(b.lat - a.lat);
  const double dlon = deg_to_rad(b.lon - a.lon);
  const double s1 = std::sin(dlat / 2.0);
  const double s2 = std::sin(dlon / 2.0);
  const double h = s1 * s1 + std::cos(deg_to_rad(a.lat)) * std::cos(deg_to_rad(b.lat)) * s2 * s2;
  return 2.0 * kEarthRadiusKm * std::asin(std::min(1.0, std::sqrt(h)));
}

struct PlanarPoint {
  double x = 0.0;  // km east of the origin
  double y = 0.0;  // km north of the origin
};

// Equirectangular projection around a fixed origin. Accurate to well under a
// percent over city-sized regions, which is all the grid and k-means need.
class LocalProjection {
 public:
  explicit LocalProjection(GeoPoint origin)
      : origin_(origin), km_per_deg_lon_(kKmPerDegreeLat * std::cos(deg_to_rad(origin.lat))) {}

  PlanarPoint project(GeoPoint p) const {
    return {(p.lon - origin_.lon) * km_per_deg_lon_, (p.lat - origin_.lat) * kKmPerDegreeLat};
  }
  GeoPoint unproject(PlanarPoint p) const {
    return {origin_.lat + p.y / kKmPerDegreeLat, origin_.lon + p.x / km_per_deg_lon_};
  }
  GeoPoint origin() const { return origin_; }

 private:
  GeoPoint origin_;
  double km_per_deg_lon_;
};

}  // namespace adviser
