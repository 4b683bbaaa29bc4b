#include "oasis/geo.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "oasis/errors.hpp"

namespace oasis {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;
constexpr double kMaxBearingDeg = 89.0;

}  // namespace

double normalize_heading(double deg) noexcept {
  double h = std::fmod(deg, 360.0);
  if (h < 0.0) h += 360.0;
  return h >= 360.0 ? 0.0 : h;
}

double normalize_lon(double deg) noexcept {
  double l = std::fmod(deg + 180.0, 360.0);
  if (l < 0.0) l += 360.0;
  return l - 180.0;
}

bool is_valid(GeoPoint p) noexcept {
  return std::isfinite(p.lat_deg) && std::isfinite(p.lon_deg) && p.lat_deg >= -90.0 &&
         p.lat_deg <= 90.0 && p.lon_deg >= -180.0 && p.lon_deg <= 180.0;
}

double haversine_distance(GeoPoint a, GeoPoint b, double radius_m) noexcept {
  double const lat1 = a.lat_deg * kDeg;
  double const lat2 = b.lat_deg * kDeg;
  double const s_lat = std::sin((lat2 - lat1) / 2.0);
  double const s_lon = std::sin((b.lon_deg - a.lon_deg) * kDeg / 2.0);
  double const h = s_lat * s_lat + std::cos(lat1) * std::cos(lat2) * s_lon * s_lon;
  return 2.0 * radius_m * std::atan2(std::sqrt(h), std::sqrt(std::max(0.0, 1.0 - h)));
}

double initial_bearing(GeoPoint a, GeoPoint b) noexcept {
  double const lat1 = a.lat_deg * kDeg;
  double const lat2 = b.lat_deg * kDeg;
  double const dlon = (b.lon_deg - a.lon_deg) * kDeg;
  double const y = std::sin(dlon) * std::cos(lat2);
  double const x = std::cos(lat1) * std::sin(lat2) - std::sin(lat1) * std::cos(lat2) * std::cos(dlon);
  return normalize_heading(std::atan2(y, x) / kDeg);
}

GeoPoint destination_point(GeoPoint origin, double bearing_deg, double distance_m,
                           double radius_m) noexcept {
  if (distance_m == 0.0) return origin;
  double const delta = distance_m / radius_m;
  double const theta = bearing_deg * kDeg;
  double const lat1 = origin.lat_deg * kDeg;
  // Destination as a unit vector in a frame with x toward the origin's
  // meridian at the equator, y east, z toward the pole; atan2 keeps the
  // latitude well conditioned near the poles.
  double const x = std::cos(delta) * std::cos(lat1) - std::sin(delta) * std::cos(theta) * std::sin(lat1);
  double const y = std::sin(delta) * std::sin(theta);
  double const z = std::cos(delta) * std::sin(lat1) + std::sin(delta) * std::cos(theta) * std::cos(lat1);
  double const lat2 = std::atan2(z, std::hypot(x, y));
  double const dlon = std::atan2(y, x);
  return {lat2 / kDeg, normalize_lon(origin.lon_deg + dlon / kDeg)};
}

LocalOffset to_local(GeoPoint origin, GeoPoint p, double radius_m) noexcept {
  double const d = haversine_distance(origin, p, radius_m);
  if (d == 0.0) return {};
  double const b = initial_bearing(origin, p) * kDeg;
  return {d * std::sin(b), d * std::cos(b)};
}

GeoPoint from_local(GeoPoint origin, LocalOffset offset, double radius_m) noexcept {
  double const d = std::hypot(offset.east_m, offset.north_m);
  if (d == 0.0) return origin;
  return destination_point(origin, std::atan2(offset.east_m, offset.north_m) / kDeg, d, radius_m);
}

double pixel_bearing(double u, CameraModel const& camera) noexcept {
  return std::atan((u - camera.cx_px) / camera.fx_px) / kDeg;
}

double mean_depth(std::span<std::size_t const> pixels, DepthMap const& depth,
                  double min_valid_fraction) {
  if (pixels.empty()) throw InsufficientDepthError("mean_depth: empty pixel set");
  auto const data = depth.data();
  double sum = 0.0;
  std::size_t valid = 0;
  for (auto const idx : pixels) {
    float const d = data[idx];
    if (std::isfinite(d) && d > 0.0f) {
      sum += d;
      ++valid;
    }
  }
  if (valid == 0 ||
      static_cast<double>(valid) < min_valid_fraction * static_cast<double>(pixels.size())) {
    throw InsufficientDepthError("mean_depth: " + std::to_string(valid) + " of " +
                                 std::to_string(pixels.size()) + " depth samples valid");
  }
  return sum / static_cast<double>(valid);
}

double slant_range(double depth_m, double bearing_deg) {
  if (std::abs(bearing_deg) >= kMaxBearingDeg) {
    throw GeometryError("bearing " + std::to_string(bearing_deg) + " deg off-axis is degenerate");
  }
  return depth_m / std::cos(bearing_deg * kDeg);
}

GeoPoint locate_object(Pose const& pose, double centroid_u, double depth_m,
                       CameraModel const& camera, double radius_m) {
  if (!(depth_m > 0.0)) throw ValidationError("locate_object: depth must be > 0");
  double const offset = pixel_bearing(centroid_u, camera);
  double const range = slant_range(depth_m, offset);
  return destination_point(pose.position, normalize_heading(pose.heading_deg + offset), range,
                           radius_m);
}

}  // namespace oasis
