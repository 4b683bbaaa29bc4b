#pragma once

#include <cstddef>
#include <span>

#include "oasis/camera.hpp"
#include "oasis/raster.hpp"

namespace oasis {

/// Mean Earth radius (IUGG), used as the sphere for all great-circle math.
inline constexpr double kEarthRadiusM = 6371008.8;

struct GeoPoint {
  double lat_deg = 0.0;
  double lon_deg = 0.0;

  friend bool operator==(GeoPoint, GeoPoint) = default;
};

/// Camera position and heading (degrees clockwise from true north, [0, 360)).
struct Pose {
  GeoPoint position;
  double heading_deg = 0.0;
  double timestamp_s = 0.0;
};

/// East/north offset in meters on the local tangent plane.
struct LocalOffset {
  double east_m = 0.0;
  double north_m = 0.0;
};

double normalize_heading(double deg) noexcept;
double normalize_lon(double deg) noexcept;
bool is_valid(GeoPoint p) noexcept;

double haversine_distance(GeoPoint a, GeoPoint b, double radius_m = kEarthRadiusM) noexcept;

/// Forward azimuth from `a` towards `b`, degrees in [0, 360).
double initial_bearing(GeoPoint a, GeoPoint b) noexcept;

GeoPoint destination_point(GeoPoint origin, double bearing_deg, double distance_m,
                           double radius_m = kEarthRadiusM) noexcept;

/// Azimuthal-equidistant projection about `origin`. Exact inverse of
/// `from_local` on the sphere: distance and bearing are preserved.
LocalOffset to_local(GeoPoint origin, GeoPoint p, double radius_m = kEarthRadiusM) noexcept;
GeoPoint from_local(GeoPoint origin, LocalOffset offset, double radius_m = kEarthRadiusM) noexcept;

/// Signed horizontal angle of column `u` from the optical axis, degrees.
/// Negative is left of the heading.
double pixel_bearing(double u, CameraModel const& camera) noexcept;

/// Arithmetic mean of the valid (finite, positive) depth samples at the given
/// linear pixel indices. Throws InsufficientDepthError when the pixel set is
/// empty or fewer than `min_valid_fraction` of its samples are valid.
double mean_depth(std::span<std::size_t const> pixels, DepthMap const& depth,
                  double min_valid_fraction = 0.25);

/// Horizontal distance to a point at forward depth `depth_m` seen at
/// `bearing_deg` off-axis.
double slant_range(double depth_m, double bearing_deg);

/// Geolocates an object seen at column `centroid_u` with forward depth
/// `depth_m`. Throws GeometryError when the off-axis bearing reaches 89
/// degrees, ValidationError when depth is not positive.
GeoPoint locate_object(Pose const& pose, double centroid_u, double depth_m,
                       CameraModel const& camera, double radius_m = kEarthRadiusM);

}  // namespace oasis
