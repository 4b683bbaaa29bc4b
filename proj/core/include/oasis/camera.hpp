#pragma once

#include <optional>

namespace oasis {

/// Pinhole camera mounted parallel to the ground. Pixel (u, v) is the ray
/// through integer coordinates; the principal point is (cx, cy).
struct CameraModel {
  int width_px = 1280;
  int height_px = 720;
  double hfov_deg = 90.0;
  double vfov_deg = 60.0;
  double fx_px = 640.0;
  double fy_px = 623.5382907247958;
  double cx_px = 640.0;
  double cy_px = 360.0;
  double mount_height_m = 1.2;

  /// Builds a camera, deriving focal lengths and principal point from the
  /// field of view when they are not given. Throws ValidationError.
  static CameraModel make(int width_px, int height_px, double hfov_deg, double vfov_deg,
                          double mount_height_m, std::optional<double> fx_px = std::nullopt,
                          std::optional<double> cx_px = std::nullopt);

  /// The 1280x720, 90x60 degree stereo camera used by the survey rig.
  static CameraModel survey_default();

  /// Forward distance to the ground plane seen by image row `v`; empty at or
  /// above the horizon.
  std::optional<double> ground_depth(double v) const noexcept;

  void validate() const;
};

}  // namespace oasis
