#pragma once

#include <array>

#include <Eigen/Core>

#include "oasis/camera.hpp"

namespace oasis {

struct PixelCoord {
  double u = 0.0;
  double v = 0.0;
};

/// 3x3 projective transform between the pixel grids of two frames.
class Homography {
 public:
  Homography() : m_{Eigen::Matrix3d::Identity()} {}
  explicit Homography(Eigen::Matrix3d const& m) : m_{m} {}

  static Homography identity() { return {}; }
  static Homography from_row_major(std::array<double, 9> const& values);
  static Homography translation(double du, double dv);

  std::array<double, 9> row_major() const;
  Eigen::Matrix3d const& matrix() const noexcept { return m_; }
  double determinant() const { return m_.determinant(); }

  /// Throws GeometryError when |det| <= 1e-12.
  Homography inverse() const;

  /// Throws GeometryError for non-finite input or |w| < 1e-12.
  PixelCoord apply(PixelCoord p) const;

  /// `then * first` applies `first`, then `then`.
  friend Homography operator*(Homography const& then, Homography const& first) {
    return Homography{then.m_ * first.m_};
  }

 private:
  Eigen::Matrix3d m_;
};

inline PixelCoord warp_centroid(Homography const& h, PixelCoord p) { return h.apply(p); }

/// Camera pose on a local east/north plane.
struct PlanarPose {
  double east_m = 0.0;
  double north_m = 0.0;
  double heading_deg = 0.0;
};

/// Homography induced by the ground plane between two poses of the same
/// camera: maps ground pixels in `from` to the same ground point in `to`.
Homography ground_plane_homography(CameraModel const& camera, PlanarPose const& from,
                                   PlanarPose const& to);

}  // namespace oasis
