#include "oasis/homography.hpp"

#include <cmath>
#include <numbers>

#include <Eigen/LU>

#include "oasis/errors.hpp"

namespace oasis {

namespace {
constexpr double kEps = 1e-12;
}

Homography Homography::from_row_major(std::array<double, 9> const& values) {
  Eigen::Matrix3d m;
  m << values[0], values[1], values[2], values[3], values[4], values[5], values[6], values[7],
      values[8];
  return Homography{m};
}

Homography Homography::translation(double du, double dv) {
  return from_row_major({1, 0, du, 0, 1, dv, 0, 0, 1});
}

std::array<double, 9> Homography::row_major() const {
  return {m_(0, 0), m_(0, 1), m_(0, 2), m_(1, 0), m_(1, 1), m_(1, 2), m_(2, 0), m_(2, 1), m_(2, 2)};
}

Homography Homography::inverse() const {
  double const det = m_.determinant();
  if (!(std::abs(det) > kEps)) throw GeometryError("homography is singular");
  return Homography{m_.inverse()};
}

PixelCoord Homography::apply(PixelCoord p) const {
  if (!std::isfinite(p.u) || !std::isfinite(p.v)) throw GeometryError("warp of non-finite point");
  Eigen::Vector3d const q = m_ * Eigen::Vector3d{p.u, p.v, 1.0};
  if (!(std::abs(q.z()) >= kEps)) throw GeometryError("degenerate warp: w is ~0");
  return {q.x() / q.z(), q.y() / q.z()};
}

Homography ground_plane_homography(CameraModel const& camera, PlanarPose const& from,
                                   PlanarPose const& to) {
  constexpr double kDeg = std::numbers::pi / 180.0;
  Eigen::Vector2d const fa{std::sin(from.heading_deg * kDeg), std::cos(from.heading_deg * kDeg)};
  Eigen::Vector2d const ra{fa.y(), -fa.x()};
  Eigen::Vector2d const fb{std::sin(to.heading_deg * kDeg), std::cos(to.heading_deg * kDeg)};
  Eigen::Vector2d const rb{fb.y(), -fb.x()};
  Eigen::Vector2d const d{from.east_m - to.east_m, from.north_m - to.north_m};
  double const h = camera.mount_height_m;

  // Camera coordinates: x right, y down, z forward. Ground points have y = h.
  Eigen::Matrix3d a;
  a << ra.dot(rb), d.dot(rb) / h, fa.dot(rb),
       0.0,        1.0,           0.0,
       ra.dot(fb), d.dot(fb) / h, fa.dot(fb);

  Eigen::Matrix3d k;
  k << camera.fx_px, 0.0, camera.cx_px,
       0.0, camera.fy_px, camera.cy_px,
       0.0, 0.0, 1.0;
  return Homography{k * a * k.inverse()};
}

}  // namespace oasis
