#include "oasis/camera.hpp"

#include <cmath>
#include <numbers>

#include "oasis/errors.hpp"

namespace oasis {

namespace {
double deg2rad(double d) { return d * std::numbers::pi / 180.0; }
}  // namespace

CameraModel CameraModel::make(int width_px, int height_px, double hfov_deg, double vfov_deg,
                              double mount_height_m, std::optional<double> fx_px,
                              std::optional<double> cx_px) {
  CameraModel c;
  c.width_px = width_px;
  c.height_px = height_px;
  c.hfov_deg = hfov_deg;
  c.vfov_deg = vfov_deg;
  c.mount_height_m = mount_height_m;
  if (width_px <= 0 || height_px <= 0) throw ValidationError("camera: width_px and height_px must be > 0");
  if (!(hfov_deg > 0.0 && hfov_deg < 180.0)) throw ValidationError("camera: hfov_deg must be in (0, 180)");
  if (!(vfov_deg > 0.0 && vfov_deg < 180.0)) throw ValidationError("camera: vfov_deg must be in (0, 180)");
  c.fx_px = fx_px.value_or((width_px / 2.0) / std::tan(deg2rad(hfov_deg) / 2.0));
  c.cx_px = cx_px.value_or(width_px / 2.0);
  c.fy_px = (height_px / 2.0) / std::tan(deg2rad(vfov_deg) / 2.0);
  c.cy_px = height_px / 2.0;
  c.validate();
  return c;
}

CameraModel CameraModel::survey_default() { return make(1280, 720, 90.0, 60.0, 1.2); }

std::optional<double> CameraModel::ground_depth(double v) const noexcept {
  double const dv = v - cy_px;
  if (dv <= 0.0) return std::nullopt;
  return mount_height_m * fy_px / dv;
}

void CameraModel::validate() const {
  if (width_px <= 0 || height_px <= 0) throw ValidationError("camera: width_px and height_px must be > 0");
  if (!(hfov_deg > 0.0 && hfov_deg < 180.0)) throw ValidationError("camera: hfov_deg must be in (0, 180)");
  if (!(fx_px > 0.0) || !(fy_px > 0.0)) throw ValidationError("camera: focal lengths must be > 0");
  if (!std::isfinite(cx_px) || !std::isfinite(cy_px)) throw ValidationError("camera: principal point must be finite");
  if (!(mount_height_m > 0.0)) throw ValidationError("camera: mount_height_m must be > 0");
}

}  // namespace oasis
