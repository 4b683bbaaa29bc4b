#include "oasis/sidewalk.hpp"

#include <algorithm>
#include <cmath>

namespace oasis {

namespace {

std::optional<double> run_depth(DepthMap const& depth, int v, int left, int right,
                                double min_valid_fraction) {
  auto const row = depth.row(v);
  double sum = 0.0;
  int valid = 0;
  for (int u = left; u <= right; ++u) {
    float const d = row[static_cast<std::size_t>(u)];
    if (std::isfinite(d) && d > 0.0f) {
      sum += d;
      ++valid;
    }
  }
  int const total = right - left + 1;
  if (valid == 0 || valid < min_valid_fraction * total) return std::nullopt;
  return sum / valid;
}

}  // namespace

int sample_row(double fraction, CameraModel const& camera) noexcept {
  auto const v = static_cast<int>(std::lround(fraction * camera.height_px));
  return std::clamp(v, 0, camera.height_px - 1);
}

std::vector<RowSample> sample_rows(SegMask const& mask, DepthMap const& depth,
                                   CameraModel const& camera, RowSamplingParams const& params) {
  std::vector<RowSample> out;
  auto const id = to_id(params.cls);
  std::vector<int> cols;
  for (double const f : params.row_fractions) {
    int const v = sample_row(f, camera);
    if (v >= mask.height()) continue;
    auto const row = mask.row(v);
    cols.clear();
    for (int u = 0; u < mask.width(); ++u) {
      if (row[static_cast<std::size_t>(u)] == id) cols.push_back(u);
    }
    if (static_cast<int>(cols.size()) < params.min_pixels || cols.empty()) continue;
    int const median = cols[(cols.size() - 1) / 2];
    int left = median;
    int right = median;
    while (left > 0 && row[static_cast<std::size_t>(left - 1)] == id) --left;
    while (right + 1 < mask.width() && row[static_cast<std::size_t>(right + 1)] == id) ++right;
    auto const d = run_depth(depth, v, left, right, params.min_valid_fraction);
    if (!d) continue;
    out.push_back({v, left, right, *d});
  }
  return out;
}

double fragment_width(double pixel_run_length, double depth_m, CameraModel const& camera) noexcept {
  return pixel_run_length * depth_m / camera.fx_px;
}

std::vector<SidewalkFragment> make_fragments(std::span<RowSample const> samples, Pose const& pose,
                                             CameraModel const& camera, std::int64_t frame_id,
                                             PathClass path_class, double radius_m) {
  std::vector<SidewalkFragment> out;
  out.reserve(samples.size());
  for (auto const& s : samples) {
    double const center_u = (s.left_u + s.right_u) / 2.0;
    SidewalkFragment f;
    f.frame_id = frame_id;
    f.center = locate_object(pose, center_u, s.mean_row_depth, camera, radius_m);
    f.width_m = fragment_width(s.run_length(), s.mean_row_depth, camera);
    f.ground_distance_m = s.mean_row_depth;
    f.row_v = s.row_v;
    f.path_class = path_class;
    f.heading_deg = pose.heading_deg;
    out.push_back(f);
  }
  return out;
}

std::optional<RowSample> crossing_probe(SegMask const& mask, DepthMap const& depth,
                                        CameraModel const& camera, double row_fraction,
                                        double window_fraction, double min_valid_fraction) {
  int const v = sample_row(row_fraction, camera);
  int const half = std::max(1, static_cast<int>(window_fraction * camera.width_px / 2.0));
  int const center = std::clamp(static_cast<int>(std::lround(camera.cx_px)), 0, mask.width() - 1);
  int const left = std::max(0, center - half);
  int const right = std::min(mask.width() - 1, center + half);
  auto const row = mask.row(v);
  auto const drow = depth.row(v);
  int road = 0;
  int walk = 0;
  int valid = 0;
  double sum = 0.0;
  for (int u = left; u <= right; ++u) {
    auto const c = row[static_cast<std::size_t>(u)];
    if (c == to_id(ClassId::sidewalk)) ++walk;
    if (c != to_id(ClassId::road)) continue;
    ++road;
    float const d = drow[static_cast<std::size_t>(u)];
    if (std::isfinite(d) && d > 0.0f) {
      sum += d;
      ++valid;
    }
  }
  if (road <= walk || road * 2 <= right - left + 1 || valid == 0 || valid < min_valid_fraction * road) return std::nullopt;
  return RowSample{v, center, center, sum / valid};
}

}  // namespace oasis
