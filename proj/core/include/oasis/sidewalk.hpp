#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "oasis/camera.hpp"
#include "oasis/geo.hpp"
#include "oasis/raster.hpp"
#include "oasis/taxonomy.hpp"

namespace oasis {

/// Default sample rows as fractions of image height, top to bottom.
inline constexpr std::array<double, 4> kDefaultSampleRows{0.55, 0.65, 0.75, 0.85};

enum class PathClass : std::uint8_t { sidewalk, road };

/// A contiguous run of path pixels on one image row.
struct RowSample {
  int row_v = 0;
  int left_u = 0;
  int right_u = 0;  // inclusive
  double mean_row_depth = 0.0;

  int run_length() const noexcept { return right_u - left_u + 1; }
};

/// A geolocated centerline sample with metric width.
struct SidewalkFragment {
  std::int64_t frame_id = 0;
  GeoPoint center;
  double width_m = 0.0;
  double ground_distance_m = 0.0;
  int row_v = 0;
  PathClass path_class = PathClass::sidewalk;
  double heading_deg = 0.0;  // camera heading of the source frame
};

struct RowSamplingParams {
  std::vector<double> row_fractions{kDefaultSampleRows.begin(), kDefaultSampleRows.end()};
  ClassId cls = ClassId::sidewalk;
  int min_pixels = 10;
  double min_valid_fraction = 0.25;
};

/// Image row for a height fraction.
int sample_row(double fraction, CameraModel const& camera) noexcept;

/// For each configured row: the maximal run of `cls` pixels containing the
/// row's median `cls` column, with its mean valid depth. Rows with fewer than
/// `min_pixels` class pixels or too little valid depth are skipped. Results
/// follow the order of `row_fractions`.
std::vector<RowSample> sample_rows(SegMask const& mask, DepthMap const& depth,
                                   CameraModel const& camera, RowSamplingParams const& params = {});

/// Pinhole width of a fronto-parallel run: pixels * depth / fx.
double fragment_width(double pixel_run_length, double depth_m, CameraModel const& camera) noexcept;

std::vector<SidewalkFragment> make_fragments(std::span<RowSample const> samples, Pose const& pose,
                                             CameraModel const& camera, std::int64_t frame_id,
                                             PathClass path_class = PathClass::sidewalk,
                                             double radius_m = kEarthRadiusM);

/// Probes the row at `row_fraction` straight ahead: when road pixels fill
/// most of the central `window_fraction` of the row and outnumber sidewalk
/// pixels there, the walker is on a crossing. Returns a sample centered on the principal point
/// whose depth averages the road pixels of the window.
std::optional<RowSample> crossing_probe(SegMask const& mask, DepthMap const& depth,
                                        CameraModel const& camera, double row_fraction,
                                        double window_fraction = 0.25,
                                        double min_valid_fraction = 0.25);

}  // namespace oasis
