#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "oasis/homography.hpp"
#include "oasis/ingest.hpp"
#include "oasis/raster.hpp"
#include "oasis/taxonomy.hpp"

namespace oasis {

/// One mask of a fusion window plus its alignment onto the last frame's
/// grid. An empty alignment means identity.
struct WindowFrame {
  std::reference_wrapper<SegMask const> mask;
  std::optional<Homography> to_last;
};

/// Union of the window masks for `classes`, on the last frame's grid.
///
/// Earlier masks are resampled (nearest neighbor) through their alignment.
/// A pixel takes the latest-listed class of `classes` present at that
/// location in any aligned mask; pixels claimed by no fused class keep the
/// last frame's label. Throws ValidationError on an empty window or mismatched
/// dimensions, GeometryError on a singular alignment.
SegMask temporal_union(std::span<WindowFrame const> window,
                       std::span<ClassId const> classes = kDefaultFusedClasses);

/// Maintains the sliding window of raw masks for the streaming pipeline.
class TemporalFuser {
 public:
  explicit TemporalFuser(std::size_t window_length = 3,
                         std::vector<ClassId> classes = {kDefaultFusedClasses.begin(),
                                                         kDefaultFusedClasses.end()});

  /// Adds the newest mask. `from_prev` maps the previous mask's grid onto
  /// this one; when absent, older masks are treated as aligned.
  SegMask push(SegMask mask, std::optional<Homography> const& from_prev);

  std::size_t window_length() const noexcept { return window_length_; }
  void reset() { window_.clear(); }

 private:
  struct Entry {
    SegMask mask;
    std::optional<Homography> to_current;
  };
  std::size_t window_length_;
  std::vector<ClassId> classes_;
  std::deque<Entry> window_;
};

/// Pixelwise scores for one class. A score is empty when its denominator is
/// zero (undefined, not 0 or 1).
struct ClassMetrics {
  ClassId cls = ClassId::road;
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  std::uint64_t fn = 0;
  std::optional<double> iou;
  std::optional<double> precision;
  std::optional<double> recall;
};

/// Throws ValidationError on mismatched dimensions.
std::vector<ClassMetrics> seg_metrics(SegMask const& pred, SegMask const& truth,
                                      std::span<ClassId const> classes);

/// Source of segmentation masks for a frame.
class SegmentationProvider {
 public:
  virtual ~SegmentationProvider() = default;
  /// Output dimensions equal the camera's image dimensions.
  virtual SegMask segment(FrameDescriptor const& frame) = 0;
};

/// Reads precomputed masks referenced by the frame descriptor.
class FileSegmentationProvider final : public SegmentationProvider {
 public:
  explicit FileSegmentationProvider(CameraModel camera) : camera_{camera} {}
  SegMask segment(FrameDescriptor const& frame) override;

 private:
  CameraModel camera_;
};

}  // namespace oasis
