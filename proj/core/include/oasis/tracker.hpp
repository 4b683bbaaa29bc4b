#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "oasis/camera.hpp"
#include "oasis/geo.hpp"
#include "oasis/homography.hpp"
#include "oasis/raster.hpp"
#include "oasis/taxonomy.hpp"

namespace oasis {

/// A 4-connected region of one static-infrastructure class.
struct Detection {
  ClassId cls = ClassId::pole;
  PixelCoord centroid;
  std::size_t pixel_count = 0;
  std::vector<std::size_t> pixels;  // linear indices, scan order
  bool touches_side = false;        // reaches column 0 or width-1
};

/// Extracts connected components of the given classes, dropping those
/// smaller than `min_region_px`. Ordered by first pixel in scan order.
std::vector<Detection> extract_detections(SegMask const& mask,
                                          std::span<ClassId const> classes = kStaticInfrastructure,
                                          std::size_t min_region_px = 50);

/// Column and forward depth used to geolocate a detection in one frame.
struct RangeMeasurement {
  double centroid_u = 0.0;
  double depth_m = 0.0;
};

/// Measures a detection against the frame's own (unfused) mask: only pixels
/// the raw mask labels with the detection's class count, so fused pixels
/// borrowed from earlier frames never bias position or depth. Detections
/// clipped by the left/right image border are not measured.
std::optional<RangeMeasurement> measure_detection(Detection const& detection, SegMask const& raw,
                                                  DepthMap const& depth,
                                                  double min_valid_fraction = 0.25);

enum class TrackState : std::uint8_t { active, temporarily_lost, permanently_lost };

struct Observation {
  std::int64_t frame_id = 0;
  GeoPoint location;
};

struct TrackedObject {
  std::int64_t object_id = 0;
  ClassId cls = ClassId::pole;
  TrackState state = TrackState::active;
  int lost_frames = 0;
  PixelCoord centroid;
  std::vector<Observation> observations;
};

struct LiveCentroid {
  std::int64_t object_id = 0;
  ClassId cls = ClassId::pole;
  PixelCoord centroid;
};

struct MatchResult {
  std::vector<std::pair<std::int64_t, std::size_t>> matches;  // object_id, detection index
  std::vector<std::int64_t> unmatched_existing;
  std::vector<std::size_t> unmatched_fresh;
};

/// Greedy global association: repeatedly takes the closest same-class
/// (object, detection) pair within `max_match_px`; ties go to the lower
/// object_id, then the lower detection index. One-to-one.
MatchResult match_detections(std::span<LiveCentroid const> existing,
                             std::span<Detection const> fresh, double max_match_px);

struct TrackerConfig {
  int lost_threshold = 5;
  double max_match_px = 100.0;
  double earth_radius_m = kEarthRadiusM;
};

/// Centroid tracker with homography compensation and the
/// active / temporarily lost / permanently lost state machine.
///
/// Single writer: call step() once per frame, in frame order.
class Tracker {
 public:
  Tracker(TrackerConfig config, CameraModel camera);

  /// Advances one frame. `measurements` is either empty or parallel to
  /// `fresh`; a measured detection adds a geolocation observation to its
  /// object. Returns the objects that became permanently lost this step.
  std::vector<TrackedObject> step(std::int64_t frame_id, std::span<Detection const> fresh,
                                  std::optional<Homography> const& prev_to_current,
                                  Pose const& pose,
                                  std::span<std::optional<RangeMeasurement> const> measurements = {});

  std::span<TrackedObject const> live() const noexcept { return live_; }
  std::span<TrackedObject const> retired() const noexcept { return retired_; }

  /// Every object ever created, ordered by object_id.
  std::vector<TrackedObject> all_objects() const;

  std::int64_t next_id() const noexcept { return next_id_; }
  TrackerConfig const& config() const noexcept { return config_; }

 private:
  TrackerConfig config_;
  CameraModel camera_;
  std::vector<TrackedObject> live_;
  std::vector<TrackedObject> retired_;
  std::int64_t next_id_ = 1;
};

struct LocatedObject {
  std::int64_t object_id = 0;
  ClassId cls = ClassId::pole;
  GeoPoint location;
  std::size_t observation_count = 0;
};

/// Per-axis median of each object's observations; objects with fewer than
/// `min_observations` are dropped. Ordered by object_id.
std::vector<LocatedObject> finalize_locations(std::span<TrackedObject const> objects,
                                              std::size_t min_observations = 2);

}  // namespace oasis
