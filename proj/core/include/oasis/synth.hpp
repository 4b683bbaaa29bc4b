#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "oasis/camera.hpp"
#include "oasis/geo.hpp"
#include "oasis/graph.hpp"
#include "oasis/homography.hpp"
#include "oasis/ingest.hpp"
#include "oasis/raster.hpp"
#include "oasis/tracker.hpp"

namespace oasis {

inline constexpr int kSceneVersion = 1;

/// Centerline of a walkable path in scene-local meters (east, north).
struct ScenePath {
  std::vector<LocalOffset> points;
  std::vector<double> widths;  // one per point
  EdgeKind kind = EdgeKind::sidewalk;
};

struct ScenePolygon {
  std::vector<LocalOffset> points;
};

/// Upright billboard standing on the ground.
struct SceneObject {
  std::int64_t id = 0;
  ClassId cls = ClassId::pole;
  LocalOffset at;
  double radius_m = 0.15;
  double height_m = 3.0;
};

struct NoiseModel {
  double gps_sigma_m = 0.0;        // per axis
  double heading_sigma_deg = 0.0;  // recorded heading
  double depth_rel_sigma = 0.0;    // per pixel, multiplicative
  double dropout_prob = 0.0;       // per pixel invalid depth
};

/// Declarative street scene. Geometry is in meters on the tangent plane at
/// `origin`; crossing paths are not painted (they lie on road surface).
struct SceneSpec {
  int scene_version = kSceneVersion;
  std::string name;
  GeoPoint origin{47.6097, -122.3331};
  std::optional<CameraModel> camera;
  std::vector<ScenePath> paths;
  std::vector<ScenePolygon> roads;
  std::vector<SceneObject> objects;
  std::vector<LocalOffset> trajectory;
  double speed_mps = 1.4;
  NoiseModel noise;
  double max_range_m = 60.0;
};

SceneSpec parse_scene(nlohmann::json const& doc);
SceneSpec load_scene(std::filesystem::path const& path);
nlohmann::json scene_to_json(SceneSpec const& scene);
void validate_scene(SceneSpec const& scene);

/// Built-in scenes: "corridor", "grid", "fragmented".
std::vector<std::string> builtin_scene_names();
std::optional<SceneSpec> builtin_scene(std::string_view name);

/// Straight north-running sidewalk of `length_m` with `object_count`
/// roadside objects and a parallel road.
SceneSpec corridor_scene(double length_m = 500.0, int object_count = 31, double width_m = 1.8);

struct RenderedFrame {
  SegMask mask;
  DepthMap depth;
};

/// Pinhole rasterizer: ground plane by ray/plane intersection, objects as
/// fronto-parallel billboards at their true forward depth, sky above the
/// horizon (invalid depth). Nearest surface wins.
class SceneRenderer {
 public:
  SceneRenderer(SceneSpec const& scene, CameraModel camera);

  /// Throws ValidationError when the camera is not above ground.
  RenderedFrame render(PlanarPose const& pose, std::uint64_t noise_seed = 0) const;

  CameraModel const& camera() const noexcept { return camera_; }

 private:
  struct Shape {
    std::vector<LocalOffset> ring;  // polygon, or empty for a disc
    LocalOffset center;
    double radius = 0.0;
    ClassId cls = ClassId::terrain;
    double reach = 0.0;  // bounding radius about `center`
  };
  SceneSpec const* scene_;
  CameraModel camera_;
  std::vector<Shape> shapes_;  // painted in order
};

/// A frame of the simulated survey.
struct SurveyFrame {
  std::int64_t frame_id = 0;
  double timestamp_s = 0.0;
  PlanarPose true_pose;
  double recorded_heading_deg = 0.0;
};

/// Walks the scene trajectory at constant speed: frame poses at the frame
/// rate, GPS fixes every 0.5 s with Gaussian noise, noisy headings.
class Survey {
 public:
  static constexpr double kFixIntervalS = 0.5;

  Survey(SceneSpec const& scene, CameraModel camera, double frame_rate_hz = 15.0, std::uint64_t seed = 0);

  std::span<SurveyFrame const> frames() const noexcept { return frames_; }
  std::span<GpsFix const> fixes() const noexcept { return fixes_; }
  double trajectory_length_m() const noexcept { return length_m_; }
  GeoPoint to_geo(LocalOffset p) const;

  /// Exact ground-plane homography from frame i to frame i + 1.
  Homography homography_to_next(std::size_t i) const;

  CameraModel const& camera() const noexcept { return camera_; }
  std::uint64_t seed() const noexcept { return seed_; }

 private:
  PlanarPose pose_at(double s) const;

  SceneSpec const* scene_;
  CameraModel camera_;
  std::uint64_t seed_;
  std::vector<double> arc_;
  double length_m_ = 0.0;
  std::vector<SurveyFrame> frames_;
  std::vector<GpsFix> fixes_;
};

/// Streams rendered frames of a survey directly, without touching disk.
class SyntheticFrameSource final : public FrameSource {
 public:
  SyntheticFrameSource(SceneSpec scene, CameraModel camera, double frame_rate_hz = 15.0,
                       std::uint64_t seed = 0);

  CameraModel const& camera() const override { return survey_.camera(); }
  std::optional<FrameRecord> next() override;
  Survey const& survey() const noexcept { return survey_; }

 private:
  SceneSpec scene_;
  Survey survey_;
  SceneRenderer renderer_;
  std::size_t cursor_ = 0;
};

struct GroundTruth {
  PathGraph graph;
  std::vector<LocatedObject> objects;
};

GroundTruth ground_truth(SceneSpec const& scene);

/// Camera used for a scene: its own override or the survey default.
CameraModel scene_camera(SceneSpec const& scene);

/// Writes rasters, manifest.jsonl, truth.geojson and scene.json under
/// `out_dir`; returns the manifest path. Throws IoError naming the path.
std::filesystem::path generate_dataset(SceneSpec const& scene, CameraModel const& camera,
                                       double frame_rate_hz, std::filesystem::path const& out_dir,
                                       std::uint64_t seed = 0);

}  // namespace oasis
