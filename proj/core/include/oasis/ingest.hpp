#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "oasis/camera.hpp"
#include "oasis/geo.hpp"
#include "oasis/homography.hpp"
#include "oasis/raster.hpp"

namespace oasis {

struct GpsFix {
  double timestamp_s = 0.0;
  double lat_deg = 0.0;
  double lon_deg = 0.0;
  double accuracy_m = 0.0;

  GeoPoint position() const noexcept { return {lat_deg, lon_deg}; }
};

/// A frame listed in the manifest; rasters are not loaded yet.
struct FrameDescriptor {
  std::int64_t frame_id = 0;
  double timestamp_s = 0.0;
  std::filesystem::path mask_path;
  std::filesystem::path depth_path;
  std::optional<double> heading_deg;
  std::optional<Homography> homography_to_next;
};

struct Manifest {
  CameraModel camera;
  std::vector<FrameDescriptor> frames;
  std::vector<GpsFix> track;
};

/// One synchronized survey observation.
struct FrameRecord {
  std::int64_t frame_id = 0;
  double timestamp_s = 0.0;
  SegMask mask;
  DepthMap depth;
  Pose pose;
  std::optional<Homography> homography_to_next;
  /// Maps the previous emitted frame's pixels onto this frame (composed over
  /// any dropped frames); empty for the first frame or a broken chain.
  std::optional<Homography> homography_from_prev;
};

/// Parses a line-delimited manifest. Raster paths are resolved against
/// `base_dir`. Throws ParseError (with line number) or ValidationError.
Manifest parse_manifest(std::istream& in, std::filesystem::path const& base_dir = {});

/// Reads the manifest at `path`; throws IoError when it cannot be opened.
Manifest load_manifest(std::filesystem::path const& path);

/// Serializes a manifest in the same line-delimited layout. Raster paths are
/// written relative to `base_dir` when possible.
void write_manifest(std::ostream& out, Manifest const& manifest,
                    std::filesystem::path const& base_dir = {});

SegMask read_mask(std::filesystem::path const& path,
                  std::optional<CameraModel> const& camera = std::nullopt);
DepthMap read_depth(std::filesystem::path const& path,
                    std::optional<CameraModel> const& camera = std::nullopt);

/// Maximum age of a bracketing fix; frames further from any fix are dropped.
inline constexpr double kMaxFixAgeS = 1.0;

/// Interpolates the camera pose at `timestamp_s`. Position is linear in
/// latitude/longitude between the bracketing fixes and extrapolated at most
/// one fix interval past either end of the track. Heading is `heading_deg`
/// when given, else the forward azimuth between the bracketing fixes.
/// Throws OutOfTrackError outside the extended span or when a bracketing fix
/// is older than `max_fix_age_s`; ValidationError for tracks with < 2 fixes.
Pose sync_pose(double timestamp_s, std::span<GpsFix const> track,
               std::optional<double> heading_deg = std::nullopt,
               double max_fix_age_s = kMaxFixAgeS);

/// Produces frame records in order.
class FrameSource {
 public:
  virtual ~FrameSource() = default;
  virtual CameraModel const& camera() const = 0;
  virtual std::optional<FrameRecord> next() = 0;
};

/// Streams frames from a manifest on disk, loading rasters lazily. Frames
/// whose timestamp cannot be synchronized are skipped with a warning.
class ManifestFrameSource final : public FrameSource {
 public:
  using WarningSink = std::function<void(std::string_view)>;

  explicit ManifestFrameSource(Manifest manifest, WarningSink warn = {});

  CameraModel const& camera() const override { return manifest_.camera; }
  std::optional<FrameRecord> next() override;
  std::size_t dropped() const noexcept { return dropped_; }

 private:
  Manifest manifest_;
  WarningSink warn_;
  std::size_t cursor_ = 0;
  std::size_t dropped_ = 0;
  std::optional<Homography> pending_;
};

}  // namespace oasis
