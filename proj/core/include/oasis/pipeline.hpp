#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "oasis/graph.hpp"
#include "oasis/ingest.hpp"
#include "oasis/segment.hpp"
#include "oasis/sidewalk.hpp"
#include "oasis/tracker.hpp"

namespace oasis {

/// Every tunable of the mapping run.
struct PipelineConfig {
  int k_window = 3;
  int lost_threshold = 5;
  double max_match_px = 100.0;
  int min_region_px = 50;
  std::vector<double> sample_rows{kDefaultSampleRows.begin(), kDefaultSampleRows.end()};
  double chain_gap_m = 3.0;
  double snap_radius_m = 0.5;
  double gap_threshold_m = 3.0;
  double buffer_m = 1.5;
  double min_width_m = 0.9;
  double earth_radius_m = kEarthRadiusM;

  double min_valid_depth_fraction = 0.25;
  double smooth_radius_m = 2.0;
  double simplify_tolerance_m = 0.25;
  int min_observations = 2;
  double crossing_flank_m = 5.0;

  /// Throws ValidationError naming the offending field.
  void validate() const;
};

nlohmann::ordered_json to_json(PipelineConfig const& config);

/// Overlays the keys present in `doc` onto `base`; unknown keys are errors.
PipelineConfig config_from_json(nlohmann::json const& doc, PipelineConfig base = {});

PipelineConfig load_config(std::filesystem::path const& path);

/// Applies `key=value` (value parsed as JSON) to `config`.
void apply_override(PipelineConfig& config, std::string_view assignment);

struct MapResult {
  PathGraph graph;
  std::vector<LocatedObject> objects;
  std::size_t frames_processed = 0;
  std::size_t frames_dropped = 0;
  std::size_t fragment_count = 0;
  std::size_t tracks_started = 0;
};

/// Streaming mapper: feed frames in order, then finish().
class Mapper {
 public:
  Mapper(PipelineConfig config, CameraModel camera);

  void push(FrameRecord const& frame);
  MapResult finish();

  std::size_t frames_processed() const noexcept { return frames_; }

 private:
  PipelineConfig config_;
  CameraModel camera_;
  TemporalFuser fuser_;
  Tracker tracker_;
  RowSamplingParams rows_;
  std::vector<SidewalkFragment> fragments_;
  std::size_t frames_ = 0;
};

MapResult run_pipeline(FrameSource& source, PipelineConfig const& config);

/// GeoJSON for a map result, with taxonomy and effective config metadata.
nlohmann::json map_document(MapResult const& result, PipelineConfig const& config);

/// Loads the manifest at `path`, maps it and returns the result. Warnings
/// (dropped frames) go to `warn`.
MapResult run_map(std::filesystem::path const& manifest_path, PipelineConfig const& config,
                  std::function<void(std::string_view)> warn = {});

}  // namespace oasis
