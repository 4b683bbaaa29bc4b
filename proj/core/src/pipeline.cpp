#include "oasis/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "oasis/errors.hpp"
#include "oasis/taxonomy.hpp"

namespace oasis {

namespace {

using nlohmann::json;

void require_positive(double v, char const* field) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw ValidationError(std::string{"config: '"} + field + "' must be positive");
  }
}

template <typename T>
void read_field(json const& doc, char const* key, T& out) {
  auto const it = doc.find(key);
  if (it == doc.end()) return;
  try {
    if constexpr (std::is_same_v<T, int>) {
      double const v = it->get<double>();
      if (v != std::floor(v)) throw ValidationError(std::string{"config: '"} + key + "' must be an integer");
      out = static_cast<int>(v);
    } else {
      out = it->get<T>();
    }
  } catch (json::exception const&) {
    throw ValidationError(std::string{"config: '"} + key + "' has the wrong type");
  }
}

}  // namespace

void PipelineConfig::validate() const {
  require_positive(k_window, "k_window");
  require_positive(lost_threshold, "lost_threshold");
  require_positive(max_match_px, "max_match_px");
  require_positive(min_region_px, "min_region_px");
  require_positive(chain_gap_m, "chain_gap_m");
  require_positive(snap_radius_m, "snap_radius_m");
  require_positive(gap_threshold_m, "gap_threshold_m");
  require_positive(buffer_m, "buffer_m");
  require_positive(min_width_m, "min_width_m");
  require_positive(earth_radius_m, "earth_radius_m");
  require_positive(min_valid_depth_fraction, "min_valid_depth_fraction");
  if (min_valid_depth_fraction > 1.0) throw ValidationError("config: 'min_valid_depth_fraction' must be <= 1");
  if (smooth_radius_m < 0.0) throw ValidationError("config: 'smooth_radius_m' must be non-negative");
  if (simplify_tolerance_m < 0.0) throw ValidationError("config: 'simplify_tolerance_m' must be non-negative");
  require_positive(min_observations, "min_observations");
  require_positive(crossing_flank_m, "crossing_flank_m");
  if (sample_rows.empty()) throw ValidationError("config: 'sample_rows' must not be empty");
  for (std::size_t i = 0; i < sample_rows.size(); ++i) {
    if (!(sample_rows[i] > 0.0 && sample_rows[i] < 1.0)) {
      throw ValidationError("config: 'sample_rows' entries must lie in (0, 1)");
    }
    if (i > 0 && !(sample_rows[i] > sample_rows[i - 1])) {
      throw ValidationError("config: 'sample_rows' must be strictly increasing");
    }
  }
}

nlohmann::ordered_json to_json(PipelineConfig const& c) {
  return {{"k_window", c.k_window},
          {"lost_threshold", c.lost_threshold},
          {"max_match_px", c.max_match_px},
          {"min_region_px", c.min_region_px},
          {"sample_rows", c.sample_rows},
          {"chain_gap_m", c.chain_gap_m},
          {"snap_radius_m", c.snap_radius_m},
          {"gap_threshold_m", c.gap_threshold_m},
          {"buffer_m", c.buffer_m},
          {"min_width_m", c.min_width_m},
          {"earth_radius_m", c.earth_radius_m},
          {"min_valid_depth_fraction", c.min_valid_depth_fraction},
          {"smooth_radius_m", c.smooth_radius_m},
          {"simplify_tolerance_m", c.simplify_tolerance_m},
          {"min_observations", c.min_observations},
          {"crossing_flank_m", c.crossing_flank_m}};
}

PipelineConfig config_from_json(json const& doc, PipelineConfig c) {
  if (!doc.is_object()) throw ValidationError("config must be an object");
  auto const known = to_json(c);
  for (auto const& [key, _] : doc.items()) {
    if (!known.contains(key)) throw ValidationError("config: unknown field '" + key + "'");
  }
  read_field(doc, "k_window", c.k_window);
  read_field(doc, "lost_threshold", c.lost_threshold);
  read_field(doc, "max_match_px", c.max_match_px);
  read_field(doc, "min_region_px", c.min_region_px);
  read_field(doc, "sample_rows", c.sample_rows);
  read_field(doc, "chain_gap_m", c.chain_gap_m);
  read_field(doc, "snap_radius_m", c.snap_radius_m);
  read_field(doc, "gap_threshold_m", c.gap_threshold_m);
  read_field(doc, "buffer_m", c.buffer_m);
  read_field(doc, "min_width_m", c.min_width_m);
  read_field(doc, "earth_radius_m", c.earth_radius_m);
  read_field(doc, "min_valid_depth_fraction", c.min_valid_depth_fraction);
  read_field(doc, "smooth_radius_m", c.smooth_radius_m);
  read_field(doc, "simplify_tolerance_m", c.simplify_tolerance_m);
  read_field(doc, "min_observations", c.min_observations);
  read_field(doc, "crossing_flank_m", c.crossing_flank_m);
  c.validate();
  return c;
}

PipelineConfig load_config(std::filesystem::path const& path) {
  std::ifstream in{path};
  if (!in) throw IoError("cannot open config", path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (json::parse_error const& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  // Output GeoJSON embeds the config under metadata; accept that shape too.
  if (doc.contains("metadata") && doc["metadata"].contains("config")) doc = doc["metadata"]["config"];
  return config_from_json(doc);
}

void apply_override(PipelineConfig& config, std::string_view assignment) {
  auto const eq = assignment.find('=');
  if (eq == std::string_view::npos || eq == 0) {
    throw ValidationError("override must look like key=value: " + std::string{assignment});
  }
  std::string const key{assignment.substr(0, eq)};
  std::string const text{assignment.substr(eq + 1)};
  json value;
  try {
    value = json::parse(text);
  } catch (json::parse_error const&) {
    throw ValidationError("override '" + key + "': value is not a number or list");
  }
  config = config_from_json(json{{key, value}}, config);
}

Mapper::Mapper(PipelineConfig config, CameraModel camera)
    : config_{std::move(config)},
      camera_{camera},
      fuser_{static_cast<std::size_t>((config_.validate(), config_.k_window))},
      tracker_{TrackerConfig{config_.lost_threshold, config_.max_match_px, config_.earth_radius_m}, camera} {
  camera_.validate();
  rows_.row_fractions = config_.sample_rows;
  rows_.min_valid_fraction = config_.min_valid_depth_fraction;
}

void Mapper::push(FrameRecord const& frame) {
  auto const fused = fuser_.push(frame.mask, frame.homography_from_prev);

  auto detections = extract_detections(fused, kStaticInfrastructure,
                                       static_cast<std::size_t>(config_.min_region_px));
  std::vector<std::optional<RangeMeasurement>> ranges;
  ranges.reserve(detections.size());
  for (auto const& d : detections) {
    ranges.push_back(measure_detection(d, frame.mask, frame.depth, config_.min_valid_depth_fraction));
  }
  tracker_.step(frame.frame_id, detections, frame.homography_from_prev, frame.pose, ranges);

  auto const samples = sample_rows(fused, frame.depth, camera_, rows_);
  auto frags = make_fragments(samples, frame.pose, camera_, frame.frame_id, PathClass::sidewalk,
                              config_.earth_radius_m);
  int const nearest_v = sample_row(config_.sample_rows.back(), camera_);
  bool const nearest_has_sidewalk =
      std::any_of(samples.begin(), samples.end(), [&](RowSample const& s) { return s.row_v == nearest_v; });
  if (!nearest_has_sidewalk) {
    if (auto probe = crossing_probe(fused, frame.depth, camera_, config_.sample_rows.back(), 0.25,
                                    config_.min_valid_depth_fraction)) {
      auto road = make_fragments(std::span{&*probe, 1}, frame.pose, camera_, frame.frame_id, PathClass::road,
                                 config_.earth_radius_m);
      frags.insert(frags.end(), road.begin(), road.end());
    }
  }
  fragments_.insert(fragments_.end(), frags.begin(), frags.end());
  ++frames_;
}

MapResult Mapper::finish() {
  MapResult r;
  GraphBuildParams gp;
  gp.chain_gap_m = config_.chain_gap_m;
  gp.snap_radius_m = config_.snap_radius_m;
  gp.simplify_tolerance_m = config_.simplify_tolerance_m;
  gp.smooth_radius_m = config_.smooth_radius_m;
  gp.crossing_flank_m = config_.crossing_flank_m;
  gp.earth_radius_m = config_.earth_radius_m;
  r.graph = build_graph(fragments_, gp);
  r.graph.disconnections =
      detect_gaps(r.graph, config_.gap_threshold_m, config_.snap_radius_m, config_.earth_radius_m);
  auto const tracked = tracker_.all_objects();
  r.objects = finalize_locations(tracked, static_cast<std::size_t>(config_.min_observations));
  r.frames_processed = frames_;
  r.fragment_count = fragments_.size();
  r.tracks_started = static_cast<std::size_t>(tracker_.next_id() - 1);
  return r;
}

MapResult run_pipeline(FrameSource& source, PipelineConfig const& config) {
  Mapper mapper{config, source.camera()};
  while (auto frame = source.next()) mapper.push(*frame);
  return mapper.finish();
}

json map_document(MapResult const& result, PipelineConfig const& config) {
  nlohmann::ordered_json taxonomy = nlohmann::ordered_json::object();
  for (auto const c : all_classes()) taxonomy[std::string{class_name(c)}] = to_id(c);
  nlohmann::ordered_json meta{{"taxonomy", taxonomy},
                              {"config", to_json(config)},
                              {"frames_processed", result.frames_processed},
                              {"frames_dropped", result.frames_dropped}};
  return to_geojson(result.graph, result.objects, config.min_width_m, json(meta));
}

MapResult run_map(std::filesystem::path const& manifest_path, PipelineConfig const& config,
                  std::function<void(std::string_view)> warn) {
  config.validate();
  ManifestFrameSource source{load_manifest(manifest_path), std::move(warn)};
  auto result = run_pipeline(source, config);
  result.frames_dropped = source.dropped();
  return result;
}

}  // namespace oasis
