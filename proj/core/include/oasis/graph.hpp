#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "oasis/geo.hpp"
#include "oasis/sidewalk.hpp"
#include "oasis/tracker.hpp"

namespace oasis {

enum class EdgeKind : std::uint8_t { sidewalk, crossing };

std::string_view edge_kind_name(EdgeKind k) noexcept;

struct PathNode {
  std::int64_t node_id = 0;
  GeoPoint location;
};

struct PathEdge {
  std::int64_t edge_id = 0;
  std::int64_t from = 0;
  std::int64_t to = 0;
  std::vector<GeoPoint> polyline;  // endpoints coincide with the node locations
  double width_m = 0.0;            // bottleneck width along the edge
  EdgeKind kind = EdgeKind::sidewalk;
};

struct Disconnection {
  std::int64_t a = 0;
  std::int64_t b = 0;
  double gap_m = 0.0;
};

/// Undirected pedestrian network.
struct PathGraph {
  std::vector<PathNode> nodes;  // ordered by node_id
  std::vector<PathEdge> edges;  // ordered by edge_id
  std::vector<Disconnection> disconnections;

  PathNode const* node(std::int64_t id) const noexcept;
  std::size_t degree(std::int64_t node_id) const noexcept;
  double total_length_m(double radius_m = kEarthRadiusM) const noexcept;
};

double polyline_length_m(std::span<GeoPoint const> line, double radius_m = kEarthRadiusM) noexcept;

struct GraphBuildParams {
  double chain_gap_m = 3.0;
  double snap_radius_m = 0.5;
  double simplify_tolerance_m = 0.25;
  /// Arc-length half-window of the centerline moving average; 0 disables.
  double smooth_radius_m = 2.0;
  /// Road samples become a crossing only when sidewalk samples lie within
  /// this distance on both sides along the chain.
  double crossing_flank_m = 5.0;
  double earth_radius_m = kEarthRadiusM;
};

/// Planar point used by the simplifier.
struct PlanePoint {
  double x = 0.0;
  double y = 0.0;
};

/// Douglas-Peucker simplification; returns kept indices (always including
/// both endpoints).
std::vector<std::size_t> simplify_polyline(std::span<PlanePoint const> points, double tolerance);

/// Folds a frame-ordered fragment stream into a path network.
///
/// Each frame contributes one centerline sample: its fragment on the
/// nearest sampled row (the largest row_v present in the stream). Samples
/// that do not advance along the frame heading are dropped; the rest are
/// chained while consecutive samples stay within `chain_gap_m`, smoothed,
/// split into sidewalk and crossing runs, simplified, and snapped into
/// shared nodes. Edge width is the minimum sample width along the edge.
PathGraph build_graph(std::span<SidewalkFragment const> fragments, GraphBuildParams const& params = {});

/// Pairs of dead-end nodes on different edges whose separation lies in
/// (snap_radius_m, gap_threshold_m].
std::vector<Disconnection> detect_gaps(PathGraph const& graph, double gap_threshold_m = 3.0,
                                       double snap_radius_m = 0.5,
                                       double radius_m = kEarthRadiusM);

/// Per edge: true when the edge is narrower than `min_width_m`.
std::vector<bool> accessibility_flags(PathGraph const& graph, double min_width_m = 0.9);

/// GeoJSON FeatureCollection: edges as LineStrings, objects and
/// disconnections as Points; lon/lat at 7 decimals. `metadata` is attached
/// as a foreign member when not null.
nlohmann::json to_geojson(PathGraph const& graph, std::span<LocatedObject const> objects,
                          double min_width_m = 0.9, nlohmann::json const& metadata = nullptr);

struct MapDocument {
  PathGraph graph;
  std::vector<LocatedObject> objects;
  nlohmann::json metadata;
};

/// Inverse of to_geojson. Throws ParseError on malformed documents.
MapDocument from_geojson(nlohmann::json const& doc);

struct GraphSummary {
  std::size_t edge_count = 0;
  std::size_t node_count = 0;
  double total_length_m = 0.0;
  std::size_t object_count = 0;
  std::optional<double> obstacles_per_km;
  std::size_t disconnection_count = 0;
  std::size_t inaccessible_edge_count = 0;
};

GraphSummary summarize(PathGraph const& graph, std::span<LocatedObject const> objects,
                       double min_width_m = 0.9);
std::string format_summary(GraphSummary const& s);

}  // namespace oasis
