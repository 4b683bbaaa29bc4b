#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "oasis/graph.hpp"
#include "oasis/tracker.hpp"

namespace oasis {

/// Error summary with population standard deviation, so that
/// rmse^2 == mean^2 + stdev^2. All fields are meaningless when n == 0.
struct ErrorStats {
  std::size_t n = 0;
  double mean = 0.0;
  double stdev = 0.0;
  double rmse = 0.0;

  bool defined() const noexcept { return n > 0; }
};

ErrorStats error_stats(std::span<double const> errors);

using ObjectPairing = std::vector<std::pair<std::int64_t, std::int64_t>>;  // pred id, truth id

/// Greedy nearest pairing of predicted to true objects of the same class
/// within `max_distance_m`; ties go to lower ids.
ObjectPairing pair_objects(std::span<LocatedObject const> pred, std::span<LocatedObject const> truth,
                           double max_distance_m = 5.0, double radius_m = kEarthRadiusM);

struct LocationReport {
  std::map<ClassId, ErrorStats> per_class;  // keyed by the true object's class
  ErrorStats overall;
};

/// Haversine error of each paired object.
LocationReport location_stats(std::span<LocatedObject const> pred, std::span<LocatedObject const> truth,
                              ObjectPairing const& pairing, double radius_m = kEarthRadiusM);

/// A point on a graph edge after arc-length resampling.
struct EdgePoint {
  PlanePoint xy;
  double width_m = 0.0;
};

/// Resamples every edge into points spaced ~`spacing_m` apart (both ends
/// included), projected about `origin`.
std::vector<EdgePoint> resample_graph(PathGraph const& graph, GeoPoint origin, double spacing_m = 1.0,
                                      double radius_m = kEarthRadiusM);

/// One-to-one greedy nearest assignment of points within `buffer_m`.
/// Returns (pred index, truth index) pairs.
std::vector<std::pair<std::size_t, std::size_t>> greedy_point_matching(std::span<EdgePoint const> pred,
                                                                       std::span<EdgePoint const> truth,
                                                                       double buffer_m);

struct GraphMatchReport {
  std::optional<double> precision;
  std::optional<double> recall;
  std::optional<double> f1;
  std::size_t matched_pred = 0;
  std::size_t matched_truth = 0;
  std::size_t total_pred = 0;
  std::size_t total_truth = 0;
  ErrorStats location;  // matched point distances
  ErrorStats width;     // |pred width - truth width| over matched points
};

/// Edge-assignment precision / recall / F1 of `pred` against `truth`.
GraphMatchReport graph_metrics(PathGraph const& pred, PathGraph const& truth, double buffer_m = 1.5,
                               double spacing_m = 1.0, double radius_m = kEarthRadiusM);

/// Objects per kilometer of network; empty for a zero-length graph.
std::optional<double> obstacle_density(std::size_t object_count, PathGraph const& graph,
                                       double radius_m = kEarthRadiusM);

struct EvalReport {
  GraphMatchReport graph;
  LocationReport objects;
  std::size_t pred_objects = 0;
  std::size_t truth_objects = 0;
  std::size_t paired_objects = 0;
  std::optional<double> obstacles_per_km;
};

struct EvalParams {
  double buffer_m = 1.5;
  double spacing_m = 1.0;
  double pairing_radius_m = 5.0;
  double earth_radius_m = kEarthRadiusM;
};

EvalReport evaluate(MapDocument const& pred, MapDocument const& truth, EvalParams const& params = {});

nlohmann::json to_json(EvalReport const& report);

/// Mean / STDEV / RMSE rows, one column per class plus the overall average.
std::string format_location_table(LocationReport const& report);
std::string format_report(EvalReport const& report);

}  // namespace oasis
