#include "oasis/graph.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "oasis/errors.hpp"

namespace oasis {

using nlohmann::json;

std::string_view edge_kind_name(EdgeKind k) noexcept {
  return k == EdgeKind::crossing ? "crossing" : "sidewalk";
}

PathNode const* PathGraph::node(std::int64_t id) const noexcept {
  auto it = std::ranges::lower_bound(nodes, id, {}, &PathNode::node_id);
  return it != nodes.end() && it->node_id == id ? &*it : nullptr;
}

std::size_t PathGraph::degree(std::int64_t node_id) const noexcept {
  return static_cast<std::size_t>(std::ranges::count_if(
      edges, [&](PathEdge const& e) { return e.from == node_id || e.to == node_id; }));
}

double polyline_length_m(std::span<GeoPoint const> line, double radius_m) noexcept {
  double len = 0.0;
  for (std::size_t i = 1; i < line.size(); ++i) len += haversine_distance(line[i - 1], line[i], radius_m);
  return len;
}

double PathGraph::total_length_m(double radius_m) const noexcept {
  double len = 0.0;
  for (auto const& e : edges) len += polyline_length_m(e.polyline, radius_m);
  return len;
}

std::vector<std::size_t> simplify_polyline(std::span<PlanePoint const> points, double tolerance) {
  auto const n = points.size();
  if (n <= 2) {
    std::vector<std::size_t> all(n);
    for (std::size_t i = 0; i < n; ++i) all[i] = i;
    return all;
  }
  std::vector<bool> keep(n, false);
  keep.front() = keep.back() = true;
  std::vector<std::pair<std::size_t, std::size_t>> stack{{0, n - 1}};
  while (!stack.empty()) {
    auto const [a, b] = stack.back();
    stack.pop_back();
    if (b <= a + 1) continue;
    double const dx = points[b].x - points[a].x;
    double const dy = points[b].y - points[a].y;
    double const len = std::hypot(dx, dy);
    double worst = -1.0;
    std::size_t worst_i = a;
    for (std::size_t i = a + 1; i < b; ++i) {
      double const px = points[i].x - points[a].x;
      double const py = points[i].y - points[a].y;
      double const d = len > 0.0 ? std::abs(dx * py - dy * px) / len : std::hypot(px, py);
      if (d > worst) {
        worst = d;
        worst_i = i;
      }
    }
    if (worst > tolerance) {
      keep[worst_i] = true;
      stack.emplace_back(a, worst_i);
      stack.emplace_back(worst_i, b);
    }
  }
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < n; ++i) {
    if (keep[i]) out.push_back(i);
  }
  return out;
}

namespace {

struct Sample {
  PlanePoint p;
  double width = 0.0;
  bool road = false;
};

double dist(PlanePoint a, PlanePoint b) { return std::hypot(a.x - b.x, a.y - b.y); }

void smooth_chain(std::vector<Sample>& chain, double radius) {
  if (radius <= 0.0 || chain.size() < 3) return;
  std::vector<double> arc(chain.size(), 0.0);
  for (std::size_t i = 1; i < chain.size(); ++i) arc[i] = arc[i - 1] + dist(chain[i - 1].p, chain[i].p);
  double const total = arc.back();
  std::vector<PlanePoint> smoothed(chain.size());
  for (std::size_t i = 0; i < chain.size(); ++i) {
    // Window shrinks symmetrically near the ends so endpoints stay put.
    double const r = std::min({radius, arc[i], total - arc[i]});
    double sx = chain[i].p.x;
    double sy = chain[i].p.y;
    std::size_t n = 1;
    for (std::size_t j = i; j-- > 0 && arc[i] - arc[j] <= r;) {
      sx += chain[j].p.x;
      sy += chain[j].p.y;
      ++n;
    }
    for (std::size_t j = i + 1; j < chain.size() && arc[j] - arc[i] <= r; ++j) {
      sx += chain[j].p.x;
      sy += chain[j].p.y;
      ++n;
    }
    smoothed[i] = {sx / static_cast<double>(n), sy / static_cast<double>(n)};
  }
  for (std::size_t i = 0; i < chain.size(); ++i) chain[i].p = smoothed[i];
}

struct Piece {
  std::vector<PlanePoint> points;
  double width = 0.0;
  EdgeKind kind = EdgeKind::sidewalk;
};

void split_by_kind(std::vector<Sample> const& chain, double flank_m, std::vector<Piece>& out) {
  std::size_t i = 0;
  while (i < chain.size()) {
    std::size_t j = i;
    while (j + 1 < chain.size() && chain[j + 1].road == chain[i].road) ++j;
    if (!chain[i].road) {
      Piece p;
      p.width = chain[i].width;
      for (std::size_t k = i; k <= j; ++k) {
        p.points.push_back(chain[k].p);
        p.width = std::min(p.width, chain[k].width);
      }
      out.push_back(std::move(p));
    } else if (i > 0 && j + 1 < chain.size() && dist(chain[i - 1].p, chain[i].p) <= flank_m &&
               dist(chain[j].p, chain[j + 1].p) <= flank_m) {
      Piece p;
      p.kind = EdgeKind::crossing;
      p.width = std::min(chain[i - 1].width, chain[j + 1].width);
      for (std::size_t k = i - 1; k <= j + 1; ++k) p.points.push_back(chain[k].p);
      out.push_back(std::move(p));
    }
    i = j + 1;
  }
}

}  // namespace

PathGraph build_graph(std::span<SidewalkFragment const> fragments, GraphBuildParams const& params) {
  PathGraph graph;
  if (fragments.empty()) return graph;

  int const ref_row = std::ranges::max(fragments, {}, &SidewalkFragment::row_v).row_v;
  GeoPoint const origin = fragments.front().center;
  double const radius = params.earth_radius_m;
  constexpr double kDeg = 3.14159265358979323846 / 180.0;

  std::vector<std::vector<Sample>> chains;
  for (std::size_t i = 0; i < fragments.size();) {
    std::size_t j = i;
    SidewalkFragment const* pick = nullptr;
    while (j < fragments.size() && fragments[j].frame_id == fragments[i].frame_id) {
      auto const& f = fragments[j];
      if (f.row_v == ref_row && (pick == nullptr || (pick->path_class == PathClass::road &&
                                                     f.path_class == PathClass::sidewalk))) {
        pick = &f;
      }
      ++j;
    }
    i = j;
    if (pick == nullptr) continue;

    auto const off = to_local(origin, pick->center, radius);
    Sample s{{off.east_m, off.north_m}, pick->width_m, pick->path_class == PathClass::road};
    if (chains.empty()) {
      chains.push_back({s});
      continue;
    }
    auto const& last = chains.back().back();
    double const d = dist(last.p, s.p);
    if (d > params.chain_gap_m) {
      chains.push_back({s});
      continue;
    }
    double const progress = (s.p.x - last.p.x) * std::sin(pick->heading_deg * kDeg) +
                            (s.p.y - last.p.y) * std::cos(pick->heading_deg * kDeg);
    if (progress > 0.0) chains.back().push_back(s);
  }

  std::vector<Piece> pieces;
  for (auto& chain : chains) {
    smooth_chain(chain, params.smooth_radius_m);
    split_by_kind(chain, params.crossing_flank_m, pieces);
  }

  std::vector<PlanePoint> node_xy;
  auto node_for = [&](PlanePoint p) -> std::int64_t {
    std::int64_t best = -1;
    double best_d = params.snap_radius_m;
    for (std::size_t k = 0; k < node_xy.size(); ++k) {
      double const d = dist(node_xy[k], p);
      if (d <= best_d) {
        best_d = d;
        best = static_cast<std::int64_t>(k);
      }
    }
    if (best >= 0) return best + 1;
    node_xy.push_back(p);
    graph.nodes.push_back({static_cast<std::int64_t>(node_xy.size()),
                           from_local(origin, {p.x, p.y}, radius)});
    return static_cast<std::int64_t>(node_xy.size());
  };

  std::set<std::pair<std::int64_t, std::int64_t>> linked;
  for (auto const& piece : pieces) {
    auto const a = node_for(piece.points.front());
    if (piece.points.size() < 2) continue;
    auto const b = node_for(piece.points.back());
    if (a == b || !linked.insert(std::minmax(a, b)).second) continue;

    auto const kept = simplify_polyline(piece.points, params.simplify_tolerance_m);
    PathEdge e;
    e.edge_id = static_cast<std::int64_t>(graph.edges.size()) + 1;
    e.from = a;
    e.to = b;
    e.width_m = piece.width;
    e.kind = piece.kind;
    for (auto const k : kept) e.polyline.push_back(from_local(origin, {piece.points[k].x, piece.points[k].y}, radius));
    e.polyline.front() = graph.nodes[static_cast<std::size_t>(a - 1)].location;
    e.polyline.back() = graph.nodes[static_cast<std::size_t>(b - 1)].location;
    graph.edges.push_back(std::move(e));
  }
  return graph;
}

std::vector<Disconnection> detect_gaps(PathGraph const& graph, double gap_threshold_m,
                                       double snap_radius_m, double radius_m) {
  std::map<std::int64_t, std::vector<std::int64_t>> incident;
  for (auto const& e : graph.edges) {
    incident[e.from].push_back(e.edge_id);
    incident[e.to].push_back(e.edge_id);
  }
  std::vector<std::pair<std::int64_t, std::int64_t>> dead_ends;  // node, edge
  for (auto const& [node, edges] : incident) {
    if (edges.size() == 1) dead_ends.emplace_back(node, edges.front());
  }
  std::vector<Disconnection> out;
  for (std::size_t i = 0; i < dead_ends.size(); ++i) {
    for (std::size_t j = i + 1; j < dead_ends.size(); ++j) {
      if (dead_ends[i].second == dead_ends[j].second) continue;
      auto const* a = graph.node(dead_ends[i].first);
      auto const* b = graph.node(dead_ends[j].first);
      if (a == nullptr || b == nullptr) continue;
      double const gap = haversine_distance(a->location, b->location, radius_m);
      if (gap > snap_radius_m && gap <= gap_threshold_m) out.push_back({a->node_id, b->node_id, gap});
    }
  }
  return out;
}

std::vector<bool> accessibility_flags(PathGraph const& graph, double min_width_m) {
  std::vector<bool> out;
  out.reserve(graph.edges.size());
  for (auto const& e : graph.edges) out.push_back(e.width_m < min_width_m);
  return out;
}

namespace {

double round_to(double v, double scale) { return std::round(v * scale) / scale; }

json lonlat(GeoPoint p) { return json::array({round_to(p.lon_deg, 1e7), round_to(p.lat_deg, 1e7)}); }

json point_feature(GeoPoint p, json properties) {
  return {{"type", "Feature"},
          {"geometry", {{"type", "Point"}, {"coordinates", lonlat(p)}}},
          {"properties", std::move(properties)}};
}

GeoPoint read_lonlat(json const& c) {
  if (!c.is_array() || c.size() < 2 || !c[0].is_number() || !c[1].is_number()) {
    throw ParseError("GeoJSON: coordinate must be [lon, lat]");
  }
  return {c[1].get<double>(), c[0].get<double>()};
}

template <typename T>
T prop(json const& props, char const* key) {
  auto const it = props.find(key);
  if (it == props.end()) throw ParseError(std::string{"GeoJSON: feature property '"} + key + "' missing");
  try {
    return it->get<T>();
  } catch (json::exception const&) {
    throw ParseError(std::string{"GeoJSON: feature property '"} + key + "' has the wrong type");
  }
}

}  // namespace

json to_geojson(PathGraph const& graph, std::span<LocatedObject const> objects, double min_width_m,
                json const& metadata) {
  json features = json::array();
  auto const flags = accessibility_flags(graph, min_width_m);
  std::set<std::int64_t> connected;
  for (std::size_t i = 0; i < graph.edges.size(); ++i) {
    auto const& e = graph.edges[i];
    connected.insert(e.from);
    connected.insert(e.to);
    json coords = json::array();
    for (auto const& p : e.polyline) coords.push_back(lonlat(p));
    features.push_back({{"type", "Feature"},
                        {"geometry", {{"type", "LineString"}, {"coordinates", std::move(coords)}}},
                        {"properties",
                         {{"id", e.edge_id},
                          {"from", e.from},
                          {"to", e.to},
                          {"highway", "footway"},
                          {"footway", std::string{edge_kind_name(e.kind)}},
                          {"width", round_to(e.width_m, 1e6)},
                          {"inaccessible", static_cast<bool>(flags[i])}}}});
  }
  for (auto const& n : graph.nodes) {
    if (!connected.contains(n.node_id)) features.push_back(point_feature(n.location, {{"node_id", n.node_id}}));
  }
  for (auto const& o : objects) {
    features.push_back(point_feature(o.location, {{"object_id", o.object_id},
                                                  {"class", std::string{class_name(o.cls)}},
                                                  {"observation_count", o.observation_count}}));
  }
  for (auto const& d : graph.disconnections) {
    auto const* a = graph.node(d.a);
    auto const* b = graph.node(d.b);
    GeoPoint mid = a != nullptr ? a->location : GeoPoint{};
    if (a != nullptr && b != nullptr) {
      mid = {(a->location.lat_deg + b->location.lat_deg) / 2.0,
             (a->location.lon_deg + b->location.lon_deg) / 2.0};
    }
    features.push_back(point_feature(mid, {{"from", d.a}, {"to", d.b}, {"gap_m", round_to(d.gap_m, 1e6)}}));
  }
  json doc{{"type", "FeatureCollection"}, {"features", std::move(features)}};
  if (!metadata.is_null()) doc["metadata"] = metadata;
  return doc;
}

MapDocument from_geojson(json const& doc) {
  if (!doc.is_object() || doc.value("type", "") != "FeatureCollection" || !doc.contains("features") ||
      !doc.at("features").is_array()) {
    throw ParseError("GeoJSON: expected a FeatureCollection");
  }
  MapDocument out;
  out.metadata = doc.value("metadata", json{});
  std::map<std::int64_t, GeoPoint> nodes;
  for (auto const& f : doc.at("features")) {
    if (!f.contains("geometry") || !f.contains("properties")) throw ParseError("GeoJSON: feature lacks geometry/properties");
    auto const& g = f.at("geometry");
    auto const& props = f.at("properties");
    auto const type = g.value("type", "");
    if (type == "LineString") {
      PathEdge e;
      e.edge_id = prop<std::int64_t>(props, "id");
      e.from = prop<std::int64_t>(props, "from");
      e.to = prop<std::int64_t>(props, "to");
      e.width_m = prop<double>(props, "width");
      auto const kind = prop<std::string>(props, "footway");
      if (kind != "sidewalk" && kind != "crossing") throw ParseError("GeoJSON: unknown footway kind '" + kind + "'");
      e.kind = kind == "crossing" ? EdgeKind::crossing : EdgeKind::sidewalk;
      for (auto const& c : g.at("coordinates")) e.polyline.push_back(read_lonlat(c));
      if (e.polyline.size() < 2) throw ParseError("GeoJSON: LineString needs at least 2 positions");
      nodes.emplace(e.from, e.polyline.front());
      nodes.emplace(e.to, e.polyline.back());
      out.graph.edges.push_back(std::move(e));
    } else if (type == "Point") {
      auto const p = read_lonlat(g.at("coordinates"));
      if (props.contains("class")) {
        auto const name = prop<std::string>(props, "class");
        auto const cls = class_from_name(name);
        if (!cls) throw ParseError("GeoJSON: unknown object class '" + name + "'");
        out.objects.push_back({props.value("object_id", std::int64_t{0}), *cls, p,
                               prop<std::size_t>(props, "observation_count")});
      } else if (props.contains("gap_m")) {
        out.graph.disconnections.push_back(
            {prop<std::int64_t>(props, "from"), prop<std::int64_t>(props, "to"), prop<double>(props, "gap_m")});
      } else if (props.contains("node_id")) {
        nodes.emplace(prop<std::int64_t>(props, "node_id"), p);
      } else {
        throw ParseError("GeoJSON: unrecognized Point feature");
      }
    } else {
      throw ParseError("GeoJSON: unsupported geometry '" + type + "'");
    }
  }
  for (auto const& [id, loc] : nodes) out.graph.nodes.push_back({id, loc});
  std::ranges::sort(out.graph.edges, {}, &PathEdge::edge_id);
  return out;
}

GraphSummary summarize(PathGraph const& graph, std::span<LocatedObject const> objects, double min_width_m) {
  GraphSummary s;
  s.edge_count = graph.edges.size();
  s.node_count = graph.nodes.size();
  s.total_length_m = graph.total_length_m();
  s.object_count = objects.size();
  if (s.total_length_m > 0.0) s.obstacles_per_km = static_cast<double>(objects.size()) / (s.total_length_m / 1000.0);
  s.disconnection_count = graph.disconnections.size();
  auto const flags = accessibility_flags(graph, min_width_m);
  s.inaccessible_edge_count = static_cast<std::size_t>(std::ranges::count(flags, true));
  return s;
}

std::string format_summary(GraphSummary const& s) {
  std::ostringstream out;
  out.setf(std::ios::fixed);
  out.precision(2);
  out << "edges: " << s.edge_count << '\n'
      << "nodes: " << s.node_count << '\n'
      << "total_length_m: " << s.total_length_m << '\n'
      << "objects: " << s.object_count << '\n'
      << "obstacles_per_km: ";
  if (s.obstacles_per_km) {
    out << *s.obstacles_per_km;
  } else {
    out << "undefined";
  }
  out << '\n'
      << "disconnections: " << s.disconnection_count << '\n'
      << "inaccessible_edges: " << s.inaccessible_edge_count << '\n';
  return out.str();
}

}  // namespace oasis
