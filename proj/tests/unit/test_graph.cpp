#include <doctest.h>

#include <cmath>
#include <random>
#include <set>

#include "oasis/errors.hpp"
#include "oasis/graph.hpp"
#include "oracles.hpp"

using namespace oasis;

namespace {

GeoPoint const kOrigin{47.6097, -122.3331};

// One nearest-row fragment per frame along a local polyline, spaced `step`.
std::vector<SidewalkFragment> walk(std::vector<LocalOffset> const& corners, double step, double width,
                                   std::int64_t first_frame = 1) {
  std::vector<SidewalkFragment> out;
  std::int64_t frame = first_frame;
  for (std::size_t k = 1; k < corners.size(); ++k) {
    auto const a = corners[k - 1];
    auto const b = corners[k];
    double const len = std::hypot(b.east_m - a.east_m, b.north_m - a.north_m);
    double const heading = std::atan2(b.east_m - a.east_m, b.north_m - a.north_m) / oracle::kDeg;
    int const n = static_cast<int>(std::lround(len / step));
    for (int i = (k == 1 ? 0 : 1); i <= n; ++i) {
      double const t = static_cast<double>(i) / n;
      SidewalkFragment f;
      f.frame_id = frame++;
      f.center = from_local(kOrigin, {a.east_m + t * (b.east_m - a.east_m), a.north_m + t * (b.north_m - a.north_m)});
      f.width_m = width;
      f.ground_distance_m = 4.0;
      f.row_v = 612;
      f.heading_deg = normalize_heading(heading);
      out.push_back(f);
    }
  }
  return out;
}

PathGraph straight_pair(double gap) {
  auto a = walk({{0, 0}, {0, 20}}, 0.5, 1.8);
  auto b = walk({{0, 20 + gap}, {0, 40 + gap}}, 0.5, 1.8, 1000);
  a.insert(a.end(), b.begin(), b.end());
  GraphBuildParams p;
  p.chain_gap_m = std::min(gap, 3.0) - 0.1;
  return build_graph(a, p);
}

PathEdge line_edge(std::int64_t id, std::int64_t from, std::int64_t to, GeoPoint a, GeoPoint b, double w) {
  return {id, from, to, {a, b}, w, EdgeKind::sidewalk};
}

}  // namespace

TEST_SUITE("graph") {
  TEST_CASE("empty stream gives empty graph") {
    auto const g = build_graph({});
    CHECK(g.nodes.empty());
    CHECK(g.edges.empty());
  }

  TEST_CASE("straight run becomes one edge") {
    auto const frags = walk({{0, 0}, {0, 100}}, 0.5, 1.8);
    REQUIRE(frags.size() == 201);
    auto const g = build_graph(frags);
    REQUIRE(g.edges.size() == 1);
    CHECK(g.nodes.size() == 2);
    CHECK(g.edges[0].width_m == 1.8);
    CHECK(g.edges[0].kind == EdgeKind::sidewalk);
    CHECK(g.total_length_m() == doctest::Approx(100.0).epsilon(1e-6));
    CHECK(g.edges[0].polyline.front() == g.node(g.edges[0].from)->location);
    CHECK(g.edges[0].polyline.back() == g.node(g.edges[0].to)->location);
  }

  TEST_CASE("a hole longer than the chain gap splits the edge") {
    auto frags = walk({{0, 0}, {0, 45}}, 0.5, 1.8);
    auto const rest = walk({{0, 55}, {0, 100}}, 0.5, 1.8, 500);
    frags.insert(frags.end(), rest.begin(), rest.end());
    auto const g = build_graph(frags);
    CHECK(g.edges.size() == 2);
    CHECK(g.nodes.size() == 4);
  }

  TEST_CASE("simplification keeps the corner of an L") {
    // Five points: three along north, two along east. The middle collinear
    // points sit 0 m off their chord; the corner sits 5/sqrt(2) m off the
    // end-to-end chord, so only the corner survives.
    std::vector<PlanePoint> const pts{{0, 0}, {0, 5}, {0, 10}, {5, 10}, {10, 10}};
    auto const kept = simplify_polyline(pts, 0.25);
    CHECK(kept == std::vector<std::size_t>{0, 2, 4});

    auto const frags = walk({{0, 0}, {0, 30}, {30, 30}}, 0.5, 1.8);
    GraphBuildParams p;
    p.smooth_radius_m = 0.0;
    auto const g = build_graph(frags, p);
    REQUIRE(g.edges.size() == 1);
    double best = 1e9;
    GeoPoint const corner = from_local(kOrigin, {0, 30});
    for (auto const& q : g.edges[0].polyline) best = std::min(best, haversine_distance(q, corner));
    CHECK(best <= 0.25);
  }

  TEST_CASE("edge width is the bottleneck of its samples") {
    auto frags = walk({{0, 0}, {0, 50}}, 0.5, 1.8);
    std::mt19937_64 rng{3};
    std::uniform_real_distribution<double> w(0.8, 2.5);
    double lo = 1e9;
    for (auto& f : frags) {
      f.width_m = w(rng);
      lo = std::min(lo, f.width_m);
    }
    auto const g = build_graph(frags);
    REQUIRE(g.edges.size() == 1);
    CHECK(g.edges[0].width_m == lo);
  }

  TEST_CASE("graph is deterministic in its input") {
    auto frags = walk({{0, 0}, {0, 40}, {25, 40}}, 0.7, 1.5);
    auto const a = to_geojson(build_graph(frags), {});
    auto const b = to_geojson(build_graph(frags), {});
    CHECK(a.dump() == b.dump());
  }

  TEST_CASE("gap detection") {
    auto const g1 = straight_pair(2.5);
    REQUIRE(g1.edges.size() == 2);
    auto const d1 = detect_gaps(g1, 3.0);
    REQUIRE(d1.size() == 1);
    CHECK(d1[0].gap_m == doctest::Approx(2.5).epsilon(1e-6));
    CHECK(detect_gaps(straight_pair(50.0), 3.0).empty());

    // Three edges whose free ends meet pairwise within 2 m.
    PathGraph tri;
    std::vector<GeoPoint> ends;
    std::vector<GeoPoint> far;
    for (int k = 0; k < 3; ++k) {
      double const ang = k * 120.0 * oracle::kDeg;
      ends.push_back(from_local(kOrigin, {std::sin(ang), std::cos(ang)}));
      far.push_back(from_local(kOrigin, {20 * std::sin(ang), 20 * std::cos(ang)}));
    }
    for (int k = 0; k < 3; ++k) {
      tri.nodes.push_back({2 * k + 1, ends[static_cast<std::size_t>(k)]});
      tri.nodes.push_back({2 * k + 2, far[static_cast<std::size_t>(k)]});
      tri.edges.push_back(line_edge(k + 1, 2 * k + 1, 2 * k + 2, ends[static_cast<std::size_t>(k)],
                                    far[static_cast<std::size_t>(k)], 1.8));
    }
    auto const d3 = detect_gaps(tri, 3.0);
    CHECK(d3.size() == 3);
    for (auto const& d : d3) CHECK(d.gap_m == doctest::Approx(std::sqrt(3.0)).epsilon(1e-6));
  }

  TEST_CASE("accessibility flags") {
    PathGraph g;
    auto const a = from_local(kOrigin, {0, 0});
    auto const b = from_local(kOrigin, {0, 10});
    g.nodes = {{1, a}, {2, b}};
    g.edges = {line_edge(1, 1, 2, a, b, 1.8), line_edge(2, 1, 2, a, b, 0.7), line_edge(3, 1, 2, a, b, 0.9)};
    CHECK(accessibility_flags(g) == std::vector<bool>{false, true, false});
    CHECK(accessibility_flags(g, 2.0) == std::vector<bool>{true, true, true});
  }

  TEST_CASE("geojson shape and round trip") {
    auto const empty = to_geojson(PathGraph{}, {});
    CHECK(empty["type"] == "FeatureCollection");
    CHECK(empty["features"].is_array());
    CHECK(empty["features"].empty());

    PathGraph g;
    auto const a = from_local(kOrigin, {0, 0});
    auto const b = from_local(kOrigin, {0, 10});
    g.nodes = {{1, a}, {2, b}};
    g.edges = {line_edge(1, 1, 2, a, b, 1.25)};
    std::vector<LocatedObject> const objs{{1, ClassId::pole, from_local(kOrigin, {1.5, 5}), 12}};
    auto const doc = to_geojson(g, objs);
    REQUIRE(doc["features"].size() == 2);
    auto const& line = doc["features"][0];
    CHECK(line["geometry"]["type"] == "LineString");
    for (auto const* key : {"highway", "footway", "width", "inaccessible"}) CHECK(line["properties"].contains(key));
    CHECK(line["properties"]["highway"] == "footway");
    CHECK(line["properties"]["footway"] == "sidewalk");
    CHECK(line["properties"]["width"].get<double>() == 1.25);
    auto const& pt = doc["features"][1];
    CHECK(pt["geometry"]["type"] == "Point");
    CHECK(pt["properties"]["class"] == "pole");
    CHECK(pt["properties"]["observation_count"] == 12);
    auto const coords = pt["geometry"]["coordinates"];
    CHECK(coords[0].get<double>() == doctest::Approx(objs[0].location.lon_deg).epsilon(1e-9));

    auto const back = from_geojson(nlohmann::json::parse(doc.dump()));
    CHECK(back.graph.edges.size() == 1);
    CHECK(back.graph.nodes.size() == 2);
    CHECK(back.graph.edges[0].width_m == 1.25);
    CHECK(back.objects.size() == 1);
    CHECK(back.objects[0].observation_count == 12);

    CHECK_THROWS_AS(from_geojson(nlohmann::json::object()), ParseError);
  }

  TEST_CASE("geojson round trip of a built graph is isomorphic") {
    auto frags = walk({{0, 0}, {0, 40}, {30, 40}}, 0.5, 1.7);
    auto more = walk({{0, 50}, {0, 80}}, 0.5, 0.8, 1000);
    frags.insert(frags.end(), more.begin(), more.end());
    auto g = build_graph(frags);
    g.disconnections = detect_gaps(g, 15.0);
    auto const back = from_geojson(to_geojson(g, {}));
    CHECK(back.graph.nodes.size() == g.nodes.size());
    REQUIRE(back.graph.edges.size() == g.edges.size());
    for (std::size_t i = 0; i < g.edges.size(); ++i) {
      CHECK(back.graph.edges[i].from == g.edges[i].from);
      CHECK(back.graph.edges[i].to == g.edges[i].to);
      CHECK(std::abs(back.graph.edges[i].width_m - g.edges[i].width_m) < 1e-6);
    }
    CHECK(back.graph.disconnections.size() == g.disconnections.size());
    std::set<std::pair<std::int64_t, std::int64_t>> seen;
    for (auto const& e : g.edges) CHECK(seen.insert(std::minmax(e.from, e.to)).second);
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
      for (std::size_t j = i + 1; j < g.nodes.size(); ++j) {
        CHECK(haversine_distance(g.nodes[i].location, g.nodes[j].location) > 0.5);
      }
    }
  }

  TEST_CASE("summary") {
    PathGraph g;
    auto const a = from_local(kOrigin, {0, 0});
    auto const b = from_local(kOrigin, {0, 500});
    g.nodes = {{1, a}, {2, b}};
    g.edges = {line_edge(1, 1, 2, a, b, 0.7)};
    std::vector<LocatedObject> objs(10);
    auto const s = summarize(g, objs);
    CHECK(s.edge_count == 1);
    CHECK(s.total_length_m == doctest::Approx(500.0).epsilon(1e-6));
    CHECK(*s.obstacles_per_km == doctest::Approx(20.0).epsilon(1e-6));
    CHECK(s.inaccessible_edge_count == 1);
    CHECK(format_summary(s).find("edges: 1") != std::string::npos);
  }
}
