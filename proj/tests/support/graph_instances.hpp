#pragma once

// Small random path graphs and an optimal-matching reference for the
// edge-assignment metrics.

#include <cmath>
#include <random>
#include <vector>

#include "oasis/eval.hpp"
#include "oasis/graph.hpp"
#include "oracles.hpp"

namespace instances {

inline oasis::GeoPoint const kOrigin{47.6097, -122.3331};

/// Straight edges of 1..6 m in a 12 m box; at most `max_points` resampled
/// points overall.
inline oasis::PathGraph random_graph(std::mt19937_64& rng, std::size_t max_points = 15) {
  std::uniform_real_distribution<double> pos(0.0, 12.0);
  std::uniform_real_distribution<double> len(1.0, 6.0);
  std::uniform_real_distribution<double> ang(0.0, 2 * 3.14159265358979323846);
  std::uniform_real_distribution<double> width(0.8, 2.2);
  oasis::PathGraph g;
  std::size_t points = 0;
  int const edges = std::uniform_int_distribution<int>(1, 3)(rng);
  for (int k = 0; k < edges; ++k) {
    double const x = pos(rng);
    double const y = pos(rng);
    double const l = len(rng);
    double const a = ang(rng);
    auto const n = static_cast<std::size_t>(std::max(1L, std::lround(l))) + 1;
    if (points + n > max_points) break;
    points += n;
    auto const p = oasis::from_local(kOrigin, {x, y});
    auto const q = oasis::from_local(kOrigin, {x + l * std::sin(a), y + l * std::cos(a)});
    auto const id = static_cast<std::int64_t>(g.nodes.size());
    g.nodes.push_back({id + 1, p});
    g.nodes.push_back({id + 2, q});
    g.edges.push_back({static_cast<std::int64_t>(g.edges.size()) + 1, id + 1, id + 2, {p, q}, width(rng),
                       oasis::EdgeKind::sidewalk});
  }
  if (g.edges.empty()) {
    auto const p = oasis::from_local(kOrigin, {0, 0});
    auto const q = oasis::from_local(kOrigin, {0, 2});
    g.nodes = {{1, p}, {2, q}};
    g.edges.push_back({1, 1, 2, {p, q}, 1.5, oasis::EdgeKind::sidewalk});
  }
  return g;
}

struct Optimal {
  double precision = 0.0;
  double recall = 0.0;
  std::size_t matched = 0;
};

/// Maximum one-to-one matching of resampled points within the buffer.
inline Optimal optimal_metrics(oasis::PathGraph const& pred, oasis::PathGraph const& truth, double buffer_m) {
  auto const origin = truth.nodes.front().location;
  auto const p = oasis::resample_graph(pred, origin);
  auto const t = oasis::resample_graph(truth, origin);
  std::vector<std::vector<std::size_t>> adj(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    for (std::size_t j = 0; j < t.size(); ++j) {
      if (std::hypot(p[i].xy.x - t[j].xy.x, p[i].xy.y - t[j].xy.y) <= buffer_m) adj[i].push_back(j);
    }
  }
  Optimal o;
  o.matched = oracle::max_matching(adj, t.size());
  o.precision = static_cast<double>(o.matched) / static_cast<double>(p.size());
  o.recall = static_cast<double>(o.matched) / static_cast<double>(t.size());
  return o;
}

/// True when every point has at most one partner within the buffer, so any
/// maximal matching is the maximum one.
inline bool unambiguous(oasis::PathGraph const& pred, oasis::PathGraph const& truth, double buffer_m) {
  auto const origin = truth.nodes.front().location;
  auto const p = oasis::resample_graph(pred, origin);
  auto const t = oasis::resample_graph(truth, origin);
  std::vector<int> tp(t.size(), 0);
  for (std::size_t i = 0; i < p.size(); ++i) {
    int n = 0;
    for (std::size_t j = 0; j < t.size(); ++j) {
      if (std::hypot(p[i].xy.x - t[j].xy.x, p[i].xy.y - t[j].xy.y) <= buffer_m) {
        ++n;
        ++tp[j];
      }
    }
    if (n > 1) return false;
  }
  for (int const n : tp) {
    if (n > 1) return false;
  }
  return true;
}

/// Copy of `g` translated by a planar offset.
inline oasis::PathGraph shifted(oasis::PathGraph const& g, double dx, double dy) {
  auto out = g;
  for (auto& n : out.nodes) {
    auto const l = oasis::to_local(kOrigin, n.location);
    n.location = oasis::from_local(kOrigin, {l.east_m + dx, l.north_m + dy});
  }
  for (auto& e : out.edges) {
    for (auto& p : e.polyline) {
      auto const l = oasis::to_local(kOrigin, p);
      p = oasis::from_local(kOrigin, {l.east_m + dx, l.north_m + dy});
    }
  }
  return out;
}

}  // namespace instances
