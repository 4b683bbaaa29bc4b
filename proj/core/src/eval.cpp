#include "oasis/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <tuple>
#include <unordered_map>

namespace oasis {

using nlohmann::json;

ErrorStats error_stats(std::span<double const> errors) {
  ErrorStats s;
  s.n = errors.size();
  if (s.n == 0) return s;
  double sum = 0.0;
  double sum_sq = 0.0;
  for (double const e : errors) {
    sum += e;
    sum_sq += e * e;
  }
  auto const n = static_cast<double>(s.n);
  s.mean = sum / n;
  double var = 0.0;
  for (double const e : errors) var += (e - s.mean) * (e - s.mean);
  s.stdev = std::sqrt(var / n);
  s.rmse = std::sqrt(sum_sq / n);
  return s;
}

ObjectPairing pair_objects(std::span<LocatedObject const> pred, std::span<LocatedObject const> truth,
                           double max_distance_m, double radius_m) {
  struct Candidate {
    double d;
    std::size_t p;
    std::size_t t;
  };
  std::vector<Candidate> cands;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    for (std::size_t j = 0; j < truth.size(); ++j) {
      if (pred[i].cls != truth[j].cls) continue;
      double const d = haversine_distance(pred[i].location, truth[j].location, radius_m);
      if (d <= max_distance_m) cands.push_back({d, i, j});
    }
  }
  std::ranges::sort(cands, [&](Candidate const& a, Candidate const& b) {
    return std::tie(a.d, pred[a.p].object_id, truth[a.t].object_id) <
           std::tie(b.d, pred[b.p].object_id, truth[b.t].object_id);
  });
  std::vector<bool> used_p(pred.size(), false);
  std::vector<bool> used_t(truth.size(), false);
  ObjectPairing out;
  for (auto const& c : cands) {
    if (used_p[c.p] || used_t[c.t]) continue;
    used_p[c.p] = used_t[c.t] = true;
    out.emplace_back(pred[c.p].object_id, truth[c.t].object_id);
  }
  std::ranges::sort(out);
  return out;
}

LocationReport location_stats(std::span<LocatedObject const> pred, std::span<LocatedObject const> truth,
                              ObjectPairing const& pairing, double radius_m) {
  std::unordered_map<std::int64_t, LocatedObject const*> by_pred;
  std::unordered_map<std::int64_t, LocatedObject const*> by_truth;
  for (auto const& o : pred) by_pred[o.object_id] = &o;
  for (auto const& o : truth) by_truth[o.object_id] = &o;

  std::map<ClassId, std::vector<double>> per_class;
  std::vector<double> all;
  for (auto const& [pid, tid] : pairing) {
    auto const p = by_pred.find(pid);
    auto const t = by_truth.find(tid);
    if (p == by_pred.end() || t == by_truth.end()) continue;
    double const e = haversine_distance(p->second->location, t->second->location, radius_m);
    per_class[t->second->cls].push_back(e);
    all.push_back(e);
  }
  LocationReport r;
  for (auto const& [cls, errs] : per_class) r.per_class[cls] = error_stats(errs);
  r.overall = error_stats(all);
  return r;
}

std::vector<EdgePoint> resample_graph(PathGraph const& graph, GeoPoint origin, double spacing_m,
                                      double radius_m) {
  std::vector<EdgePoint> out;
  std::vector<PlanePoint> xy;
  std::vector<double> arc;
  for (auto const& e : graph.edges) {
    xy.clear();
    arc.clear();
    for (auto const& g : e.polyline) {
      auto const l = to_local(origin, g, radius_m);
      xy.push_back({l.east_m, l.north_m});
    }
    if (xy.empty()) continue;
    arc.push_back(0.0);
    for (std::size_t i = 1; i < xy.size(); ++i) {
      arc.push_back(arc.back() + std::hypot(xy[i].x - xy[i - 1].x, xy[i].y - xy[i - 1].y));
    }
    double const length = arc.back();
    auto const segments = std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(length / spacing_m)));
    std::size_t seg = 0;
    for (std::size_t k = 0; k <= segments; ++k) {
      double const s = length * static_cast<double>(k) / static_cast<double>(segments);
      while (seg + 2 < xy.size() && arc[seg + 1] < s) ++seg;
      std::size_t const nxt = std::min(seg + 1, xy.size() - 1);
      double const span = arc[nxt] - arc[seg];
      double const t = span > 0.0 ? std::clamp((s - arc[seg]) / span, 0.0, 1.0) : 0.0;
      out.push_back({{xy[seg].x + t * (xy[nxt].x - xy[seg].x), xy[seg].y + t * (xy[nxt].y - xy[seg].y)},
                     e.width_m});
    }
  }
  return out;
}

std::vector<std::pair<std::size_t, std::size_t>> greedy_point_matching(std::span<EdgePoint const> pred,
                                                                       std::span<EdgePoint const> truth,
                                                                       double buffer_m) {
  // Bucket truth points on a grid of buffer-sized cells.
  auto cell_of = [&](PlanePoint p) {
    return std::pair<std::int64_t, std::int64_t>{static_cast<std::int64_t>(std::floor(p.x / buffer_m)),
                                                 static_cast<std::int64_t>(std::floor(p.y / buffer_m))};
  };
  auto key = [](std::int64_t cx, std::int64_t cy) {
    return (static_cast<std::uint64_t>(cx) << 32) ^ (static_cast<std::uint64_t>(cy) & 0xffffffffULL);
  };
  std::unordered_map<std::uint64_t, std::vector<std::size_t>> grid;
  for (std::size_t j = 0; j < truth.size(); ++j) {
    auto const [cx, cy] = cell_of(truth[j].xy);
    grid[key(cx, cy)].push_back(j);
  }

  struct Candidate {
    double d;
    std::size_t p;
    std::size_t t;
  };
  std::vector<Candidate> cands;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    auto const [cx, cy] = cell_of(pred[i].xy);
    for (std::int64_t dx = -1; dx <= 1; ++dx) {
      for (std::int64_t dy = -1; dy <= 1; ++dy) {
        auto const it = grid.find(key(cx + dx, cy + dy));
        if (it == grid.end()) continue;
        for (auto const j : it->second) {
          double const d = std::hypot(pred[i].xy.x - truth[j].xy.x, pred[i].xy.y - truth[j].xy.y);
          if (d <= buffer_m) cands.push_back({d, i, j});
        }
      }
    }
  }
  std::ranges::sort(cands, [](Candidate const& a, Candidate const& b) {
    return std::tie(a.d, a.p, a.t) < std::tie(b.d, b.p, b.t);
  });
  std::vector<bool> used_p(pred.size(), false);
  std::vector<bool> used_t(truth.size(), false);
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (auto const& c : cands) {
    if (used_p[c.p] || used_t[c.t]) continue;
    used_p[c.p] = used_t[c.t] = true;
    out.emplace_back(c.p, c.t);
  }
  return out;
}

GraphMatchReport graph_metrics(PathGraph const& pred, PathGraph const& truth, double buffer_m,
                               double spacing_m, double radius_m) {
  GeoPoint origin{};
  if (!truth.nodes.empty()) {
    origin = truth.nodes.front().location;
  } else if (!pred.nodes.empty()) {
    origin = pred.nodes.front().location;
  }
  auto const p = resample_graph(pred, origin, spacing_m, radius_m);
  auto const t = resample_graph(truth, origin, spacing_m, radius_m);
  auto const matches = greedy_point_matching(p, t, buffer_m);

  GraphMatchReport r;
  r.total_pred = p.size();
  r.total_truth = t.size();
  r.matched_pred = r.matched_truth = matches.size();
  if (r.total_pred > 0) r.precision = static_cast<double>(r.matched_pred) / static_cast<double>(r.total_pred);
  if (r.total_truth > 0) r.recall = static_cast<double>(r.matched_truth) / static_cast<double>(r.total_truth);
  if (r.precision && r.recall) {
    double const s = *r.precision + *r.recall;
    r.f1 = s > 0.0 ? 2.0 * *r.precision * *r.recall / s : 0.0;
  }
  std::vector<double> loc;
  std::vector<double> width;
  loc.reserve(matches.size());
  width.reserve(matches.size());
  for (auto const& [i, j] : matches) {
    loc.push_back(std::hypot(p[i].xy.x - t[j].xy.x, p[i].xy.y - t[j].xy.y));
    width.push_back(std::abs(p[i].width_m - t[j].width_m));
  }
  r.location = error_stats(loc);
  r.width = error_stats(width);
  return r;
}

std::optional<double> obstacle_density(std::size_t object_count, PathGraph const& graph, double radius_m) {
  double const km = graph.total_length_m(radius_m) / 1000.0;
  if (!(km > 0.0)) return std::nullopt;
  return static_cast<double>(object_count) / km;
}

EvalReport evaluate(MapDocument const& pred, MapDocument const& truth, EvalParams const& params) {
  EvalReport r;
  r.graph = graph_metrics(pred.graph, truth.graph, params.buffer_m, params.spacing_m, params.earth_radius_m);
  auto const pairing = pair_objects(pred.objects, truth.objects, params.pairing_radius_m, params.earth_radius_m);
  r.objects = location_stats(pred.objects, truth.objects, pairing, params.earth_radius_m);
  r.pred_objects = pred.objects.size();
  r.truth_objects = truth.objects.size();
  r.paired_objects = pairing.size();
  r.obstacles_per_km = obstacle_density(pred.objects.size(), pred.graph, params.earth_radius_m);
  return r;
}

namespace {

json opt(std::optional<double> v) { return v ? json(*v) : json(nullptr); }

json stats_json(ErrorStats const& s) {
  if (!s.defined()) return {{"n", 0}, {"mean", nullptr}, {"stdev", nullptr}, {"rmse", nullptr}};
  return {{"n", s.n}, {"mean", s.mean}, {"stdev", s.stdev}, {"rmse", s.rmse}};
}

std::string cell(ErrorStats const& s, double ErrorStats::*field) {
  if (!s.defined()) return "n/a";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", s.*field);
  return buf;
}

std::string opt_str(std::optional<double> v) {
  if (!v) return "undefined";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", *v);
  return buf;
}

}  // namespace

json to_json(EvalReport const& r) {
  json per_class = json::object();
  for (auto const& [cls, s] : r.objects.per_class) per_class[std::string{class_name(cls)}] = stats_json(s);
  return {{"graph",
           {{"precision", opt(r.graph.precision)},
            {"recall", opt(r.graph.recall)},
            {"f1", opt(r.graph.f1)},
            {"matched_pred", r.graph.matched_pred},
            {"matched_truth", r.graph.matched_truth},
            {"total_pred", r.graph.total_pred},
            {"total_truth", r.graph.total_truth},
            {"location_error_m", stats_json(r.graph.location)},
            {"width_error_m", stats_json(r.graph.width)}}},
          {"objects",
           {{"pred", r.pred_objects},
            {"truth", r.truth_objects},
            {"paired", r.paired_objects},
            {"location_error_m", {{"per_class", per_class}, {"overall", stats_json(r.objects.overall)}}}}},
          {"obstacles_per_km", opt(r.obstacles_per_km)}};
}

std::string format_location_table(LocationReport const& report) {
  std::vector<std::pair<std::string, ErrorStats const*>> cols;
  for (auto const& [cls, s] : report.per_class) cols.emplace_back(std::string{class_name(cls)}, &s);
  cols.emplace_back("all", &report.overall);

  std::ostringstream out;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%-10s", "");
  out << buf;
  for (auto const& [name, s] : cols) {
    std::snprintf(buf, sizeof buf, "%14s", name.c_str());
    out << buf;
  }
  out << '\n';
  for (auto const& [label, field] : {std::pair{"Mean (m)", &ErrorStats::mean},
                                     std::pair{"STDEV (m)", &ErrorStats::stdev},
                                     std::pair{"RMSE (m)", &ErrorStats::rmse}}) {
    std::snprintf(buf, sizeof buf, "%-10s", label);
    out << buf;
    for (auto const& [name, s] : cols) {
      std::snprintf(buf, sizeof buf, "%14s", cell(*s, field).c_str());
      out << buf;
    }
    out << '\n';
  }
  return out.str();
}

std::string format_report(EvalReport const& r) {
  std::ostringstream out;
  out << "Sidewalk network\n"
      << "  precision: " << opt_str(r.graph.precision) << '\n'
      << "  recall:    " << opt_str(r.graph.recall) << '\n'
      << "  f1:        " << opt_str(r.graph.f1) << '\n'
      << "  points:    " << r.graph.matched_pred << " matched of " << r.graph.total_pred << " predicted, "
      << r.graph.total_truth << " true\n"
      << "  location error (m): mean " << cell(r.graph.location, &ErrorStats::mean) << ", stdev "
      << cell(r.graph.location, &ErrorStats::stdev) << ", rmse " << cell(r.graph.location, &ErrorStats::rmse)
      << '\n'
      << "  width error (m):    mean " << cell(r.graph.width, &ErrorStats::mean) << ", stdev "
      << cell(r.graph.width, &ErrorStats::stdev) << ", rmse " << cell(r.graph.width, &ErrorStats::rmse) << '\n'
      << "\nStatic objects (" << r.paired_objects << " paired, " << r.pred_objects << " predicted, "
      << r.truth_objects << " true)\n"
      << format_location_table(r.objects) << "\nobstacles per km: " << opt_str(r.obstacles_per_km) << '\n';
  return out.str();
}

}  // namespace oasis
