#include "oasis/synth.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numbers>
#include <random>

#include "oasis/errors.hpp"
#include "oasis/raster_io.hpp"
#include "oasis/taxonomy.hpp"

namespace oasis {

namespace {

using nlohmann::json;

constexpr double kDeg = std::numbers::pi / 180.0;

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

Vec2 operator-(LocalOffset a, LocalOffset b) { return {a.east_m - b.east_m, a.north_m - b.north_m}; }

double norm(Vec2 v) { return std::hypot(v.x, v.y); }

LocalOffset parse_point(json const& j, char const* what) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    throw ParseError(std::string{what} + ": points must be [east_m, north_m] pairs");
  }
  LocalOffset p{j[0].get<double>(), j[1].get<double>()};
  if (!std::isfinite(p.east_m) || !std::isfinite(p.north_m)) {
    throw ValidationError(std::string{what} + ": coordinates must be finite");
  }
  return p;
}

std::vector<LocalOffset> parse_points(json const& obj, char const* what) {
  auto const it = obj.find("points");
  if (it == obj.end() || !it->is_array()) throw ParseError(std::string{what} + ": missing 'points'");
  std::vector<LocalOffset> out;
  for (auto const& p : *it) out.push_back(parse_point(p, what));
  return out;
}

double number_or(json const& obj, char const* key, double fallback) {
  auto const it = obj.find(key);
  if (it == obj.end() || it->is_null()) return fallback;
  if (!it->is_number()) throw ParseError(std::string{"field '"} + key + "' must be a number");
  return it->get<double>();
}

json points_json(std::span<LocalOffset const> pts) {
  json arr = json::array();
  for (auto const& p : pts) arr.push_back({p.east_m, p.north_m});
  return arr;
}

// Quadrilateral covering one centerline segment with linearly varying width.
std::vector<LocalOffset> segment_quad(LocalOffset a, LocalOffset b, double wa, double wb) {
  Vec2 const d = b - a;
  double const len = norm(d);
  Vec2 const n{-d.y / len, d.x / len};
  return {{a.east_m + n.x * wa / 2, a.north_m + n.y * wa / 2},
          {b.east_m + n.x * wb / 2, b.north_m + n.y * wb / 2},
          {b.east_m - n.x * wb / 2, b.north_m - n.y * wb / 2},
          {a.east_m - n.x * wa / 2, a.north_m - n.y * wa / 2}};
}

// Horizontal interval [lo, hi] in camera x where the ground line z = Z
// crosses a polygon given in camera (x, z) coordinates.
void polygon_intervals(std::span<Vec2 const> ring, double z, std::vector<std::pair<double, double>>& out) {
  thread_local std::vector<double> xs;
  xs.clear();
  std::size_t const n = ring.size();
  for (std::size_t i = 0; i < n; ++i) {
    Vec2 const a = ring[i];
    Vec2 const b = ring[(i + 1) % n];
    if ((a.y <= z) != (b.y <= z)) xs.push_back(a.x + (z - a.y) * (b.x - a.x) / (b.y - a.y));
  }
  std::sort(xs.begin(), xs.end());
  for (std::size_t i = 0; i + 1 < xs.size(); i += 2) out.emplace_back(xs[i], xs[i + 1]);
}

SceneSpec base_scene(std::string name) {
  SceneSpec s;
  s.name = std::move(name);
  return s;
}

ScenePath straight_path(LocalOffset a, LocalOffset b, double width, EdgeKind kind = EdgeKind::sidewalk) {
  return ScenePath{{a, b}, {width, width}, kind};
}

ScenePolygon rect(double x0, double y0, double x1, double y1) {
  return ScenePolygon{{{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}}};
}

}  // namespace

void validate_scene(SceneSpec const& scene) {
  if (scene.scene_version != kSceneVersion) {
    throw ValidationError("unsupported scene_version " + std::to_string(scene.scene_version));
  }
  if (!is_valid(scene.origin)) throw ValidationError("scene origin out of range");
  if (scene.camera) scene.camera->validate();
  for (std::size_t i = 0; i < scene.paths.size(); ++i) {
    auto const& p = scene.paths[i];
    std::string const where = "path " + std::to_string(i);
    if (p.points.size() < 2) throw ValidationError(where + ": needs at least 2 points");
    if (p.widths.size() != p.points.size()) throw ValidationError(where + ": one width per point required");
    for (double w : p.widths) {
      if (!(w > 0.0) || !std::isfinite(w)) throw ValidationError(where + ": widths must be positive");
    }
    for (std::size_t k = 1; k < p.points.size(); ++k) {
      if (norm(p.points[k] - p.points[k - 1]) <= 1e-9) throw ValidationError(where + ": repeated point");
    }
  }
  for (std::size_t i = 0; i < scene.roads.size(); ++i) {
    if (scene.roads[i].points.size() < 3) {
      throw ValidationError("road " + std::to_string(i) + ": polygon needs at least 3 points");
    }
  }
  for (auto const& o : scene.objects) {
    std::string const where = "object " + std::to_string(o.id);
    if (!is_static_infrastructure(o.cls)) throw ValidationError(where + ": class must be static infrastructure");
    if (!(o.radius_m > 0.0) || !(o.height_m > 0.0)) throw ValidationError(where + ": radius and height must be positive");
  }
  if (scene.trajectory.size() < 2) throw ValidationError("trajectory needs at least 2 points");
  for (std::size_t k = 1; k < scene.trajectory.size(); ++k) {
    if (norm(scene.trajectory[k] - scene.trajectory[k - 1]) <= 1e-9) {
      throw ValidationError("trajectory has a repeated point");
    }
  }
  if (!(scene.speed_mps > 0.0)) throw ValidationError("speed_mps must be positive");
  if (!(scene.max_range_m > 0.0)) throw ValidationError("max_range_m must be positive");
  auto const& n = scene.noise;
  if (n.gps_sigma_m < 0 || n.heading_sigma_deg < 0 || n.depth_rel_sigma < 0) {
    throw ValidationError("noise sigmas must be non-negative");
  }
  if (n.dropout_prob < 0 || n.dropout_prob >= 1) throw ValidationError("dropout_prob must lie in [0, 1)");
}

SceneSpec parse_scene(json const& doc) {
  if (!doc.is_object()) throw ParseError("scene must be an object");
  SceneSpec s;
  s.scene_version = static_cast<int>(number_or(doc, "scene_version", -1));
  if (s.scene_version < 0) throw ParseError("missing field 'scene_version'");
  s.name = doc.value("name", std::string{});
  if (auto it = doc.find("origin"); it != doc.end()) {
    s.origin = {number_or(*it, "lat_deg", 0.0), number_or(*it, "lon_deg", 0.0)};
  }
  if (auto it = doc.find("camera"); it != doc.end() && !it->is_null()) {
    auto const& c = *it;
    auto const d = CameraModel::survey_default();
    std::optional<double> fx;
    std::optional<double> cx;
    if (c.contains("fx_px")) fx = number_or(c, "fx_px", 0.0);
    if (c.contains("cx_px")) cx = number_or(c, "cx_px", 0.0);
    s.camera = CameraModel::make(static_cast<int>(number_or(c, "width_px", d.width_px)),
                                 static_cast<int>(number_or(c, "height_px", d.height_px)),
                                 number_or(c, "hfov_deg", d.hfov_deg), number_or(c, "vfov_deg", d.vfov_deg),
                                 number_or(c, "mount_height_m", d.mount_height_m), fx, cx);
  }
  for (auto const& p : doc.value("paths", json::array())) {
    ScenePath path;
    path.points = parse_points(p, "path");
    if (auto w = p.find("widths"); w != p.end()) {
      path.widths = w->get<std::vector<double>>();
    } else {
      path.widths.assign(path.points.size(), number_or(p, "width_m", 0.0));
    }
    auto const kind = p.value("kind", std::string{"sidewalk"});
    if (kind == "sidewalk") {
      path.kind = EdgeKind::sidewalk;
    } else if (kind == "crossing") {
      path.kind = EdgeKind::crossing;
    } else {
      throw ValidationError("unknown path kind '" + kind + "'");
    }
    s.paths.push_back(std::move(path));
  }
  for (auto const& r : doc.value("roads", json::array())) s.roads.push_back({parse_points(r, "road")});
  std::int64_t next_id = 1;
  for (auto const& o : doc.value("objects", json::array())) {
    SceneObject obj;
    obj.id = o.contains("id") ? o.at("id").get<std::int64_t>() : next_id;
    next_id = obj.id + 1;
    auto const name = o.value("class", std::string{});
    auto const cls = class_from_name(name);
    if (!cls) throw ValidationError("unknown object class '" + name + "'");
    obj.cls = *cls;
    if (!o.contains("at")) throw ParseError("object: missing 'at'");
    obj.at = parse_point(o.at("at"), "object");
    obj.radius_m = number_or(o, "radius_m", obj.radius_m);
    obj.height_m = number_or(o, "height_m", obj.height_m);
    s.objects.push_back(obj);
  }
  if (auto it = doc.find("trajectory"); it != doc.end()) {
    s.trajectory = parse_points(*it, "trajectory");
    s.speed_mps = number_or(*it, "speed_mps", s.speed_mps);
  }
  if (auto it = doc.find("noise"); it != doc.end()) {
    s.noise.gps_sigma_m = number_or(*it, "gps_sigma_m", 0.0);
    s.noise.heading_sigma_deg = number_or(*it, "heading_sigma_deg", 0.0);
    s.noise.depth_rel_sigma = number_or(*it, "depth_rel_sigma", 0.0);
    s.noise.dropout_prob = number_or(*it, "dropout_prob", 0.0);
  }
  s.max_range_m = number_or(doc, "max_range_m", s.max_range_m);
  validate_scene(s);
  return s;
}

SceneSpec load_scene(std::filesystem::path const& path) {
  std::ifstream in{path};
  if (!in) throw IoError("cannot open scene", path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (json::parse_error const& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  return parse_scene(doc);
}

json scene_to_json(SceneSpec const& s) {
  using ojson = nlohmann::ordered_json;
  ojson doc;
  doc["scene_version"] = s.scene_version;
  doc["name"] = s.name;
  doc["origin"] = {{"lat_deg", s.origin.lat_deg}, {"lon_deg", s.origin.lon_deg}};
  if (s.camera) {
    auto const& c = *s.camera;
    doc["camera"] = {{"width_px", c.width_px}, {"height_px", c.height_px}, {"hfov_deg", c.hfov_deg},
                     {"vfov_deg", c.vfov_deg}, {"fx_px", c.fx_px},         {"cx_px", c.cx_px},
                     {"mount_height_m", c.mount_height_m}};
  }
  doc["paths"] = ojson::array();
  for (auto const& p : s.paths) {
    doc["paths"].push_back({{"kind", std::string{edge_kind_name(p.kind)}},
                            {"points", points_json(p.points)},
                            {"widths", p.widths}});
  }
  doc["roads"] = ojson::array();
  for (auto const& r : s.roads) doc["roads"].push_back({{"points", points_json(r.points)}});
  doc["objects"] = ojson::array();
  for (auto const& o : s.objects) {
    doc["objects"].push_back({{"id", o.id},
                              {"class", std::string{class_name(o.cls)}},
                              {"at", {o.at.east_m, o.at.north_m}},
                              {"radius_m", o.radius_m},
                              {"height_m", o.height_m}});
  }
  doc["trajectory"] = {{"points", points_json(s.trajectory)}, {"speed_mps", s.speed_mps}};
  doc["noise"] = {{"gps_sigma_m", s.noise.gps_sigma_m},
                  {"heading_sigma_deg", s.noise.heading_sigma_deg},
                  {"depth_rel_sigma", s.noise.depth_rel_sigma},
                  {"dropout_prob", s.noise.dropout_prob}};
  doc["max_range_m"] = s.max_range_m;
  return json(doc);
}

SceneSpec corridor_scene(double length_m, int object_count, double width_m) {
  auto s = base_scene("corridor");
  s.paths.push_back(straight_path({0, 0}, {0, length_m}, width_m));
  s.roads.push_back(rect(3.5, -50.0, 10.5, length_m + 50.0));
  static constexpr std::array<ClassId, 4> kCycle{ClassId::pole, ClassId::traffic_sign, ClassId::pole,
                                                 ClassId::traffic_light};
  for (int i = 0; i < object_count; ++i) {
    SceneObject o;
    o.id = i + 1;
    o.cls = kCycle[static_cast<std::size_t>(i) % kCycle.size()];
    double const side = (i % 2 == 0) ? 1.0 : -1.0;
    double const offset = width_m / 2 + 0.8 + 0.3 * static_cast<double>(i % 3);
    o.at = {side * offset, length_m * (i + 0.5) / object_count};
    switch (o.cls) {
      case ClassId::traffic_sign: o.radius_m = 0.30; o.height_m = 2.5; break;
      case ClassId::traffic_light: o.radius_m = 0.20; o.height_m = 3.5; break;
      default: o.radius_m = 0.12; o.height_m = 4.0; break;
    }
    s.objects.push_back(o);
  }
  // Start a few meters early so the nearest sample row reaches the path start.
  s.trajectory = {{0, -5.0}, {0, length_m}};
  return s;
}

namespace {

SceneSpec grid_scene() {
  auto s = base_scene("grid");
  double const w = 1.8;
  s.paths.push_back(straight_path({0, 0}, {0, 60}, w));
  s.paths.push_back(straight_path({0, 60}, {0, 72}, w, EdgeKind::crossing));
  s.paths.push_back(ScenePath{{{0, 72}, {0, 100}, {40, 100}}, {w, w, w}, EdgeKind::sidewalk});
  s.roads.push_back(rect(-40, 60, 40, 72));
  s.roads.push_back(rect(3.5, -20, 10.5, 60));
  s.roads.push_back(rect(3.5, 72, 10.5, 96.5));
  s.objects = {
      {1, ClassId::pole, {1.9, 15}, 0.12, 4.0},
      {2, ClassId::traffic_sign, {-1.9, 35}, 0.30, 2.5},
      {3, ClassId::traffic_light, {1.9, 57}, 0.20, 3.5},
      {4, ClassId::traffic_light, {-1.9, 75}, 0.20, 3.5},
      {5, ClassId::pole, {1.9, 88}, 0.12, 4.0},
      {6, ClassId::building, {-7.0, 50}, 2.5, 6.0},
      {7, ClassId::pole, {20, 98.1}, 0.12, 4.0},
      {8, ClassId::traffic_sign, {32, 101.9}, 0.30, 2.5},
  };
  // Round the corner so the camera sweeps it instead of snapping around.
  s.trajectory = {{0, -5}, {0, 97}};
  for (int k = 1; k < 6; ++k) {
    double const a = std::numbers::pi / 2 * k / 6.0;
    s.trajectory.push_back({3.0 - 3.0 * std::cos(a), 97.0 + 3.0 * std::sin(a)});
  }
  s.trajectory.push_back({3, 100});
  s.trajectory.push_back({40, 100});
  return s;
}

SceneSpec fragmented_scene() {
  auto s = base_scene("fragmented");
  s.paths.push_back(straight_path({0, 0}, {0, 40}, 1.8));
  s.paths.push_back(straight_path({0, 45}, {0, 80}, 1.8));
  s.paths.push_back(straight_path({0, 92}, {0, 130}, 0.8));
  s.paths.push_back(straight_path({0, 134}, {0, 170}, 1.8));
  s.roads.push_back(rect(3.5, -20, 10.5, 190));
  s.objects = {
      {1, ClassId::pole, {1.9, 20}, 0.12, 4.0},
      {2, ClassId::traffic_sign, {-1.8, 60}, 0.30, 2.5},
      {3, ClassId::pole, {1.6, 110}, 0.12, 4.0},
      {4, ClassId::traffic_light, {-1.9, 150}, 0.20, 3.5},
  };
  s.trajectory = {{0, -5}, {0, 170}};
  return s;
}

}  // namespace

std::vector<std::string> builtin_scene_names() { return {"corridor", "grid", "fragmented"}; }

std::optional<SceneSpec> builtin_scene(std::string_view name) {
  if (name == "corridor") return corridor_scene();
  if (name == "grid") return grid_scene();
  if (name == "fragmented") return fragmented_scene();
  return std::nullopt;
}

CameraModel scene_camera(SceneSpec const& scene) {
  return scene.camera.value_or(CameraModel::survey_default());
}

// ---------------------------------------------------------------------------

SceneRenderer::SceneRenderer(SceneSpec const& scene, CameraModel camera)
    : scene_{&scene}, camera_{camera} {
  validate_scene(scene);
  auto add_ring = [&](std::vector<LocalOffset> ring, ClassId cls) {
    Shape sh;
    double cx = 0;
    double cy = 0;
    for (auto const& p : ring) {
      cx += p.east_m;
      cy += p.north_m;
    }
    sh.center = {cx / ring.size(), cy / ring.size()};
    for (auto const& p : ring) sh.reach = std::max(sh.reach, norm(p - sh.center));
    sh.ring = std::move(ring);
    sh.cls = cls;
    shapes_.push_back(std::move(sh));
  };
  for (auto const& r : scene.roads) add_ring(r.points, ClassId::road);
  for (auto const& p : scene.paths) {
    if (p.kind != EdgeKind::sidewalk) continue;
    for (std::size_t k = 0; k + 1 < p.points.size(); ++k) {
      add_ring(segment_quad(p.points[k], p.points[k + 1], p.widths[k], p.widths[k + 1]), ClassId::sidewalk);
    }
    // Fill the wedge at interior bends.
    for (std::size_t k = 1; k + 1 < p.points.size(); ++k) {
      Shape disc;
      disc.center = p.points[k];
      disc.radius = disc.reach = p.widths[k] / 2;
      disc.cls = ClassId::sidewalk;
      shapes_.push_back(std::move(disc));
    }
  }
}

RenderedFrame SceneRenderer::render(PlanarPose const& pose, std::uint64_t noise_seed) const {
  auto const& cam = camera_;
  if (!(cam.mount_height_m > 0.0)) throw ValidationError("camera must be above the ground plane");
  RenderedFrame out{SegMask(cam.width_px, cam.height_px, to_id(ClassId::sky)),
                    DepthMap(cam.width_px, cam.height_px, std::numeric_limits<float>::quiet_NaN())};

  Vec2 const f{std::sin(pose.heading_deg * kDeg), std::cos(pose.heading_deg * kDeg)};
  Vec2 const r{f.y, -f.x};
  LocalOffset const c{pose.east_m, pose.north_m};
  auto to_cam = [&](LocalOffset p) {
    Vec2 const d = p - c;
    return Vec2{d.x * r.x + d.y * r.y, d.x * f.x + d.y * f.y};
  };

  struct CamShape {
    std::vector<Vec2> ring;
    Vec2 center;
    double radius = 0.0;
    std::uint8_t id = 0;
    double zmin = 0.0;
    double zmax = 0.0;
  };
  std::vector<CamShape> visible;
  visible.reserve(shapes_.size());
  for (auto const& sh : shapes_) {
    CamShape cs;
    cs.center = to_cam(sh.center);
    cs.zmin = cs.center.y - sh.reach;
    cs.zmax = cs.center.y + sh.reach;
    if (cs.zmax <= 0.0) continue;
    cs.id = to_id(sh.cls);
    cs.radius = sh.radius;
    for (auto const& p : sh.ring) cs.ring.push_back(to_cam(p));
    visible.push_back(std::move(cs));
  }

  double const h = cam.mount_height_m;
  std::vector<std::pair<double, double>> spans;
  int const v0 = std::max(0, static_cast<int>(std::floor(cam.cy_px)) + 1);
  for (int v = v0; v < cam.height_px; ++v) {
    double const z = h * cam.fy_px / (v - cam.cy_px);
    auto mask_row = out.mask.row(v);
    auto depth_row = out.depth.row(v);
    std::fill(mask_row.begin(), mask_row.end(), to_id(ClassId::terrain));
    std::fill(depth_row.begin(), depth_row.end(), static_cast<float>(z));
    for (auto const& cs : visible) {
      if (z < cs.zmin || z > cs.zmax) continue;
      spans.clear();
      if (cs.ring.empty()) {
        double const dz = z - cs.center.y;
        double const s2 = cs.radius * cs.radius - dz * dz;
        if (s2 > 0) spans.emplace_back(cs.center.x - std::sqrt(s2), cs.center.x + std::sqrt(s2));
      } else {
        polygon_intervals(cs.ring, z, spans);
      }
      for (auto [x0, x1] : spans) {
        double const u0 = std::ceil(cam.cx_px + cam.fx_px * x0 / z);
        double const u1 = std::floor(cam.cx_px + cam.fx_px * x1 / z);
        int const a = static_cast<int>(std::max(u0, 0.0));
        int const b = static_cast<int>(std::min(u1, cam.width_px - 1.0));
        if (a <= b) std::fill(mask_row.begin() + a, mask_row.begin() + b + 1, cs.id);
      }
    }
  }

  // Billboards, farthest first so nearer ones overwrite.
  struct Board {
    Vec2 p;
    SceneObject const* obj;
  };
  std::vector<Board> boards;
  for (auto const& o : scene_->objects) {
    Vec2 const p = to_cam(o.at);
    if (p.y < 0.5 || p.y > scene_->max_range_m) continue;
    boards.push_back({p, &o});
  }
  std::stable_sort(boards.begin(), boards.end(), [](Board const& a, Board const& b) { return a.p.y > b.p.y; });
  for (auto const& bd : boards) {
    double const z = bd.p.y;
    double const u0 = std::ceil(cam.cx_px + cam.fx_px * (bd.p.x - bd.obj->radius_m) / z);
    double const u1 = std::floor(cam.cx_px + cam.fx_px * (bd.p.x + bd.obj->radius_m) / z);
    double const w0 = std::ceil(cam.cy_px + cam.fy_px * (h - bd.obj->height_m) / z);
    double const w1 = std::floor(cam.cy_px + cam.fy_px * h / z);
    int const ua = static_cast<int>(std::max(u0, 0.0));
    int const ub = static_cast<int>(std::min(u1, cam.width_px - 1.0));
    int const va = static_cast<int>(std::max(w0, 0.0));
    int const vb = static_cast<int>(std::min(w1, cam.height_px - 1.0));
    if (ua > ub || va > vb) continue;
    auto const id = to_id(bd.obj->cls);
    for (int v = va; v <= vb; ++v) {
      auto mr = out.mask.row(v);
      auto dr = out.depth.row(v);
      std::fill(mr.begin() + ua, mr.begin() + ub + 1, id);
      std::fill(dr.begin() + ua, dr.begin() + ub + 1, static_cast<float>(z));
    }
  }

  auto const& noise = scene_->noise;
  if (noise.depth_rel_sigma > 0.0 || noise.dropout_prob > 0.0) {
    std::mt19937_64 rng{noise_seed};
    std::normal_distribution<double> gauss{0.0, noise.depth_rel_sigma > 0 ? noise.depth_rel_sigma : 1.0};
    std::bernoulli_distribution drop{noise.dropout_prob};
    for (auto& d : out.depth.data()) {
      if (!std::isfinite(d)) continue;
      if (noise.dropout_prob > 0.0 && drop(rng)) {
        d = std::numeric_limits<float>::quiet_NaN();
      } else if (noise.depth_rel_sigma > 0.0) {
        d = static_cast<float>(d * std::max(0.0, 1.0 + gauss(rng)));
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

Survey::Survey(SceneSpec const& scene, CameraModel camera, double frame_rate_hz, std::uint64_t seed)
    : scene_{&scene}, camera_{camera}, seed_{seed} {
  validate_scene(scene);
  camera_.validate();
  if (!(frame_rate_hz > 0.0)) throw ValidationError("frame rate must be positive");
  arc_.push_back(0.0);
  for (std::size_t i = 1; i < scene.trajectory.size(); ++i) {
    arc_.push_back(arc_.back() + norm(scene.trajectory[i] - scene.trajectory[i - 1]));
  }
  length_m_ = arc_.back();

  double const duration = length_m_ / scene.speed_mps;
  auto const count = static_cast<std::size_t>(std::floor(duration * frame_rate_hz + 1e-9)) + 1;
  std::mt19937_64 rng{seed};
  std::normal_distribution<double> unit{0.0, 1.0};

  double const t_last = static_cast<double>(count - 1) / frame_rate_hz;
  for (std::size_t k = 0;; ++k) {
    double const t = static_cast<double>(k) * kFixIntervalS;
    if (t > t_last + kFixIntervalS + 1e-9) break;
    auto p = pose_at(t * scene.speed_mps);
    LocalOffset loc{p.east_m, p.north_m};
    if (scene.noise.gps_sigma_m > 0.0) {
      loc.east_m += scene.noise.gps_sigma_m * unit(rng);
      loc.north_m += scene.noise.gps_sigma_m * unit(rng);
    }
    auto const g = to_geo(loc);
    fixes_.push_back({t, g.lat_deg, g.lon_deg, 2.0 * scene.noise.gps_sigma_m});
  }

  frames_.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    double const t = static_cast<double>(i) / frame_rate_hz;
    SurveyFrame fr;
    fr.frame_id = static_cast<std::int64_t>(i);
    fr.timestamp_s = t;
    fr.true_pose = pose_at(t * scene.speed_mps);
    double hd = fr.true_pose.heading_deg;
    if (scene.noise.heading_sigma_deg > 0.0) hd += scene.noise.heading_sigma_deg * unit(rng);
    fr.recorded_heading_deg = normalize_heading(hd);
    frames_.push_back(fr);
  }
}

PlanarPose Survey::pose_at(double s) const {
  auto const& tr = scene_->trajectory;
  std::size_t seg = 0;
  while (seg + 2 < tr.size() && arc_[seg + 1] <= s) ++seg;
  Vec2 const d = tr[seg + 1] - tr[seg];
  double const len = norm(d);
  double const along = s - arc_[seg];
  PlanarPose p;
  p.east_m = tr[seg].east_m + d.x / len * along;
  p.north_m = tr[seg].north_m + d.y / len * along;
  p.heading_deg = normalize_heading(std::atan2(d.x, d.y) / kDeg);
  return p;
}

GeoPoint Survey::to_geo(LocalOffset p) const { return from_local(scene_->origin, p); }

Homography Survey::homography_to_next(std::size_t i) const {
  return ground_plane_homography(camera_, frames_.at(i).true_pose, frames_.at(i + 1).true_pose);
}

SyntheticFrameSource::SyntheticFrameSource(SceneSpec scene, CameraModel camera, double frame_rate_hz,
                                           std::uint64_t seed)
    : scene_{std::move(scene)}, survey_{scene_, camera, frame_rate_hz, seed}, renderer_{scene_, camera} {}

std::optional<FrameRecord> SyntheticFrameSource::next() {
  auto const frames = survey_.frames();
  if (cursor_ >= frames.size()) return std::nullopt;
  std::size_t const i = cursor_++;
  auto const& f = frames[i];
  auto rendered = renderer_.render(f.true_pose, survey_.seed() * 1000003ULL + static_cast<std::uint64_t>(i));
  FrameRecord r;
  r.frame_id = f.frame_id;
  r.timestamp_s = f.timestamp_s;
  r.mask = std::move(rendered.mask);
  r.depth = std::move(rendered.depth);
  r.pose = sync_pose(f.timestamp_s, survey_.fixes(), f.recorded_heading_deg);
  if (i + 1 < frames.size()) r.homography_to_next = survey_.homography_to_next(i);
  if (i > 0) r.homography_from_prev = survey_.homography_to_next(i - 1);
  return r;
}

GroundTruth ground_truth(SceneSpec const& scene) {
  validate_scene(scene);
  GroundTruth gt;
  auto node_for = [&](LocalOffset p) {
    auto const g = from_local(scene.origin, p);
    for (auto const& n : gt.graph.nodes) {
      if (haversine_distance(n.location, g) <= 0.01) return n.node_id;
    }
    auto const id = static_cast<std::int64_t>(gt.graph.nodes.size()) + 1;
    gt.graph.nodes.push_back({id, g});
    return id;
  };
  for (auto const& p : scene.paths) {
    PathEdge e;
    e.edge_id = static_cast<std::int64_t>(gt.graph.edges.size()) + 1;
    e.from = node_for(p.points.front());
    e.to = node_for(p.points.back());
    for (auto const& q : p.points) e.polyline.push_back(from_local(scene.origin, q));
    e.polyline.front() = gt.graph.node(e.from)->location;
    e.polyline.back() = gt.graph.node(e.to)->location;
    e.width_m = *std::min_element(p.widths.begin(), p.widths.end());
    e.kind = p.kind;
    gt.graph.edges.push_back(std::move(e));
  }
  for (auto const& o : scene.objects) {
    gt.objects.push_back({o.id, o.cls, from_local(scene.origin, o.at), 0});
  }
  return gt;
}

std::filesystem::path generate_dataset(SceneSpec const& scene, CameraModel const& camera,
                                       double frame_rate_hz, std::filesystem::path const& out_dir,
                                       std::uint64_t seed) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir / "frames", ec);
  if (ec) throw IoError("cannot create output directory: " + ec.message(), (out_dir / "frames").string());

  Survey const survey{scene, camera, frame_rate_hz, seed};
  SceneRenderer const renderer{scene, camera};
  Manifest m;
  m.camera = camera;
  m.track.assign(survey.fixes().begin(), survey.fixes().end());
  auto const frames = survey.frames();
  for (std::size_t i = 0; i < frames.size(); ++i) {
    auto const& f = frames[i];
    char stem[32];
    std::snprintf(stem, sizeof stem, "%06lld", static_cast<long long>(f.frame_id));
    FrameDescriptor d;
    d.frame_id = f.frame_id;
    d.timestamp_s = f.timestamp_s;
    d.mask_path = out_dir / "frames" / (std::string{stem} + "_mask.pgm");
    d.depth_path = out_dir / "frames" / (std::string{stem} + "_depth.pfm");
    d.heading_deg = f.recorded_heading_deg;
    if (i + 1 < frames.size()) d.homography_to_next = survey.homography_to_next(i);
    auto const rendered = renderer.render(f.true_pose, seed * 1000003ULL + static_cast<std::uint64_t>(i));
    write_pgm(d.mask_path, rendered.mask);
    write_pfm(d.depth_path, rendered.depth);
    m.frames.push_back(std::move(d));
  }

  auto const manifest_path = out_dir / "manifest.jsonl";
  {
    std::ofstream out{manifest_path};
    if (!out) throw IoError("cannot write manifest", manifest_path.string());
    write_manifest(out, m, out_dir);
    if (!out) throw IoError("failed writing manifest", manifest_path.string());
  }

  auto const gt = ground_truth(scene);
  json meta{{"scene", scene.name}, {"seed", seed}, {"frame_rate_hz", frame_rate_hz}};
  auto const truth_path = out_dir / "truth.geojson";
  {
    std::ofstream out{truth_path};
    if (!out) throw IoError("cannot write truth", truth_path.string());
    out << to_geojson(gt.graph, gt.objects, 0.9, meta).dump(2) << '\n';
    if (!out) throw IoError("failed writing truth", truth_path.string());
  }
  auto const scene_path = out_dir / "scene.json";
  {
    std::ofstream out{scene_path};
    if (!out) throw IoError("cannot write scene", scene_path.string());
    out << scene_to_json(scene).dump(2) << '\n';
  }
  return manifest_path;
}

}  // namespace oasis
