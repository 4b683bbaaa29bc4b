#include "oasis/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "oasis/errors.hpp"
#include "oasis/raster_io.hpp"
#include "oasis/taxonomy.hpp"

namespace oasis {

namespace {

using nlohmann::json;

double number_field(json const& obj, char const* key, std::size_t line) {
  auto const it = obj.find(key);
  if (it == obj.end()) throw ParseError(std::string{"missing field '"} + key + "'", line);
  if (!it->is_number()) throw ParseError(std::string{"field '"} + key + "' must be a number", line);
  double const v = it->get<double>();
  if (!std::isfinite(v)) throw ValidationError("line " + std::to_string(line) + ": field '" + key + "' must be finite");
  return v;
}

std::optional<double> optional_number(json const& obj, char const* key, std::size_t line) {
  if (!obj.contains(key) || obj.at(key).is_null()) return std::nullopt;
  return number_field(obj, key, line);
}

std::string string_field(json const& obj, char const* key, std::size_t line) {
  auto const it = obj.find(key);
  if (it == obj.end()) throw ParseError(std::string{"missing field '"} + key + "'", line);
  if (!it->is_string()) throw ParseError(std::string{"field '"} + key + "' must be a string", line);
  return it->get<std::string>();
}

void require(bool ok, std::size_t line, std::string const& what) {
  if (!ok) throw ValidationError("line " + std::to_string(line) + ": " + what);
}

CameraModel parse_camera(json const& obj, std::size_t line) {
  auto const w = number_field(obj, "width_px", line);
  auto const h = number_field(obj, "height_px", line);
  require(w == std::floor(w) && h == std::floor(h), line, "camera dimensions must be integers");
  try {
    return CameraModel::make(static_cast<int>(w), static_cast<int>(h),
                             number_field(obj, "hfov_deg", line), number_field(obj, "vfov_deg", line),
                             number_field(obj, "mount_height_m", line),
                             optional_number(obj, "fx_px", line), optional_number(obj, "cx_px", line));
  } catch (ValidationError const& e) {
    throw ValidationError("line " + std::to_string(line) + ": " + e.what());
  }
}

std::filesystem::path resolve(std::filesystem::path const& base, std::string const& p) {
  std::filesystem::path path{p};
  return path.is_absolute() || base.empty() ? path : base / path;
}

FrameDescriptor parse_frame(json const& obj, std::size_t line, std::filesystem::path const& base) {
  FrameDescriptor d;
  auto const id = number_field(obj, "frame_id", line);
  require(id == std::floor(id), line, "frame_id must be an integer");
  d.frame_id = static_cast<std::int64_t>(id);
  d.timestamp_s = number_field(obj, "timestamp_s", line);
  d.mask_path = resolve(base, string_field(obj, "mask_path", line));
  d.depth_path = resolve(base, string_field(obj, "depth_path", line));
  d.heading_deg = optional_number(obj, "heading_deg", line);
  if (d.heading_deg) d.heading_deg = normalize_heading(*d.heading_deg);
  if (obj.contains("homography_to_next") && !obj.at("homography_to_next").is_null()) {
    auto const& arr = obj.at("homography_to_next");
    if (!arr.is_array() || arr.size() != 9) {
      throw ParseError("homography_to_next must be an array of 9 numbers", line);
    }
    std::array<double, 9> m{};
    for (std::size_t i = 0; i < 9; ++i) {
      if (!arr[i].is_number()) throw ParseError("homography_to_next must be an array of 9 numbers", line);
      m[i] = arr[i].get<double>();
    }
    d.homography_to_next = Homography::from_row_major(m);
  }
  return d;
}

GpsFix parse_fix(json const& obj, std::size_t line) {
  GpsFix f;
  f.timestamp_s = number_field(obj, "timestamp_s", line);
  f.lat_deg = number_field(obj, "lat_deg", line);
  f.lon_deg = number_field(obj, "lon_deg", line);
  f.accuracy_m = number_field(obj, "accuracy_m", line);
  require(f.lat_deg >= -90.0 && f.lat_deg <= 90.0, line, "lat_deg out of range [-90, 90]");
  require(f.lon_deg >= -180.0 && f.lon_deg <= 180.0, line, "lon_deg out of range [-180, 180]");
  require(f.accuracy_m >= 0.0, line, "accuracy_m must be >= 0");
  return f;
}

}  // namespace

Manifest parse_manifest(std::istream& in, std::filesystem::path const& base_dir) {
  Manifest m;
  m.camera = CameraModel::survey_default();
  bool have_camera = false;
  std::string text;
  std::size_t line_no = 0;
  while (std::getline(in, text)) {
    ++line_no;
    if (std::all_of(text.begin(), text.end(), [](unsigned char c) { return std::isspace(c); })) continue;
    json obj;
    try {
      obj = json::parse(text);
    } catch (json::parse_error const& e) {
      throw ParseError(std::string{"malformed record: "} + e.what(), line_no);
    }
    if (!obj.is_object()) throw ParseError("record must be an object", line_no);

    if (!have_camera) {
      if (!obj.contains("width_px")) {
        throw ValidationError("line " + std::to_string(line_no) +
                              ": missing camera block (first record must describe the camera)");
      }
      m.camera = parse_camera(obj, line_no);
      have_camera = true;
      continue;
    }
    if (obj.contains("frame_id")) {
      auto d = parse_frame(obj, line_no, base_dir);
      if (!m.frames.empty()) {
        require(d.timestamp_s > m.frames.back().timestamp_s, line_no,
                "frame timestamps must be strictly increasing");
        require(d.frame_id > m.frames.back().frame_id, line_no,
                "frame_id must be strictly increasing");
      }
      m.frames.push_back(std::move(d));
    } else if (obj.contains("lat_deg")) {
      auto f = parse_fix(obj, line_no);
      if (!m.track.empty()) {
        require(f.timestamp_s > m.track.back().timestamp_s, line_no,
                "fix timestamps must be strictly increasing");
      }
      m.track.push_back(f);
    } else if (obj.contains("width_px")) {
      throw ValidationError("line " + std::to_string(line_no) + ": duplicate camera block");
    } else {
      throw ParseError("record is neither a frame nor a GPS fix", line_no);
    }
  }
  return m;
}

Manifest load_manifest(std::filesystem::path const& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open manifest", path.string());
  return parse_manifest(in, path.parent_path());
}

void write_manifest(std::ostream& out, Manifest const& manifest,
                    std::filesystem::path const& base_dir) {
  using ojson = nlohmann::ordered_json;
  auto rel = [&](std::filesystem::path const& p) {
    if (base_dir.empty()) return p.generic_string();
    return p.lexically_relative(base_dir).generic_string();
  };
  auto const& c = manifest.camera;
  ojson cam{{"width_px", c.width_px},   {"height_px", c.height_px}, {"hfov_deg", c.hfov_deg},
            {"vfov_deg", c.vfov_deg},   {"fx_px", c.fx_px},         {"cx_px", c.cx_px},
            {"mount_height_m", c.mount_height_m}};
  out << cam.dump() << '\n';

  // Frames and fixes interleaved by timestamp so the file reads as a log.
  std::size_t fi = 0;
  std::size_t gi = 0;
  while (fi < manifest.frames.size() || gi < manifest.track.size()) {
    bool const take_fix = gi < manifest.track.size() &&
                          (fi == manifest.frames.size() ||
                           manifest.track[gi].timestamp_s <= manifest.frames[fi].timestamp_s);
    if (take_fix) {
      auto const& f = manifest.track[gi++];
      ojson j{{"timestamp_s", f.timestamp_s}, {"lat_deg", f.lat_deg}, {"lon_deg", f.lon_deg},
              {"accuracy_m", f.accuracy_m}};
      out << j.dump() << '\n';
    } else {
      auto const& d = manifest.frames[fi++];
      ojson j{{"frame_id", d.frame_id},
              {"timestamp_s", d.timestamp_s},
              {"mask_path", rel(d.mask_path)},
              {"depth_path", rel(d.depth_path)}};
      if (d.heading_deg) j["heading_deg"] = *d.heading_deg;
      if (d.homography_to_next) j["homography_to_next"] = d.homography_to_next->row_major();
      out << j.dump() << '\n';
    }
  }
}

SegMask read_mask(std::filesystem::path const& path, std::optional<CameraModel> const& camera) {
  auto mask = read_pgm(path);
  if (camera && (mask.width() != camera->width_px || mask.height() != camera->height_px)) {
    throw ValidationError("mask " + path.string() + " is " + std::to_string(mask.width()) + "x" +
                          std::to_string(mask.height()) + ", camera is " +
                          std::to_string(camera->width_px) + "x" + std::to_string(camera->height_px));
  }
  try {
    validate_mask(mask);
  } catch (ValidationError const& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
  return mask;
}

DepthMap read_depth(std::filesystem::path const& path, std::optional<CameraModel> const& camera) {
  auto depth = read_pfm(path);
  if (camera && (depth.width() != camera->width_px || depth.height() != camera->height_px)) {
    throw ValidationError("depth " + path.string() + " is " + std::to_string(depth.width()) + "x" +
                          std::to_string(depth.height()) + ", camera is " +
                          std::to_string(camera->width_px) + "x" + std::to_string(camera->height_px));
  }
  for (auto& d : depth.data()) {
    if (!(d > 0.0f) || !std::isfinite(d)) d = std::numeric_limits<float>::quiet_NaN();
  }
  return depth;
}

Pose sync_pose(double timestamp_s, std::span<GpsFix const> track,
               std::optional<double> heading_deg, double max_fix_age_s) {
  if (track.size() < 2) throw ValidationError("sync_pose: GPS track needs at least 2 fixes");

  std::vector<double> gaps;
  gaps.reserve(track.size() - 1);
  for (std::size_t i = 1; i < track.size(); ++i) gaps.push_back(track[i].timestamp_s - track[i - 1].timestamp_s);
  std::nth_element(gaps.begin(), gaps.begin() + gaps.size() / 2, gaps.end());
  double const interval = gaps[gaps.size() / 2];

  double const t0 = track.front().timestamp_s;
  double const tn = track.back().timestamp_s;
  if (timestamp_s < t0 - interval || timestamp_s > tn + interval) {
    throw OutOfTrackError("timestamp " + std::to_string(timestamp_s) + " s is outside the GPS track [" +
                          std::to_string(t0) + ", " + std::to_string(tn) + "]");
  }

  auto const it = std::upper_bound(track.begin(), track.end(), timestamp_s,
                                   [](double t, GpsFix const& f) { return t < f.timestamp_s; });
  std::size_t i = it == track.begin() ? 0 : static_cast<std::size_t>(it - track.begin()) - 1;
  i = std::min(i, track.size() - 2);
  auto const& a = track[i];
  auto const& b = track[i + 1];

  if (timestamp_s >= a.timestamp_s && timestamp_s <= b.timestamp_s &&
      (timestamp_s - a.timestamp_s > max_fix_age_s || b.timestamp_s - timestamp_s > max_fix_age_s)) {
    throw OutOfTrackError("no GPS fix within " + std::to_string(max_fix_age_s) + " s of " +
                          std::to_string(timestamp_s) + " s");
  }

  double const frac = (timestamp_s - a.timestamp_s) / (b.timestamp_s - a.timestamp_s);
  double const dlon = normalize_lon(b.lon_deg - a.lon_deg);
  Pose pose;
  pose.timestamp_s = timestamp_s;
  pose.position = {a.lat_deg + frac * (b.lat_deg - a.lat_deg), normalize_lon(a.lon_deg + frac * dlon)};

  if (heading_deg) {
    pose.heading_deg = normalize_heading(*heading_deg);
  } else {
    // Stationary fixes carry no direction; widen the pair until they differ.
    constexpr double kMinSeparationM = 1e-3;
    std::size_t lo = i;
    std::size_t hi = i + 1;
    while (haversine_distance(track[lo].position(), track[hi].position()) < kMinSeparationM) {
      if (hi + 1 < track.size()) {
        ++hi;
      } else if (lo > 0) {
        --lo;
      } else {
        break;
      }
    }
    pose.heading_deg = initial_bearing(track[lo].position(), track[hi].position());
  }
  return pose;
}

ManifestFrameSource::ManifestFrameSource(Manifest manifest, WarningSink warn)
    : manifest_{std::move(manifest)}, warn_{std::move(warn)} {
  if (!warn_) warn_ = [](std::string_view msg) { std::cerr << "warning: " << msg << '\n'; };
}

std::optional<FrameRecord> ManifestFrameSource::next() {
  while (cursor_ < manifest_.frames.size()) {
    auto const& d = manifest_.frames[cursor_++];
    Pose pose;
    try {
      pose = sync_pose(d.timestamp_s, manifest_.track, d.heading_deg);
    } catch (Error const& e) {
      ++dropped_;
      warn_("dropping frame " + std::to_string(d.frame_id) + ": " + e.what());
      if (pending_ && d.homography_to_next) {
        pending_ = *d.homography_to_next * *pending_;
      } else {
        pending_.reset();
      }
      continue;
    }
    FrameRecord r;
    r.frame_id = d.frame_id;
    r.timestamp_s = d.timestamp_s;
    r.mask = read_mask(d.mask_path, manifest_.camera);
    r.depth = read_depth(d.depth_path, manifest_.camera);
    r.pose = pose;
    r.homography_to_next = d.homography_to_next;
    r.homography_from_prev = pending_;
    pending_ = d.homography_to_next;
    return r;
  }
  return std::nullopt;
}

}  // namespace oasis
