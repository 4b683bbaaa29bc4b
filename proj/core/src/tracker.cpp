#include "oasis/tracker.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <tuple>

#include "oasis/errors.hpp"

namespace oasis {

std::vector<Detection> extract_detections(SegMask const& mask, std::span<ClassId const> classes,
                                          std::size_t min_region_px) {
  std::array<bool, 256> wanted{};
  for (auto const c : classes) wanted[to_id(c)] = true;

  int const w = mask.width();
  int const h = mask.height();
  auto const data = mask.data();
  std::vector<std::uint8_t> seen(data.size(), 0);
  std::vector<std::size_t> stack;
  std::vector<Detection> out;

  for (std::size_t start = 0; start < data.size(); ++start) {
    auto const label = data[start];
    if (!wanted[label] || seen[start]) continue;

    Detection d;
    d.cls = static_cast<ClassId>(label);
    double sum_u = 0.0;
    double sum_v = 0.0;
    seen[start] = 1;
    stack.push_back(start);
    while (!stack.empty()) {
      auto const idx = stack.back();
      stack.pop_back();
      d.pixels.push_back(idx);
      int const u = static_cast<int>(idx % static_cast<std::size_t>(w));
      int const v = static_cast<int>(idx / static_cast<std::size_t>(w));
      sum_u += u;
      sum_v += v;
      if (u == 0 || u == w - 1) d.touches_side = true;
      auto visit = [&](std::size_t n) {
        if (!seen[n] && data[n] == label) {
          seen[n] = 1;
          stack.push_back(n);
        }
      };
      if (u > 0) visit(idx - 1);
      if (u + 1 < w) visit(idx + 1);
      if (v > 0) visit(idx - static_cast<std::size_t>(w));
      if (v + 1 < h) visit(idx + static_cast<std::size_t>(w));
    }
    if (d.pixels.size() < min_region_px) continue;
    std::ranges::sort(d.pixels);
    d.pixel_count = d.pixels.size();
    d.centroid = {sum_u / static_cast<double>(d.pixel_count), sum_v / static_cast<double>(d.pixel_count)};
    out.push_back(std::move(d));
  }
  return out;
}

std::optional<RangeMeasurement> measure_detection(Detection const& detection, SegMask const& raw,
                                                  DepthMap const& depth, double min_valid_fraction) {
  if (detection.touches_side) return std::nullopt;
  auto const labels = raw.data();
  auto const id = to_id(detection.cls);
  std::vector<std::size_t> own;
  own.reserve(detection.pixels.size());
  double sum_u = 0.0;
  auto const w = static_cast<std::size_t>(raw.width());
  for (auto const idx : detection.pixels) {
    if (labels[idx] != id) continue;
    own.push_back(idx);
    sum_u += static_cast<double>(idx % w);
  }
  if (own.empty()) return std::nullopt;
  try {
    return RangeMeasurement{sum_u / static_cast<double>(own.size()),
                            mean_depth(own, depth, min_valid_fraction)};
  } catch (InsufficientDepthError const&) {
    return std::nullopt;
  }
}

MatchResult match_detections(std::span<LiveCentroid const> existing,
                             std::span<Detection const> fresh, double max_match_px) {
  struct Candidate {
    double dist;
    std::int64_t object_id;
    std::size_t existing_index;
    std::size_t fresh_index;
  };
  std::vector<Candidate> candidates;
  for (std::size_t i = 0; i < existing.size(); ++i) {
    for (std::size_t j = 0; j < fresh.size(); ++j) {
      if (existing[i].cls != fresh[j].cls) continue;
      double const d = std::hypot(existing[i].centroid.u - fresh[j].centroid.u,
                                  existing[i].centroid.v - fresh[j].centroid.v);
      if (d <= max_match_px) candidates.push_back({d, existing[i].object_id, i, j});
    }
  }
  std::ranges::sort(candidates, [](Candidate const& a, Candidate const& b) {
    return std::tie(a.dist, a.object_id, a.fresh_index) < std::tie(b.dist, b.object_id, b.fresh_index);
  });

  std::vector<bool> used_existing(existing.size(), false);
  std::vector<bool> used_fresh(fresh.size(), false);
  MatchResult r;
  for (auto const& c : candidates) {
    if (used_existing[c.existing_index] || used_fresh[c.fresh_index]) continue;
    used_existing[c.existing_index] = true;
    used_fresh[c.fresh_index] = true;
    r.matches.emplace_back(c.object_id, c.fresh_index);
  }
  for (std::size_t i = 0; i < existing.size(); ++i) {
    if (!used_existing[i]) r.unmatched_existing.push_back(existing[i].object_id);
  }
  for (std::size_t j = 0; j < fresh.size(); ++j) {
    if (!used_fresh[j]) r.unmatched_fresh.push_back(j);
  }
  return r;
}

Tracker::Tracker(TrackerConfig config, CameraModel camera) : config_{config}, camera_{camera} {
  if (config_.lost_threshold < 0) throw ValidationError("lost_threshold must be >= 0");
  if (!(config_.max_match_px > 0.0)) throw ValidationError("max_match_px must be > 0");
}

std::vector<TrackedObject> Tracker::step(std::int64_t frame_id, std::span<Detection const> fresh,
                                         std::optional<Homography> const& prev_to_current,
                                         Pose const& pose,
                                         std::span<std::optional<RangeMeasurement> const> measurements) {
  if (!measurements.empty() && measurements.size() != fresh.size()) {
    throw ValidationError("tracker: measurements must be parallel to detections");
  }
  if (prev_to_current) {
    for (auto& obj : live_) obj.centroid = warp_centroid(*prev_to_current, obj.centroid);
  }

  std::vector<LiveCentroid> existing;
  existing.reserve(live_.size());
  for (auto const& obj : live_) existing.push_back({obj.object_id, obj.cls, obj.centroid});
  auto const result = match_detections(existing, fresh, config_.max_match_px);

  auto observe = [&](TrackedObject& obj, std::size_t j) {
    obj.centroid = fresh[j].centroid;
    if (measurements.empty() || !measurements[j]) return;
    auto const& m = *measurements[j];
    obj.observations.push_back(
        {frame_id, locate_object(pose, m.centroid_u, m.depth_m, camera_, config_.earth_radius_m)});
  };

  auto find_live = [&](std::int64_t id) -> TrackedObject& {
    // live_ is ordered by object_id.
    auto it = std::ranges::lower_bound(live_, id, {}, &TrackedObject::object_id);
    return *it;
  };

  for (auto const& [id, j] : result.matches) {
    auto& obj = find_live(id);
    obj.state = TrackState::active;
    obj.lost_frames = 0;
    observe(obj, j);
  }
  for (auto const id : result.unmatched_existing) {
    auto& obj = find_live(id);
    ++obj.lost_frames;
    obj.state = obj.lost_frames > config_.lost_threshold ? TrackState::permanently_lost
                                                         : TrackState::temporarily_lost;
  }

  std::vector<TrackedObject> newly_lost;
  std::erase_if(live_, [&](TrackedObject& obj) {
    if (obj.state != TrackState::permanently_lost) return false;
    newly_lost.push_back(obj);
    retired_.push_back(std::move(obj));
    return true;
  });

  for (auto const j : result.unmatched_fresh) {
    TrackedObject obj;
    obj.object_id = next_id_++;
    obj.cls = fresh[j].cls;
    obj.state = TrackState::active;
    live_.push_back(std::move(obj));
    observe(live_.back(), j);
  }
  return newly_lost;
}

std::vector<TrackedObject> Tracker::all_objects() const {
  std::vector<TrackedObject> all;
  all.reserve(live_.size() + retired_.size());
  all.insert(all.end(), retired_.begin(), retired_.end());
  all.insert(all.end(), live_.begin(), live_.end());
  std::ranges::sort(all, {}, &TrackedObject::object_id);
  return all;
}

namespace {

double median(std::vector<double> v) {
  auto const n = v.size();
  auto const mid = v.begin() + static_cast<std::ptrdiff_t>(n / 2);
  std::nth_element(v.begin(), mid, v.end());
  double const upper = *mid;
  if (n % 2 == 1) return upper;
  double const lower = *std::max_element(v.begin(), mid);
  return (lower + upper) / 2.0;
}

}  // namespace

std::vector<LocatedObject> finalize_locations(std::span<TrackedObject const> objects,
                                              std::size_t min_observations) {
  std::vector<LocatedObject> out;
  for (auto const& obj : objects) {
    auto const n = obj.observations.size();
    if (n == 0 || n < min_observations) continue;
    std::vector<double> lats;
    std::vector<double> lons;
    lats.reserve(n);
    lons.reserve(n);
    for (auto const& o : obj.observations) {
      lats.push_back(o.location.lat_deg);
      lons.push_back(o.location.lon_deg);
    }
    out.push_back({obj.object_id, obj.cls, {median(std::move(lats)), median(std::move(lons))}, n});
  }
  std::ranges::sort(out, {}, &LocatedObject::object_id);
  return out;
}

}  // namespace oasis
