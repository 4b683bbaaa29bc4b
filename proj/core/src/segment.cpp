#include "oasis/segment.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "oasis/errors.hpp"

namespace oasis {

namespace {

std::array<std::int16_t, 256> rank_table(std::span<ClassId const> classes) {
  std::array<std::int16_t, 256> rank{};
  rank.fill(-1);
  for (std::size_t i = 0; i < classes.size(); ++i) {
    auto const id = to_id(classes[i]);
    if (!is_valid_class_id(id)) throw ValidationError("temporal_union: unknown class in fusion set");
    rank[id] = static_cast<std::int16_t>(i);
  }
  return rank;
}

}  // namespace

SegMask temporal_union(std::span<WindowFrame const> window, std::span<ClassId const> classes) {
  if (window.empty()) throw ValidationError("temporal_union: empty window");
  SegMask const& last = window.back().mask.get();
  for (auto const& f : window) {
    if (!f.mask.get().same_shape(last)) throw ValidationError("temporal_union: mask dimensions differ");
  }
  auto const rank = rank_table(classes);
  int const w = last.width();
  int const h = last.height();

  std::vector<std::int16_t> best(last.size());
  {
    auto const src = last.data();
    for (std::size_t i = 0; i < src.size(); ++i) best[i] = rank[src[i]];
  }

  for (std::size_t j = 0; j + 1 < window.size(); ++j) {
    auto const& f = window[j];
    auto const src = f.mask.get().data();
    if (!f.to_last) {
      for (std::size_t i = 0; i < src.size(); ++i) best[i] = std::max(best[i], rank[src[i]]);
      continue;
    }
    // Inverse mapping: for every output pixel find its source pixel.
    auto const inv = f.to_last->inverse().matrix();
    double const dx = inv(0, 0);
    double const dy = inv(1, 0);
    double const dz = inv(2, 0);
    double const fw = w;
    double const fh = h;
    for (int v = 0; v < h; ++v) {
      double x = inv(0, 1) * v + inv(0, 2);
      double y = inv(1, 1) * v + inv(1, 2);
      double z = inv(2, 1) * v + inv(2, 2);
      std::int16_t* out = best.data() + static_cast<std::size_t>(v) * w;
      if (z > 1e-12 && std::abs(dz) * w <= 1e-12 * z && std::abs(dy) * w <= 1e-9 * z) {
        // Homogeneous scale constant along the row: one reciprocal suffices.
        double const iz = 1.0 / z;
        double const sv = y * iz + 0.5;
        if (!(sv >= 0.0 && sv < fh)) continue;
        auto const* srow = src.data() + static_cast<std::size_t>(sv) * w;
        double const step = dx * iz;
        double su = x * iz + 0.5;
        for (int u = 0; u < w; ++u, su += step) {
          if (!(su >= 0.0 && su < fw)) continue;
          auto const r = rank[srow[static_cast<std::size_t>(su)]];
          if (r > out[u]) out[u] = r;
        }
        continue;
      }
      for (int u = 0; u < w; ++u, x += dx, y += dy, z += dz) {
        if (z <= 1e-12) continue;
        double const iz = 1.0 / z;
        // Round to nearest; truncation equals floor once known non-negative.
        double const su = x * iz + 0.5;
        double const sv = y * iz + 0.5;
        if (!(su >= 0.0 && sv >= 0.0 && su < fw && sv < fh)) continue;
        auto const r = rank[src[static_cast<std::size_t>(sv) * w + static_cast<std::size_t>(su)]];
        if (r > out[u]) out[u] = r;
      }
    }
  }

  SegMask fused = last;
  auto out = fused.data();
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (best[i] >= 0) out[i] = to_id(classes[static_cast<std::size_t>(best[i])]);
  }
  return fused;
}

TemporalFuser::TemporalFuser(std::size_t window_length, std::vector<ClassId> classes)
    : window_length_{window_length}, classes_{std::move(classes)} {
  if (window_length_ == 0) throw ValidationError("fusion window length must be >= 1");
}

SegMask TemporalFuser::push(SegMask mask, std::optional<Homography> const& from_prev) {
  for (auto& e : window_) {
    if (e.to_current && from_prev) {
      e.to_current = *from_prev * *e.to_current;
    } else if (from_prev) {
      e.to_current = from_prev;
    }
  }
  window_.push_back({std::move(mask), std::nullopt});
  while (window_.size() > window_length_) window_.pop_front();

  std::vector<WindowFrame> frames;
  frames.reserve(window_.size());
  for (auto const& e : window_) frames.push_back({std::cref(e.mask), e.to_current});
  return temporal_union(frames, classes_);
}

std::vector<ClassMetrics> seg_metrics(SegMask const& pred, SegMask const& truth,
                                      std::span<ClassId const> classes) {
  if (!pred.same_shape(truth)) throw ValidationError("seg_metrics: mask dimensions differ");
  std::array<std::uint64_t, 256> tp{}, fp{}, fn{};
  auto const p = pred.data();
  auto const t = truth.data();
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] == t[i]) {
      ++tp[p[i]];
    } else {
      ++fp[p[i]];
      ++fn[t[i]];
    }
  }
  std::vector<ClassMetrics> out;
  out.reserve(classes.size());
  for (auto const c : classes) {
    auto const id = to_id(c);
    ClassMetrics m{c, tp[id], fp[id], fn[id], {}, {}, {}};
    auto const ratio = [](std::uint64_t num, std::uint64_t den) -> std::optional<double> {
      if (den == 0) return std::nullopt;
      return static_cast<double>(num) / static_cast<double>(den);
    };
    m.iou = ratio(m.tp, m.tp + m.fp + m.fn);
    m.precision = ratio(m.tp, m.tp + m.fp);
    m.recall = ratio(m.tp, m.tp + m.fn);
    out.push_back(m);
  }
  return out;
}

SegMask FileSegmentationProvider::segment(FrameDescriptor const& frame) {
  return read_mask(frame.mask_path, camera_);
}

}  // namespace oasis
