#pragma once

#include <cassert>
#include <cstdint>
#include <span>
#include <vector>

namespace oasis {

/// Row-major single-channel image.
template <typename T>
class Raster {
 public:
  Raster() = default;
  Raster(int width, int height, T fill = T{})
      : width_{width},
        height_{height},
        data_(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill) {
    assert(width >= 0 && height >= 0);
  }

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  T& operator()(int u, int v) { return data_[index(u, v)]; }
  T const& operator()(int u, int v) const { return data_[index(u, v)]; }

  std::size_t index(int u, int v) const noexcept {
    assert(u >= 0 && u < width_ && v >= 0 && v < height_);
    return static_cast<std::size_t>(v) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(u);
  }

  std::span<T> row(int v) {
    return {data_.data() + static_cast<std::size_t>(v) * width_, static_cast<std::size_t>(width_)};
  }
  std::span<T const> row(int v) const {
    return {data_.data() + static_cast<std::size_t>(v) * width_, static_cast<std::size_t>(width_)};
  }

  std::span<T> data() noexcept { return data_; }
  std::span<T const> data() const noexcept { return data_; }

  bool same_shape(Raster<auto> const& other) const noexcept {
    return width_ == other.width() && height_ == other.height();
  }

  friend bool operator==(Raster const&, Raster const&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<T> data_;
};

/// Per-pixel class IDs.
using SegMask = Raster<std::uint8_t>;

/// Forward-axis depth in meters; non-finite samples are invalid.
using DepthMap = Raster<float>;

struct Pixel {
  int u = 0;
  int v = 0;
  friend bool operator==(Pixel, Pixel) = default;
};

}  // namespace oasis
