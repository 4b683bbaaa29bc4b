#pragma once

#include <filesystem>

#include "oasis/raster.hpp"

namespace oasis {

/// Binary portable graymap (P5, maxval <= 255). Pixel value = class ID.
SegMask read_pgm(std::filesystem::path const& path);
void write_pgm(std::filesystem::path const& path, SegMask const& mask);

/// Single-channel portable float map ("Pf"). Rows are stored bottom-to-top
/// as the format requires; a negative scale marks little-endian samples.
DepthMap read_pfm(std::filesystem::path const& path);
void write_pfm(std::filesystem::path const& path, DepthMap const& depth);

}  // namespace oasis
