#include "oasis/taxonomy.hpp"

#include <algorithm>
#include <string>

#include "oasis/errors.hpp"

namespace oasis {

namespace {

constexpr std::array<std::string_view, kClassCount> kNames{
    "road",     "sidewalk", "building", "wall",  "fence",      "pole",    "traffic_light",
    "traffic_sign", "vegetation", "terrain", "sky", "person", "rider", "car",
    "truck",    "bus",      "train",    "motorcycle", "bicycle"};

constexpr auto kAll = [] {
  std::array<ClassId, kClassCount> all{};
  for (std::size_t i = 0; i < kClassCount; ++i) all[i] = static_cast<ClassId>(i);
  return all;
}();

}  // namespace

bool is_static_infrastructure(ClassId c) noexcept {
  return std::ranges::find(kStaticInfrastructure, c) != kStaticInfrastructure.end();
}

std::string_view class_name(ClassId c) noexcept {
  auto const i = static_cast<std::size_t>(c);
  return i < kNames.size() ? kNames[i] : std::string_view{"unknown"};
}

std::optional<ClassId> class_from_name(std::string_view name) noexcept {
  for (std::size_t i = 0; i < kNames.size(); ++i) {
    if (kNames[i] == name) return static_cast<ClassId>(i);
  }
  return std::nullopt;
}

std::span<ClassId const> all_classes() noexcept { return kAll; }

void validate_mask(SegMask const& mask) {
  auto const data = mask.data();
  auto const it = std::ranges::find_if(data, [](std::uint8_t v) { return !is_valid_class_id(v); });
  if (it == data.end()) return;
  auto const idx = static_cast<std::size_t>(it - data.begin());
  auto const w = static_cast<std::size_t>(mask.width());
  throw ValidationError("mask pixel (" + std::to_string(idx % w) + ", " +
                        std::to_string(idx / w) + ") has unknown class ID " +
                        std::to_string(static_cast<int>(*it)));
}

}  // namespace oasis
