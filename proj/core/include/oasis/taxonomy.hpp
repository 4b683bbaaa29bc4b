#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>

#include "oasis/raster.hpp"

namespace oasis {

/// Class IDs stored in segmentation masks. Declaration order is the fusion
/// priority order (later classes overwrite earlier ones).
enum class ClassId : std::uint8_t {
  road = 0,
  sidewalk,
  building,
  wall,
  fence,
  pole,
  traffic_light,
  traffic_sign,
  vegetation,
  terrain,
  sky,
  person,
  rider,
  car,
  truck,
  bus,
  train,
  motorcycle,
  bicycle,
};

inline constexpr std::size_t kClassCount = 19;

inline constexpr std::array<ClassId, 4> kStaticInfrastructure{
    ClassId::building, ClassId::pole, ClassId::traffic_light, ClassId::traffic_sign};

/// Classes fused by the temporal union unless configured otherwise.
inline constexpr std::array<ClassId, 5> kDefaultFusedClasses{
    ClassId::sidewalk, ClassId::building, ClassId::pole, ClassId::traffic_light,
    ClassId::traffic_sign};

constexpr std::uint8_t to_id(ClassId c) noexcept { return static_cast<std::uint8_t>(c); }

constexpr bool is_valid_class_id(std::uint8_t id) noexcept { return id < kClassCount; }

bool is_static_infrastructure(ClassId c) noexcept;

std::string_view class_name(ClassId c) noexcept;
std::optional<ClassId> class_from_name(std::string_view name) noexcept;

/// Every class in declaration order.
std::span<ClassId const> all_classes() noexcept;

/// Throws ValidationError naming the first pixel whose value is not a class ID.
void validate_mask(SegMask const& mask);

}  // namespace oasis
