// Copyright 2026 The refmatte Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>

#include "refmatte/render/scene.hpp"

namespace refmatte::render {

// Scene files are INI-style documents; see docs/file-formats.md for the schema.
// Numbers are written with 17 significant digits so read(write(s)) is exact.

Scene parse_scene(std::istream& in);
Scene read_scene(const std::filesystem::path& path);
void write_scene(std::ostream& out, const Scene& scene);
void write_scene(const std::filesystem::path& path, const Scene& scene);

enum class ObjectCategory { Glass, GlassWithWater, Lens, Complex };
inline constexpr ObjectCategory kAllCategories[] = {ObjectCategory::Glass,
                                                    ObjectCategory::GlassWithWater,
                                                    ObjectCategory::Lens, ObjectCategory::Complex};

std::string_view category_name(ObjectCategory category);
/// Throws std::invalid_argument for unknown names.
ObjectCategory parse_category(std::string_view name);

enum class PrimitiveKind { Slab, Sphere, Lens, Sor };

/// Randomized camera (focal length, small viewpoint rotation), pose, and
/// object parameters; refractive index uniform in [1.3, 1.5]. Deterministic in seed.
Scene random_scene(ObjectCategory category, std::uint64_t seed, int width, int height);
Scene random_primitive_scene(PrimitiveKind kind, std::uint64_t seed, int width, int height);

/// Upright cup profile: outer radius, height, wall and base thickness.
SurfaceOfRevolution cup_profile(double radius_bottom, double radius_top, double height,
                                double wall, double base);
/// Liquid body filling a cup_profile() cavity up to fill_fraction of its depth.
SurfaceOfRevolution cup_liquid_profile(double radius_bottom, double radius_top, double height,
                                       double wall, double base, double fill_fraction);

}  // namespace refmatte::render
