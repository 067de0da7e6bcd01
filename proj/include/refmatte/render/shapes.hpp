// Copyright 2026 The refmatte Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <variant>
#include <vector>

#include "refmatte/render/optics.hpp"

namespace refmatte::render {

struct Ray {
  Vec3 origin;
  Vec3 direction;  // unit length
  Vec3 at(double t) const { return origin + t * direction; }
};

/// Flat plate: |p.n| <= thickness/2, square lateral extent of 2*half_extent.
struct Slab {
  double thickness = 0.2;
  Vec3 normal = Vec3::UnitZ();
  double half_extent = 1.0;
};

struct Sphere {
  Vec3 center = Vec3::Zero();
  double radius = 1.0;
};

/// Biconvex lens along the local z axis: the intersection of a front ball of
/// radius_front whose vertex sits at z = -thickness/2 and a back ball of
/// radius_back whose vertex sits at z = +thickness/2.
struct Lens {
  double radius_front = 2.0;
  double radius_back = 2.0;
  double thickness = 0.4;
};

struct ProfilePoint {
  double r = 0.0;
  double z = 0.0;
};

/// Solid of revolution about the local z axis. The profile polyline lives in the
/// (r, z) half-plane and is closed by the segment from its last to its first
/// point; the enclosed region is revolved.
struct SurfaceOfRevolution {
  std::vector<ProfilePoint> profile;
};

using Shape = std::variant<Slab, Sphere, Lens, SurfaceOfRevolution>;

struct ShapeHit {
  double t = 0.0;
  Vec3 normal;  // unit, orientation unspecified
};

/// Nearest boundary crossing with t > t_min, in the shape's local frame.
std::optional<ShapeHit> intersect(const Shape& shape, const Ray& ray, double t_min);

bool contains(const Shape& shape, const Vec3& p);

struct BoundingSphere {
  Vec3 center;
  double radius;
};
BoundingSphere bounds(const Shape& shape);

/// Throws std::invalid_argument for non-positive parameters or a self-intersecting profile.
void validate(const Shape& shape);

const char* shape_name(const Shape& shape);

/// Bisection tolerance for surface-of-revolution roots, in object units.
inline constexpr double kSorTolerance = 1e-6;

}  // namespace refmatte::render
