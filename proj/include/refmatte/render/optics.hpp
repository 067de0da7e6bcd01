// Copyright 2026 The refmatte Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace refmatte::render {

using Vec3 = Eigen::Vector3d;

/// Snell refraction of a unit direction at an interface from index n1 into n2.
/// The normal may face either side; it is reoriented against the incident ray.
/// Returns std::nullopt on total internal reflection. Throws std::invalid_argument
/// for non-unit vectors (tolerance 1e-6) or non-positive indices.
std::optional<Vec3> refract_direction(const Vec3& incident, const Vec3& normal, double n1,
                                      double n2);

/// Unpolarized Fresnel transmittance, the mean of the s and p terms. Zero under
/// total internal reflection. Same preconditions as refract_direction.
double fresnel_transmittance(const Vec3& incident, const Vec3& normal, double n1, double n2);

}  // namespace refmatte::render
