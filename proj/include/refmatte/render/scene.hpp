// Copyright 2026 The refmatte Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>

#include <Eigen/Geometry>

#include "refmatte/render/shapes.hpp"

namespace refmatte::render {

using Pose = Eigen::Isometry3d;

/// Rotation from XYZ Euler angles in degrees, applied as Rz * Ry * Rx.
Eigen::Matrix3d rotation_from_euler_deg(const Vec3& angles_deg);

/// Pinhole camera. Pixel centres sit at integer coordinates; the optical axis
/// is +z in the camera frame with +x right and +y down.
struct Camera {
  int width = 256;
  int height = 256;
  double focal_length = 256.0;
  double principal_x = 127.5;
  double principal_y = 127.5;
  Pose world_from_camera = Pose::Identity();

  /// Principal point at the image centre.
  static Camera centered(int width, int height, double focal_length);

  /// Unit ray direction through pixel (x, y), camera frame.
  Vec3 direction(double x, double y) const;
};

/// A region of a second medium (e.g. water) that takes precedence over the
/// object's own medium wherever the two overlap.
struct Filling {
  Shape shape;
  double refractive_index = 1.33;
};

struct TransparentObject {
  Shape shape;
  double refractive_index = 1.5;
  Pose world_from_object = Pose::Identity();
  std::optional<Filling> filling;  // in the object's frame
};

/// Camera, optional object, and a background plane at z = background_distance in
/// the camera frame. The plane is textured so that, without an object, the ray
/// through pixel p lands on background pixel p.
struct Scene {
  Camera camera;
  std::optional<TransparentObject> object;
  double background_distance = 10.0;
};

/// Physical validity: focal length, shapes, indices >= 1, and the object lying
/// strictly between the camera and the background plane. Throws std::invalid_argument.
void validate(const Scene& scene);

/// Dataset range for object refractive indices.
inline constexpr double kMinObjectIndex = 1.3;
inline constexpr double kMaxObjectIndex = 1.5;
inline constexpr double kWaterIndex = 1.33;

/// validate() plus the dataset index range [1.3, 1.5] for the object medium.
void validate_for_dataset(const Scene& scene);

}  // namespace refmatte::render
