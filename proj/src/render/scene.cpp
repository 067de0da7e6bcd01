// Copyright 2026 The refmatte Authors
// SPDX-License-Identifier: Apache-2.0
#include "refmatte/render/scene.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace refmatte::render {

Eigen::Matrix3d rotation_from_euler_deg(const Vec3& angles_deg) {
  const Vec3 a = angles_deg * (std::numbers::pi / 180.0);
  return (Eigen::AngleAxisd(a.z(), Vec3::UnitZ()) * Eigen::AngleAxisd(a.y(), Vec3::UnitY()) *
          Eigen::AngleAxisd(a.x(), Vec3::UnitX()))
      .toRotationMatrix();
}

Camera Camera::centered(int width, int height, double focal_length) {
  Camera c;
  c.width = width;
  c.height = height;
  c.focal_length = focal_length;
  c.principal_x = 0.5 * (width - 1);
  c.principal_y = 0.5 * (height - 1);
  return c;
}

Vec3 Camera::direction(double x, double y) const {
  return Vec3((x - principal_x) / focal_length, (y - principal_y) / focal_length, 1.0)
      .normalized();
}

void validate(const Scene& scene) {
  const Camera& cam = scene.camera;
  if (cam.width < 1 || cam.height < 1) throw std::invalid_argument("scene: empty image size");
  if (!(cam.focal_length > 0.0) || !std::isfinite(cam.focal_length)) {
    throw std::invalid_argument("scene: focal length must be positive");
  }
  if (!(scene.background_distance > 0.0) || !std::isfinite(scene.background_distance)) {
    throw std::invalid_argument("scene: background distance must be positive");
  }
  if (!scene.object) return;
  const TransparentObject& obj = *scene.object;
  validate(obj.shape);
  if (!(obj.refractive_index >= 1.0) || !std::isfinite(obj.refractive_index)) {
    throw std::invalid_argument("scene: refractive index must be >= 1");
  }
  if (obj.filling) {
    validate(obj.filling->shape);
    if (!(obj.filling->refractive_index >= 1.0)) {
      throw std::invalid_argument("scene: filling refractive index must be >= 1");
    }
  }
  const Pose camera_from_object = cam.world_from_camera.inverse() * obj.world_from_object;
  const BoundingSphere b = bounds(obj.shape);
  const Vec3 c = camera_from_object * b.center;
  if (c.z() + b.radius >= scene.background_distance) {
    throw std::invalid_argument("scene: object reaches the background plane");
  }
  if (c.z() - b.radius <= 0.0) {
    throw std::invalid_argument("scene: object is not in front of the camera");
  }
}

void validate_for_dataset(const Scene& scene) {
  validate(scene);
  if (scene.object) {
    const double n = scene.object->refractive_index;
    if (n < kMinObjectIndex || n > kMaxObjectIndex) {
      throw std::invalid_argument("scene: refractive index " + std::to_string(n) +
                                  " outside [1.3, 1.5]");
    }
  }
}

}  // namespace refmatte::render
