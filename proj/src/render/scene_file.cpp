// Copyright 2026 The refmatte Authors
// SPDX-License-Identifier: Apache-2.0
#include "refmatte/render/scene_file.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "refmatte/errors.hpp"
#include "refmatte/rng.hpp"

namespace refmatte::render {
namespace {

namespace pt = boost::property_tree;

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string format_numbers(const double* v, std::size_t n) {
  std::string s;
  for (std::size_t i = 0; i < n; ++i) {
    if (i) s += ' ';
    s += format_number(v[i]);
  }
  return s;
}

std::vector<double> parse_numbers(const std::string& text, const std::string& key) {
  std::istringstream in(text);
  std::vector<double> out;
  std::string token;
  while (in >> token) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(token, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != token.size() || !std::isfinite(v)) {
      throw std::invalid_argument("scene: key '" + key + "' has a non-numeric value '" + token + "'");
    }
    out.push_back(v);
  }
  return out;
}

double get_number(const pt::ptree& section, const std::string& key, const std::string& where) {
  const auto v = section.get_optional<std::string>(key);
  if (!v) throw std::invalid_argument("scene: missing key '" + where + "." + key + "'");
  const auto nums = parse_numbers(*v, key);
  if (nums.size() != 1) throw std::invalid_argument("scene: key '" + key + "' expects one number");
  return nums[0];
}

double get_number_or(const pt::ptree& section, const std::string& key, double fallback) {
  const auto v = section.get_optional<std::string>(key);
  if (!v) return fallback;
  const auto nums = parse_numbers(*v, key);
  if (nums.size() != 1) throw std::invalid_argument("scene: key '" + key + "' expects one number");
  return nums[0];
}

Vec3 get_vec3_or(const pt::ptree& section, const std::string& key, const Vec3& fallback) {
  const auto v = section.get_optional<std::string>(key);
  if (!v) return fallback;
  const auto nums = parse_numbers(*v, key);
  if (nums.size() != 3) throw std::invalid_argument("scene: key '" + key + "' expects 3 numbers");
  return {nums[0], nums[1], nums[2]};
}

Pose read_pose(const pt::ptree& section) {
  Pose pose = Pose::Identity();
  pose.translation() = get_vec3_or(section, "position", Vec3::Zero());
  if (const auto m = section.get_optional<std::string>("rotation")) {
    const auto nums = parse_numbers(*m, "rotation");
    if (nums.size() != 9) throw std::invalid_argument("scene: 'rotation' expects 9 numbers");
    Eigen::Matrix3d r;
    r << nums[0], nums[1], nums[2], nums[3], nums[4], nums[5], nums[6], nums[7], nums[8];
    if (!(r * r.transpose()).isIdentity(1e-9) || std::abs(r.determinant() - 1.0) > 1e-9) {
      throw std::invalid_argument("scene: 'rotation' is not a rotation matrix");
    }
    pose.linear() = r;
  } else {
    pose.linear() = rotation_from_euler_deg(get_vec3_or(section, "rotation_deg", Vec3::Zero()));
  }
  return pose;
}

void write_pose(pt::ptree& section, const Pose& pose) {
  const Vec3 t = pose.translation();
  section.put("position", format_numbers(t.data(), 3));
  const Eigen::Matrix3d r = pose.linear();
  std::array<double, 9> m{};
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) m[i * 3 + j] = r(i, j);
  }
  section.put("rotation", format_numbers(m.data(), 9));
}

Shape read_shape(const pt::ptree& s, const std::string& where) {
  const std::string kind = s.get<std::string>("shape", "");
  if (kind == "slab") {
    Slab slab;
    slab.thickness = get_number(s, "thickness", where);
    slab.normal = get_vec3_or(s, "normal", Vec3::UnitZ());
    if (std::abs(slab.normal.norm() - 1.0) > 1e-12) slab.normal.normalize();
    slab.half_extent = get_number(s, "half_extent", where);
    return slab;
  }
  if (kind == "sphere") {
    Sphere sphere;
    sphere.center = get_vec3_or(s, "center", Vec3::Zero());
    sphere.radius = get_number(s, "radius", where);
    return sphere;
  }
  if (kind == "lens") {
    Lens lens;
    lens.radius_front = get_number(s, "radius_front", where);
    lens.radius_back = get_number(s, "radius_back", where);
    lens.thickness = get_number(s, "thickness", where);
    return lens;
  }
  if (kind == "sor") {
    const auto text = s.get_optional<std::string>("profile");
    if (!text) throw std::invalid_argument("scene: missing key '" + where + ".profile'");
    const auto nums = parse_numbers(*text, "profile");
    if (nums.size() % 2 != 0) throw std::invalid_argument("scene: profile needs (r z) pairs");
    SurfaceOfRevolution sor;
    for (std::size_t i = 0; i < nums.size(); i += 2) sor.profile.push_back({nums[i], nums[i + 1]});
    return sor;
  }
  throw std::invalid_argument("scene: unknown shape '" + kind + "' in [" + where + "]");
}

void write_shape(pt::ptree& s, const Shape& shape) {
  s.put("shape", shape_name(shape));
  std::visit(
      [&](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Slab>) {
          s.put("thickness", format_number(v.thickness));
          s.put("normal", format_numbers(v.normal.data(), 3));
          s.put("half_extent", format_number(v.half_extent));
        } else if constexpr (std::is_same_v<T, Sphere>) {
          s.put("center", format_numbers(v.center.data(), 3));
          s.put("radius", format_number(v.radius));
        } else if constexpr (std::is_same_v<T, Lens>) {
          s.put("radius_front", format_number(v.radius_front));
          s.put("radius_back", format_number(v.radius_back));
          s.put("thickness", format_number(v.thickness));
        } else {
          std::vector<double> flat;
          for (const auto& p : v.profile) {
            flat.push_back(p.r);
            flat.push_back(p.z);
          }
          s.put("profile", format_numbers(flat.data(), flat.size()));
        }
      },
      shape);
}

}  // namespace

Scene parse_scene(std::istream& in) {
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw std::invalid_argument(std::string("scene: ") + e.what());
  }
  Scene scene;
  const auto& cam = tree.get_child("camera", pt::ptree());
  const auto width = static_cast<int>(get_number(cam, "width", "camera"));
  const auto height = static_cast<int>(get_number(cam, "height", "camera"));
  scene.camera = Camera::centered(width, height, get_number(cam, "focal_length", "camera"));
  scene.camera.principal_x = get_number_or(cam, "principal_x", scene.camera.principal_x);
  scene.camera.principal_y = get_number_or(cam, "principal_y", scene.camera.principal_y);
  scene.camera.world_from_camera = read_pose(cam);

  const auto& bg = tree.get_child("background", pt::ptree());
  scene.background_distance = get_number(bg, "distance", "background");

  if (const auto obj = tree.get_child_optional("object")) {
    if (obj->get<std::string>("shape", "none") != "none") {
      TransparentObject object;
      object.shape = read_shape(*obj, "object");
      object.refractive_index = get_number(*obj, "refractive_index", "object");
      object.world_from_object = read_pose(*obj);
      if (const auto fill = tree.get_child_optional("filling")) {
        Filling filling;
        filling.shape = read_shape(*fill, "filling");
        filling.refractive_index = get_number_or(*fill, "refractive_index", kWaterIndex);
        object.filling = filling;
      }
      scene.object = object;
    }
  }
  validate_for_dataset(scene);
  return scene;
}

Scene read_scene(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open scene file " + path.string());
  return parse_scene(in);
}

void write_scene(std::ostream& out, const Scene& scene) {
  pt::ptree tree;
  pt::ptree cam;
  cam.put("width", scene.camera.width);
  cam.put("height", scene.camera.height);
  cam.put("focal_length", format_number(scene.camera.focal_length));
  cam.put("principal_x", format_number(scene.camera.principal_x));
  cam.put("principal_y", format_number(scene.camera.principal_y));
  write_pose(cam, scene.camera.world_from_camera);
  tree.add_child("camera", cam);

  pt::ptree bg;
  bg.put("distance", format_number(scene.background_distance));
  tree.add_child("background", bg);

  pt::ptree obj;
  if (scene.object) {
    write_shape(obj, scene.object->shape);
    obj.put("refractive_index", format_number(scene.object->refractive_index));
    write_pose(obj, scene.object->world_from_object);
  } else {
    obj.put("shape", "none");
  }
  tree.add_child("object", obj);
  if (scene.object && scene.object->filling) {
    pt::ptree fill;
    write_shape(fill, scene.object->filling->shape);
    fill.put("refractive_index", format_number(scene.object->filling->refractive_index));
    tree.add_child("filling", fill);
  }
  pt::write_ini(out, tree);
}

void write_scene(const std::filesystem::path& path, const Scene& scene) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write scene file " + path.string());
  write_scene(out, scene);
  if (!out) throw IoError("failed writing scene file " + path.string());
}

std::string_view category_name(ObjectCategory category) {
  switch (category) {
    case ObjectCategory::Glass:
      return "glass";
    case ObjectCategory::GlassWithWater:
      return "glass_water";
    case ObjectCategory::Lens:
      return "lens";
    case ObjectCategory::Complex:
      return "complex";
  }
  return "unknown";
}

ObjectCategory parse_category(std::string_view name) {
  for (ObjectCategory c : kAllCategories) {
    if (category_name(c) == name) return c;
  }
  throw std::invalid_argument("unknown object category '" + std::string(name) + "'");
}

SurfaceOfRevolution cup_profile(double radius_bottom, double radius_top, double height,
                                double wall, double base) {
  const double z0 = -0.5 * height;
  const double z1 = 0.5 * height;
  const double inner_floor = z0 + base;
  const double slope = (radius_top - radius_bottom) / height;
  const double inner_at_floor = radius_bottom + slope * base - wall;
  return SurfaceOfRevolution{{{0.0, z0},
                              {radius_bottom, z0},
                              {radius_top, z1},
                              {radius_top - wall, z1},
                              {inner_at_floor, inner_floor},
                              {0.0, inner_floor}}};
}

SurfaceOfRevolution cup_liquid_profile(double radius_bottom, double radius_top, double height,
                                       double wall, double base, double fill_fraction) {
  // The liquid overlaps the glass by a hair so the two bodies never share a
  // surface; the liquid takes precedence inside the overlap.
  constexpr double kOverlap = 1e-3;
  const double z0 = -0.5 * height;
  const double slope = (radius_top - radius_bottom) / height;
  const double floor_z = z0 + base;
  const double level = floor_z + fill_fraction * (height - base);
  auto inner = [&](double z) { return radius_bottom + slope * (z - z0) - wall + kOverlap; };
  return SurfaceOfRevolution{{{0.0, floor_z - kOverlap},
                              {inner(floor_z - kOverlap), floor_z - kOverlap},
                              {inner(level), level},
                              {0.0, level}}};
}

namespace {

Scene random_frame(Rng& rng, int width, int height) {
  Scene scene;
  scene.camera = Camera::centered(width, height, rng.uniform(0.9, 1.3) * width);
  scene.camera.world_from_camera.linear() =
      rotation_from_euler_deg(Vec3(rng.uniform(-4.0, 4.0), rng.uniform(-4.0, 4.0), 0.0));
  scene.background_distance = rng.uniform(9.0, 12.0);
  return scene;
}

// Object placed on the (rotated) optical axis at the given depth, with a small lateral jitter.
Pose place(const Scene& scene, Rng& rng, double depth, const Eigen::Matrix3d& rotation) {
  const Vec3 jitter(rng.uniform(-0.25, 0.25), rng.uniform(-0.25, 0.25), depth);
  Pose pose = Pose::Identity();
  pose.translation() = scene.camera.world_from_camera * jitter;
  pose.linear() = scene.camera.world_from_camera.linear() * rotation;
  return pose;
}

Eigen::Matrix3d upright(Rng& rng) {
  // Local +z (the cup axis) points up the image, i.e. along camera -y.
  const double lean = rng.uniform(-25.0, 25.0);
  return rotation_from_euler_deg(Vec3(90.0 + lean, 0.0, rng.uniform(-15.0, 15.0)));
}

TransparentObject random_cup(Rng& rng, const Scene& scene, bool with_water) {
  const double rb = rng.uniform(0.5, 0.85);
  const double rt = rb * rng.uniform(1.0, 1.25);
  const double h = rng.uniform(1.6, 2.4);
  const double wall = rng.uniform(0.04, 0.1);
  const double base = rng.uniform(0.1, 0.25);
  TransparentObject obj;
  obj.shape = cup_profile(rb, rt, h, wall, base);
  obj.refractive_index = rng.uniform(kMinObjectIndex, kMaxObjectIndex);
  if (with_water) {
    obj.filling = Filling{cup_liquid_profile(rb, rt, h, wall, base, rng.uniform(0.3, 0.9)), kWaterIndex};
  }
  obj.world_from_object = place(scene, rng, rng.uniform(4.5, 6.0), upright(rng));
  return obj;
}

TransparentObject random_vase(Rng& rng, const Scene& scene) {
  const double h = rng.uniform(1.4, 2.4);
  const double base_r = rng.uniform(0.35, 0.7);
  const double freq = rng.uniform(1.5, 4.0);
  const double phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
  const double amp = rng.uniform(0.1, 0.35);
  constexpr int kRings = 10;
  SurfaceOfRevolution sor;
  sor.profile.push_back({0.0, -0.5 * h});
  for (int k = 0; k <= kRings; ++k) {
    const double s = static_cast<double>(k) / kRings;
    sor.profile.push_back({base_r * (1.0 + amp * std::sin(phase + freq * s * std::numbers::pi)),
                           -0.5 * h + s * h});
  }
  sor.profile.push_back({0.0, 0.5 * h});
  TransparentObject obj;
  obj.shape = sor;
  obj.refractive_index = rng.uniform(kMinObjectIndex, kMaxObjectIndex);
  obj.world_from_object = place(scene, rng, rng.uniform(4.5, 6.0), upright(rng));
  return obj;
}

TransparentObject random_primitive(PrimitiveKind kind, Rng& rng, const Scene& scene) {
  TransparentObject obj;
  obj.refractive_index = rng.uniform(kMinObjectIndex, kMaxObjectIndex);
  const Eigen::Matrix3d tilt =
      rotation_from_euler_deg(Vec3(rng.uniform(-40.0, 40.0), rng.uniform(-40.0, 40.0), rng.uniform(-90.0, 90.0)));
  switch (kind) {
    case PrimitiveKind::Slab: {
      Slab slab;
      slab.thickness = rng.uniform(0.15, 0.5);
      slab.half_extent = rng.uniform(0.7, 1.3);
      obj.shape = slab;
      break;
    }
    case PrimitiveKind::Sphere:
      obj.shape = Sphere{Vec3::Zero(), rng.uniform(0.6, 1.3)};
      break;
    case PrimitiveKind::Lens: {
      Lens lens;
      lens.radius_front = rng.uniform(1.2, 3.0);
      lens.radius_back = rng.uniform(1.2, 3.0);
      lens.thickness = rng.uniform(0.25, 0.7);
      obj.shape = lens;
      break;
    }
    case PrimitiveKind::Sor:
      return random_vase(rng, scene);
  }
  obj.world_from_object = place(scene, rng, rng.uniform(4.5, 6.0), tilt);
  return obj;
}

}  // namespace

Scene random_primitive_scene(PrimitiveKind kind, std::uint64_t seed, int width, int height) {
  Rng rng(mix_seed(seed, 0x5ce7e));
  Scene scene = random_frame(rng, width, height);
  scene.object = random_primitive(kind, rng, scene);
  validate_for_dataset(scene);
  return scene;
}

Scene random_scene(ObjectCategory category, std::uint64_t seed, int width, int height) {
  Rng rng(mix_seed(seed, 0xca7e));
  Scene scene = random_frame(rng, width, height);
  switch (category) {
    case ObjectCategory::Glass:
      scene.object = random_cup(rng, scene, false);
      break;
    case ObjectCategory::GlassWithWater:
      scene.object = random_cup(rng, scene, true);
      break;
    case ObjectCategory::Lens:
      scene.object = random_primitive(PrimitiveKind::Lens, rng, scene);
      break;
    case ObjectCategory::Complex: {
      constexpr PrimitiveKind kParts[] = {PrimitiveKind::Sphere, PrimitiveKind::Slab,
                                          PrimitiveKind::Sor};
      scene.object = random_primitive(kParts[rng.below(3)], rng, scene);
      break;
    }
  }
  validate_for_dataset(scene);
  return scene;
}

}  // namespace refmatte::render
