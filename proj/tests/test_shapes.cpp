// Copyright 2026 The refmatte Authors
// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "refmatte/render/shapes.hpp"

namespace refmatte::render {
namespace {

Ray ray(const Vec3& o, const Vec3& d) { return {o, d.normalized()}; }

// Smallest root > t_min of |o + t d - c|^2 = r^2, or infinity.
double sphere_oracle(const Vec3& c, double r, const Ray& ray, double t_min) {
  const Vec3 oc = ray.origin - c;
  const double b = oc.dot(ray.direction);
  const double disc = b * b - (oc.squaredNorm() - r * r);
  if (disc < 0) return std::numeric_limits<double>::infinity();
  const double s = std::sqrt(disc);
  for (double t : {-b - s, -b + s}) {
    if (t > t_min) return t;
  }
  return std::numeric_limits<double>::infinity();
}

// Closed cylinder r <= R, |z| <= H by explicit side/cap tests.
double cylinder_oracle(double R, double H, const Ray& ray, double t_min) {
  double best = std::numeric_limits<double>::infinity();
  const Vec3& o = ray.origin;
  const Vec3& d = ray.direction;
  const double a = d.x() * d.x() + d.y() * d.y();
  if (a > 1e-15) {
    const double b = o.x() * d.x() + o.y() * d.y();
    const double c = o.x() * o.x() + o.y() * o.y() - R * R;
    const double disc = b * b - a * c;
    if (disc >= 0) {
      for (double t : {(-b - std::sqrt(disc)) / a, (-b + std::sqrt(disc)) / a}) {
        if (t > t_min && std::abs(o.z() + t * d.z()) <= H) best = std::min(best, t);
      }
    }
  }
  if (std::abs(d.z()) > 1e-15) {
    for (double zc : {-H, H}) {
      const double t = (zc - o.z()) / d.z();
      const Vec3 p = o + t * d;
      if (t > t_min && p.x() * p.x() + p.y() * p.y() <= R * R) best = std::min(best, t);
    }
  }
  return best;
}

SurfaceOfRevolution cylinder(double R, double H) {
  return {{{0.0, -H}, {R, -H}, {R, H}, {0.0, H}}};
}

TEST(Sphere, MatchesQuadraticOracle) {
  const Sphere s{Vec3(0.1, -0.2, 0.3), 0.8};
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g;
  int hits = 0;
  for (int i = 0; i < 2000; ++i) {
    const Ray r = ray(Vec3(g(rng), g(rng), -4.0), Vec3(0.3 * g(rng), 0.3 * g(rng), 1.0));
    const double expected = sphere_oracle(s.center, s.radius, r, 1e-9);
    const auto hit = intersect(s, r, 1e-9);
    ASSERT_EQ(hit.has_value(), std::isfinite(expected));
    if (!hit) continue;
    ++hits;
    EXPECT_NEAR(hit->t, expected, 1e-9);
    EXPECT_NEAR(std::abs(hit->normal.dot((r.at(hit->t) - s.center).normalized())), 1.0, 1e-9);
  }
  EXPECT_GT(hits, 100);
}

TEST(Slab, AxisAlignedFaces) {
  const Slab s{0.2, Vec3::UnitZ(), 1.0};
  const auto hit = intersect(s, ray(Vec3(0.3, 0.2, -5), Vec3::UnitZ()), 0.0);
  ASSERT_TRUE(hit);
  EXPECT_NEAR(hit->t, 4.9, 1e-12);
  EXPECT_NEAR(std::abs(hit->normal.z()), 1.0, 1e-12);
  const auto exit = intersect(s, ray(Vec3(0.3, 0.2, -5), Vec3::UnitZ()), hit->t + 1e-9);
  ASSERT_TRUE(exit);
  EXPECT_NEAR(exit->t, 5.1, 1e-12);
  EXPECT_FALSE(intersect(s, ray(Vec3(1.5, 0, -5), Vec3::UnitZ()), 0.0));
}

TEST(Slab, TiltedFaceDistance) {
  const Vec3 n = Vec3(std::sin(0.5), 0.0, std::cos(0.5));
  const Slab s{0.3, n, 2.0};
  const auto hit = intersect(s, ray(Vec3(0, 0, -5), Vec3::UnitZ()), 0.0);
  ASSERT_TRUE(hit);
  // Plane n.p = -t/2 along the z axis: z = -0.15 / cos(0.5).
  EXPECT_NEAR(hit->t, 5.0 - 0.15 / std::cos(0.5), 1e-12);
}

TEST(Lens, OnAxisVertices) {
  const Lens lens{2.0, 3.0, 0.4};
  const auto front = intersect(lens, ray(Vec3(0, 0, -5), Vec3::UnitZ()), 0.0);
  ASSERT_TRUE(front);
  EXPECT_NEAR(front->t, 5.0 - 0.2, 1e-12);
  const auto back = intersect(lens, ray(Vec3(0, 0, -5), Vec3::UnitZ()), front->t + 1e-9);
  ASSERT_TRUE(back);
  EXPECT_NEAR(back->t, 5.2, 1e-12);
  EXPECT_TRUE(contains(lens, Vec3::Zero()));
  EXPECT_FALSE(contains(lens, Vec3(0, 0, 0.25)));
}

TEST(Lens, IsIntersectionOfTwoBalls) {
  const Lens lens{1.5, 2.5, 0.6};
  const Vec3 cf(0, 0, -0.3 + 1.5);
  const Vec3 cb(0, 0, 0.3 - 2.5);
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-1.2, 1.2);
  for (int i = 0; i < 5000; ++i) {
    const Vec3 p(u(rng), u(rng), u(rng) * 0.5);
    const bool inside = (p - cf).norm() < 1.5 && (p - cb).norm() < 2.5;
    if (std::abs((p - cf).norm() - 1.5) < 1e-9 || std::abs((p - cb).norm() - 2.5) < 1e-9) continue;
    EXPECT_EQ(contains(lens, p), inside);
  }
}

TEST(Sor, CylinderMatchesOracle) {
  const SurfaceOfRevolution sor = cylinder(0.7, 0.5);
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  int hits = 0;
  for (int i = 0; i < 3000; ++i) {
    const Ray r = ray(Vec3(0.5 * g(rng), 0.5 * g(rng), -3.0) + Vec3(g(rng), 0, 0),
                      Vec3(0.4 * g(rng), 0.4 * g(rng), 1.0));
    const double expected = cylinder_oracle(0.7, 0.5, r, 1e-9);
    const auto hit = intersect(sor, r, 1e-9);
    if (!std::isfinite(expected)) {
      EXPECT_FALSE(hit);
      continue;
    }
    ASSERT_TRUE(hit);
    ++hits;
    EXPECT_NEAR(hit->t, expected, 1e-5);
    EXPECT_NEAR(hit->normal.norm(), 1.0, 1e-12);
  }
  EXPECT_GT(hits, 200);
}

TEST(Sor, SideHitFromOutside) {
  const auto hit = intersect(cylinder(1.0, 1.0), ray(Vec3(-5, 0, 0), Vec3::UnitX()), 0.0);
  ASSERT_TRUE(hit);
  EXPECT_NEAR(hit->t, 4.0, kSorTolerance);
  EXPECT_NEAR(std::abs(hit->normal.x()), 1.0, 1e-6);
}

// A point is inside iff a ray from it crosses the surface an odd number of times.
TEST(Sor, ContainsAgreesWithCrossingParity) {
  const SurfaceOfRevolution cup{{{0.0, -0.5},
                                 {0.4, -0.5},
                                 {0.5, 0.5},
                                 {0.45, 0.5},
                                 {0.36, -0.4},
                                 {0.0, -0.4}}};
  ASSERT_NO_THROW(validate(Shape{cup}));
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-0.6, 0.6);
  int inside = 0;
  for (int i = 0; i < 400; ++i) {
    const Vec3 p(u(rng), u(rng), u(rng));
    const Ray r = ray(p, Vec3(0.31, -0.17, 0.93));
    int crossings = 0;
    double t = 0.0;
    while (auto hit = intersect(cup, r, t + 10 * kSorTolerance)) {
      ++crossings;
      t = hit->t;
      ASSERT_LT(crossings, 20);
    }
    EXPECT_EQ(contains(cup, p), crossings % 2 == 1) << p.transpose();
    inside += contains(cup, p) ? 1 : 0;
  }
  EXPECT_GT(inside, 10);
}

TEST(Bounds, EncloseInteriorPoints) {
  const Shape shapes[] = {Slab{0.3, Vec3(1, 1, 0).normalized(), 0.8}, Sphere{Vec3(0.2, 0, 0), 0.5},
                          Lens{1.0, 1.4, 0.5}, cylinder(0.4, 0.9)};
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (const auto& s : shapes) {
    const auto b = bounds(s);
    for (int i = 0; i < 3000; ++i) {
      const Vec3 p(u(rng), u(rng), u(rng));
      if (contains(s, p)) {
        EXPECT_LE((p - b.center).norm(), b.radius + 1e-12) << shape_name(s);
      }
    }
  }
}

TEST(Validate, RejectsDegenerateShapes) {
  EXPECT_THROW(validate(Shape{Slab{0.0, Vec3::UnitZ(), 1.0}}), std::invalid_argument);
  EXPECT_THROW(validate(Shape{Slab{0.1, Vec3::Zero(), 1.0}}), std::invalid_argument);
  EXPECT_THROW(validate(Shape{Sphere{Vec3::Zero(), -1.0}}), std::invalid_argument);
  EXPECT_THROW(validate(Shape{Lens{0.2, 1.0, 0.5}}), std::invalid_argument);
  EXPECT_THROW(validate(Shape{SurfaceOfRevolution{{{0, 0}, {1, 0}}}}), std::invalid_argument);
  EXPECT_THROW(validate(Shape{SurfaceOfRevolution{{{0, 0}, {-1, 0}, {1, 1}}}}),
               std::invalid_argument);
  // Bow tie: edges (0,0)-(1,1) and (1,0)-(0,1) cross.
  EXPECT_THROW(validate(Shape{SurfaceOfRevolution{{{0, 0}, {1, 1}, {1, 0}, {0, 1}}}}),
               std::invalid_argument);
  EXPECT_NO_THROW(validate(Shape{cylinder(1.0, 1.0)}));
}

}  // namespace
}  // namespace refmatte::render
