// Copyright 2026 The refmatte Authors
// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "refmatte/render/optics.hpp"

namespace refmatte::render {
namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

// Ray travelling in the x-z plane towards +z at angle theta from the z axis.
Vec3 incident_at(double theta) { return Vec3(std::sin(theta), 0.0, std::cos(theta)); }

// Textbook Fresnel equations in terms of angles (independent of the vector form).
double fresnel_oracle(double theta_i, double n1, double n2) {
  const double s = n1 / n2 * std::sin(theta_i);
  if (s >= 1.0) return 0.0;
  const double theta_t = std::asin(s);
  const double ci = std::cos(theta_i);
  const double ct = std::cos(theta_t);
  const double rs = std::pow((n1 * ci - n2 * ct) / (n1 * ci + n2 * ct), 2);
  const double rp = std::pow((n1 * ct - n2 * ci) / (n1 * ct + n2 * ci), 2);
  return 1.0 - 0.5 * (rs + rp);
}

TEST(Refract, EqualIndicesLeaveDirectionUnchanged) {
  const Vec3 d = incident_at(33 * kDeg);
  const auto t = refract_direction(d, Vec3(0, 0, -1), 1.4, 1.4);
  ASSERT_TRUE(t);
  EXPECT_LT((*t - d).norm(), 1e-12);
}

TEST(Refract, NormalIncidenceUnchanged) {
  const auto t = refract_direction(Vec3(0, 0, 1), Vec3(0, 0, -1), 1.0, 1.5);
  ASSERT_TRUE(t);
  EXPECT_LT((*t - Vec3(0, 0, 1)).norm(), 1e-12);
}

TEST(Refract, SnellAt45Degrees) {
  const auto t = refract_direction(incident_at(45 * kDeg), Vec3(0, 0, -1), 1.0, 1.5);
  ASSERT_TRUE(t);
  const double theta_t = std::asin(std::sin(45 * kDeg) / 1.5);
  EXPECT_NEAR(theta_t / kDeg, 28.126, 1e-3);
  EXPECT_NEAR((*t)(0), std::sin(theta_t), 1e-12);
  EXPECT_NEAR((*t)(1), 0.0, 1e-12);
  EXPECT_NEAR((*t)(2), std::cos(theta_t), 1e-12);
  EXPECT_NEAR(t->norm(), 1.0, 1e-12);
}

TEST(Refract, NormalOrientationDoesNotMatter) {
  const Vec3 d = incident_at(20 * kDeg);
  const auto a = refract_direction(d, Vec3(0, 0, -1), 1.0, 1.33);
  const auto b = refract_direction(d, Vec3(0, 0, 1), 1.0, 1.33);
  ASSERT_TRUE(a && b);
  EXPECT_LT((*a - *b).norm(), 1e-12);
}

TEST(Refract, SnellHoldsAcrossAngles) {
  for (double n2 : {1.3, 1.4, 1.5}) {
    for (int deg = 0; deg < 90; deg += 5) {
      const auto t = refract_direction(incident_at(deg * kDeg), Vec3(0, 0, -1), 1.0, n2);
      ASSERT_TRUE(t);
      EXPECT_NEAR(std::sin(deg * kDeg), n2 * (*t)(0), 1e-12);
    }
  }
}

TEST(Refract, TotalInternalReflection) {
  const double critical = std::asin(1.0 / 1.5);
  EXPECT_FALSE(refract_direction(incident_at(critical + 0.01), Vec3(0, 0, -1), 1.5, 1.0));
  EXPECT_TRUE(refract_direction(incident_at(critical - 0.01), Vec3(0, 0, -1), 1.5, 1.0));
  EXPECT_EQ(fresnel_transmittance(incident_at(critical + 0.01), Vec3(0, 0, -1), 1.5, 1.0), 0.0);
}

TEST(Refract, RejectsBadInputs) {
  EXPECT_THROW(refract_direction(Vec3(0, 0, 1.01), Vec3(0, 0, -1), 1.0, 1.5),
               std::invalid_argument);
  EXPECT_THROW(refract_direction(Vec3(0, 0, 1), Vec3(0, 0, -2), 1.0, 1.5), std::invalid_argument);
  EXPECT_THROW(refract_direction(Vec3(0, 0, 1), Vec3(0, 0, -1), 0.0, 1.5), std::invalid_argument);
  EXPECT_THROW(fresnel_transmittance(Vec3(0, 0, 1), Vec3(0, 0, -1), 1.0, -1.0),
               std::invalid_argument);
}

TEST(Fresnel, NoInterfaceTransmitsEverything) {
  EXPECT_DOUBLE_EQ(fresnel_transmittance(incident_at(0.3), Vec3(0, 0, -1), 1.0, 1.0), 1.0);
}

TEST(Fresnel, NormalIncidence) {
  const double expected = 1.0 - std::pow((1.5 - 1.0) / (1.5 + 1.0), 2);
  EXPECT_NEAR(expected, 0.96, 1e-15);
  EXPECT_NEAR(fresnel_transmittance(Vec3(0, 0, 1), Vec3(0, 0, -1), 1.0, 1.5), expected, 1e-12);
}

TEST(Fresnel, MatchesAngleFormOracle) {
  for (double n2 : {1.33, 1.5}) {
    for (int deg = 0; deg < 90; deg += 3) {
      const double theta = deg * kDeg;
      EXPECT_NEAR(fresnel_transmittance(incident_at(theta), Vec3(0, 0, -1), 1.0, n2),
                  fresnel_oracle(theta, 1.0, n2), 1e-12);
      EXPECT_NEAR(fresnel_transmittance(incident_at(theta * 0.6), Vec3(0, 0, -1), n2, 1.0),
                  fresnel_oracle(theta * 0.6, n2, 1.0), 1e-12);
    }
  }
}

TEST(Fresnel, GrazingIncidenceGoesToZero) {
  double previous = 1.0;
  for (double deg : {80.0, 89.0, 89.9, 89.99, 89.999}) {
    const double t = fresnel_transmittance(incident_at(deg * kDeg), Vec3(0, 0, -1), 1.0, 1.5);
    EXPECT_LT(t, previous);
    EXPECT_GE(t, 0.0);
    previous = t;
  }
  EXPECT_LT(previous, 2e-4);
}

}  // namespace
}  // namespace refmatte::render
