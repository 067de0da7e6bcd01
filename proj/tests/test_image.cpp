// Copyright 2026 The refmatte Authors
// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <stdexcept>

#include "refmatte/image.hpp"

namespace refmatte {
namespace {

TEST(ImageBuffer, LayoutIsRowMajorInterleaved) {
  ImageBuffer img(3, 2, 3);
  EXPECT_EQ(img.size(), 18u);
  img.at(2, 1, 1) = 0.5f;
  EXPECT_EQ(img.data()[(1 * 3 + 2) * 3 + 1], 0.5f);
  EXPECT_EQ(img.row(1).size(), 9u);
}

TEST(ImageBuffer, RejectsBadShapes) {
  EXPECT_THROW(ImageBuffer(0, 4, 1), std::invalid_argument);
  EXPECT_THROW(ImageBuffer(4, -1, 1), std::invalid_argument);
  EXPECT_THROW(ImageBuffer(4, 4, 2), std::invalid_argument);
  EXPECT_THROW(ImageBuffer(4, 4, 4), std::invalid_argument);
}

TEST(ImageBuffer, Clamp01) {
  ImageBuffer img(2, 1, 1);
  img.at(0, 0) = -0.5f;
  img.at(1, 0) = 1.5f;
  img.clamp01();
  EXPECT_EQ(img.at(0, 0), 0.0f);
  EXPECT_EQ(img.at(1, 0), 1.0f);
}

TEST(FlowField, InvalidPixelsCarryZeroOffset) {
  FlowField f(4, 4);
  f.set(1, 2, 3.0f, -1.0f);
  f.invalidate(1, 2);
  EXPECT_FALSE(f.valid(1, 2));
  EXPECT_EQ(f.dx(1, 2), 0.0f);
  EXPECT_EQ(f.dy(1, 2), 0.0f);
  EXPECT_EQ(f.invalid_count(), 1u);
}

TEST(Matte, DefaultsAreBackground) {
  const Matte m(5, 3);
  for (float v : m.mask.data()) EXPECT_EQ(v, 0.0f);
  for (float v : m.attenuation.data()) EXPECT_EQ(v, 1.0f);
  EXPECT_EQ(m.flow.invalid_count(), 0u);
  EXPECT_NO_THROW(validate(m));
}

TEST(Matte, ValidateCatchesViolations) {
  Matte m(4, 4);
  m.mask.at(0, 0) = 1.5f;
  EXPECT_THROW(validate(m), std::invalid_argument);
  m = Matte(4, 4);
  m.attenuation.at(1, 1) = -0.1f;
  EXPECT_THROW(validate(m), std::invalid_argument);
  m = Matte(4, 4);
  m.flow.set(0, 0, 5.0f, 0.0f);  // |dx| > width
  EXPECT_THROW(validate(m), std::invalid_argument);
  m = Matte(4, 4);
  m.flow.set(0, 0, std::numeric_limits<float>::quiet_NaN(), 0.0f);
  EXPECT_THROW(validate(m), std::invalid_argument);
  m = Matte(4, 4);
  m.mask = ImageBuffer(3, 4, 1);
  EXPECT_THROW(validate(m), std::invalid_argument);
}

TEST(Matte, BitEqualDistinguishesSignedZero) {
  Matte a(2, 2);
  Matte b(2, 2);
  EXPECT_TRUE(bit_equal(a, b));
  b.flow.set(0, 0, -0.0f, 0.0f);
  EXPECT_FALSE(bit_equal(a, b));
}

}  // namespace
}  // namespace refmatte
