// Copyright 2026 The Polyscene Authors
// SPDX-License-Identifier: Apache-2.0

#include "polyscene/geom.h"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "oracles/stats.h"
#include "polyscene/errors.h"
#include "polyscene/rng.h"
#include "polyscene/sampling.h"
#include "test_util.h"

namespace polyscene::geom {
namespace {

using testing_util::ScriptedUniforms;
using testing_util::axis_plane;

void expect_vec_near(const Vec3& a, const Vec3& b, double tol) {
  EXPECT_NEAR(a.x, b.x, tol);
  EXPECT_NEAR(a.y, b.y, tol);
  EXPECT_NEAR(a.z, b.z, tol);
}

TEST(RngStream, SameSeedSameSequence) {
  RngStream a(42), b(42);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a.next_u64(), b.next_u64());
  EXPECT_NE(RngStream(42).next_u64(), RngStream(43).next_u64());
}

TEST(RngStream, FrozenFirstOutputs) {
  // 10000th output of std::mt19937_64 for the default seed 5489.
  std::mt19937_64 reference;
  reference.discard(9999);
  EXPECT_EQ(reference(), 9981545732273789042ull);
  RngStream s(5489);
  for (int i = 0; i < 9999; ++i) s.next_u64();
  EXPECT_EQ(s.next_u64(), 9981545732273789042ull);
}

TEST(RngStream, UniformInRange) {
  RngStream s(1);
  for (int i = 0; i < 10000; ++i) {
    const double u = s.uniform01();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
  }
}

TEST(RngStream, SubstreamsDiffer) {
  RngStream root(9);
  EXPECT_NE(root.substream(0).seed(), root.substream(1).seed());
  EXPECT_EQ(root.substream(3).seed(), RngStream(9).substream(3).seed());
}

TEST(UnitVec3, NormalizesAndRejectsZero) {
  const UnitVec3 u(Vec3{3, 0, 4});
  EXPECT_NEAR(norm(u.vec()), 1.0, 1e-15);
  EXPECT_THROW(UnitVec3(Vec3{0, 0, 0}), InvalidArgument);
  EXPECT_THROW(UnitVec3::from_unit({1.0, 1.0, 0.0}), InvalidArgument);
  EXPECT_FALSE(UnitVec3::try_normalize({0, 0, 1e-12}).has_value());
}

TEST(Plane, PointHasZeroDistance) {
  const Plane p{{0.1, -0.2, 0.3}, UnitVec3(Vec3{1, 2, 3})};
  EXPECT_EQ(p.signed_distance(p.point), 0.0);
}

TEST(SamplePointInBall, ScriptedOriginAccepted) {
  ScriptedUniforms src({0.0, 0.0, 0.0});
  EXPECT_EQ(sample_point_in_ball(src), (Vec3{0, 0, 0}));
  EXPECT_EQ(src.consumed(), 3u);
}

TEST(SamplePointInBall, CornerRejectedThenRetries) {
  ScriptedUniforms src({1.0, 1.0, 1.0, 0.5, 0.0, 0.0});
  EXPECT_EQ(sample_point_in_ball(src), (Vec3{0.5, 0, 0}));
  EXPECT_EQ(src.consumed(), 6u);
}

TEST(SamplePointInBall, NormsNeverExceedOne) {
  RngStream rng(11);
  for (int i = 0; i < 100000; ++i) {
    ASSERT_LE(squared_norm(sample_point_in_ball(rng)), 1.0);
  }
}

TEST(SampleUnitDirection, Examples) {
  expect_vec_near(direction_from_elevation(1.0, 1.234), {0, 0, 1}, 1e-15);
  expect_vec_near(direction_from_elevation(0.0, 0.0), {1, 0, 0}, 1e-15);
  // The sampler draws phi first, then u.
  ScriptedUniforms src({0.0, 0.0});
  expect_vec_near(sample_unit_direction(src).vec(), {1, 0, 0}, 1e-15);
}

TEST(SampleUnitDirection, UnitNormAndOctantUniformity) {
  RngStream rng(2024);
  std::vector<int> bins(8, 0);
  for (int i = 0; i < 10000; ++i) {
    const UnitVec3 d = sample_unit_direction(rng);
    ASSERT_NEAR(norm(d.vec()), 1.0, 1e-9);
    ++bins[oracle::octant(d.vec())];
  }
  EXPECT_LT(oracle::chi_square(bins), oracle::kChi2Crit999Dof7);
}

TEST(Marsaglia, Examples) {
  expect_vec_near(marsaglia_from_disk(0.0, 0.0).vec(), {0, 0, 1}, 1e-15);
  // s = 0.5: (2 * 0.5 * sqrt(0.5), same, 0)
  const double c = std::sqrt(0.5);
  expect_vec_near(marsaglia_from_disk(0.5, 0.5).vec(), {c, c, 0.0}, 1e-15);
  EXPECT_NEAR(c, 0.70711, 1e-5);
}

TEST(Marsaglia, RejectsOutsideDisk) {
  ScriptedUniforms src({0.9, 0.9, 0.0, 0.0});
  expect_vec_near(marsaglia_sphere_point(src).vec(), {0, 0, 1}, 1e-15);
  EXPECT_EQ(src.consumed(), 4u);
}

TEST(Marsaglia, Statistics) {
  RngStream rng(77);
  std::vector<int> bins(8, 0);
  double sum_z = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const UnitVec3 p = marsaglia_sphere_point(rng);
    ASSERT_NEAR(norm(p.vec()), 1.0, 1e-9);
    sum_z += p.z();
    ++bins[oracle::octant(p.vec())];
  }
  EXPECT_NEAR(sum_z / 10000.0, 0.0, 0.03);
  EXPECT_LT(oracle::chi_square(bins), oracle::kChi2Crit999Dof7);
}

TEST(PlanePlaneLine, CoordinatePlanes) {
  const auto line = plane_plane_line(axis_plane(2, 0.0), axis_plane(1, 0.0));
  ASSERT_TRUE(line.has_value());
  expect_vec_near(line->point, {0, 0, 0}, 1e-15);
  EXPECT_NEAR(std::abs(line->direction.x()), 1.0, 1e-15);
}

TEST(PlanePlaneLine, ParallelPlanes) {
  EXPECT_FALSE(plane_plane_line(axis_plane(2, 0.0), axis_plane(2, 0.5)));
}

TEST(PlanePlaneLine, RandomPairsSatisfyBothPlanes) {
  RngStream rng(5);
  for (int i = 0; i < 1000; ++i) {
    const Plane a = sample_plane(rng);
    const Plane b = sample_plane(rng);
    const auto line = plane_plane_line(a, b);
    ASSERT_TRUE(line.has_value());
    EXPECT_NEAR(a.signed_distance(line->point), 0.0, 1e-9);
    EXPECT_NEAR(b.signed_distance(line->point), 0.0, 1e-9);
    EXPECT_NEAR(dot(line->direction.vec(), a.normal.vec()), 0.0, 1e-9);
    EXPECT_NEAR(dot(line->direction.vec(), b.normal.vec()), 0.0, 1e-9);
  }
}

TEST(ThreePlanePoint, Examples) {
  expect_vec_near(*three_plane_point(axis_plane(0, 0), axis_plane(1, 0),
                                     axis_plane(2, 0)),
                  {0, 0, 0}, 1e-15);
  expect_vec_near(*three_plane_point(axis_plane(0, 0.1), axis_plane(1, 0.2),
                                     axis_plane(2, 0.3)),
                  {0.1, 0.2, 0.3}, 1e-15);
  EXPECT_FALSE(three_plane_point(axis_plane(0, 0), axis_plane(0, 0.5),
                                 axis_plane(1, 0)));
}

TEST(Quaternion, RotateMatchesMatrix) {
  const Quaternion q = Quaternion::from_axis_angle({1, 2, 3}, 0.7);
  const Vec3 v{0.3, -0.4, 0.5};
  const Mat3 m = q.to_matrix();
  const Vec3 mv{m[0][0] * v.x + m[0][1] * v.y + m[0][2] * v.z,
                m[1][0] * v.x + m[1][1] * v.y + m[1][2] * v.z,
                m[2][0] * v.x + m[2][1] * v.y + m[2][2] * v.z};
  expect_vec_near(q.rotate(v), mv, 1e-15);
  expect_vec_near(Quaternion::from_matrix(m).rotate(v), mv, 1e-14);
}

TEST(LookAt, FacingOriginFromPlusZIsIdentity) {
  EXPECT_EQ(look_at({0, 0, 5}, {0, 0, 0}, UnitVec3(kCameraUp)),
            Quaternion::identity());
}

TEST(LookAt, FromMinusZIsHalfTurnAboutY) {
  const Quaternion q = look_at({0, 0, -5}, {0, 0, 0}, UnitVec3(kCameraUp));
  EXPECT_NEAR(q.w, 0.0, 1e-15);
  EXPECT_NEAR(q.x, 0.0, 1e-15);
  EXPECT_NEAR(q.y, 1.0, 1e-15);
  EXPECT_NEAR(q.z, 0.0, 1e-15);
}

TEST(LookAt, Errors) {
  EXPECT_THROW(look_at({1, 1, 1}, {1, 1, 1}, UnitVec3(kCameraUp)),
               InvalidArgument);
  EXPECT_THROW(look_at({0, 5, 0}, {0, 0, 0}, UnitVec3(kCameraUp)),
               DegenerateLookAt);
}

TEST(LookAt, RandomPositionsAimAtOrigin) {
  RngStream rng(99);
  for (int i = 0; i < 1000; ++i) {
    const Vec3 p = 5.0 * marsaglia_sphere_point(rng).vec();
    const Quaternion q = look_at(p, {0, 0, 0}, UnitVec3(kCameraUp));
    EXPECT_NEAR(q.norm(), 1.0, 1e-9);
    const Vec3 fwd = q.rotate(kCameraForward);
    EXPECT_GT(dot(fwd, (-1.0 / norm(p)) * p), 1.0 - 1e-9);
    // Up stays in the plane spanned by forward and world up.
    const Vec3 up = q.rotate(kCameraUp);
    EXPECT_NEAR(dot(up, cross(fwd, kCameraUp)), 0.0, 1e-9);
  }
}

}  // namespace
}  // namespace polyscene::geom
