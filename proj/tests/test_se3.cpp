#include <gtest/gtest.h>

#include <numbers>

#include "riseg/errors.hpp"
#include "riseg/se3.hpp"
#include "support.hpp"

namespace riseg {
namespace {

using se3::Pose;
using se3::Vec3;

void expect_near(const Vec3& a, const Vec3& b, double tol) {
  EXPECT_NEAR((a - b).lpNorm<Eigen::Infinity>(), 0.0, tol) << a.transpose() << " vs " << b.transpose();
}

TEST(Compose, IdentityAndTranslations) {
  const Pose id = Pose::identity() * Pose::identity();
  EXPECT_TRUE(id.rotation.isIdentity(0.0));
  EXPECT_TRUE(id.translation.isZero(0.0));

  const Pose t = Pose::from_translation({1, 0, 0}) * Pose::from_translation({0, 2, 0});
  expect_near(t.translation, {1, 2, 0}, 0.0);
}

TEST(Compose, RightOperandAppliedFirst) {
  const Pose p = Pose::rot_z(std::numbers::pi / 2) * Pose::from_translation({1, 0, 0});
  expect_near(p.translation, {0, 1, 0}, 1e-15);
  const Pose m = Pose::from_matrix(Pose::rot_z(0.3).matrix() * Pose::from_translation({0.2, -1, 3}).matrix());
  const Pose c = Pose::rot_z(0.3) * Pose::from_translation({0.2, -1, 3});
  EXPECT_TRUE(c.matrix().isApprox(m.matrix(), 1e-14));
}

TEST(Compose, ClosedUnderInverse) {
  Rng rng(4);
  for (int i = 0; i < 50; ++i) {
    const Pose a = testing::random_pose(rng), b = testing::random_pose(rng);
    const Pose ab = a * b;
    EXPECT_TRUE(ab.is_valid());
    EXPECT_TRUE((ab * ab.inverse()).matrix().isIdentity(1e-12));
  }
}

TEST(FrameFromTriplet, AxisAligned) {
  const Pose f = se3::frame_from_triplet({0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {1e-8, 2.0});
  EXPECT_TRUE(f.rotation.isIdentity(1e-15));
  EXPECT_TRUE(f.translation.isZero(0.0));
}

TEST(FrameFromTriplet, Collinear) {
  try {
    se3::frame_from_triplet({0, 0, 0}, {1e-12, 0, 0}, {2e-12, 0, 0});
    FAIL() << "no throw";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::CollinearTriplet);
  }
}

TEST(FrameFromTriplet, TooWide) {
  try {
    se3::frame_from_triplet({0, 0, 0}, {0.05, 0, 0}, {0, 0.01, 0});
    FAIL() << "no throw";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::TripletTooWide);
  }
}

TEST(FrameFromTriplet, EquivariantUnderRigidTransforms) {
  Rng rng(11);
  for (int i = 0; i < 200; ++i) {
    const auto t = testing::random_triplet(rng);
    const Pose g = testing::random_pose(rng);
    const Pose moved = se3::frame_from_triplet(g.apply(t[0]), g.apply(t[1]), g.apply(t[2]));
    const Pose expected = g * se3::frame_from_triplet(t[0], t[1], t[2]);
    EXPECT_TRUE(moved.matrix().isApprox(expected.matrix(), 1e-9)) << i;
    EXPECT_TRUE(moved.is_valid());
  }
}

TEST(SpatialTwist, NoMotion) {
  const Pose f = Pose::rot_z(0.4, {0.1, 0.2, 0});
  const auto xi = se3::spatial_twist(f, f, 1.0);
  EXPECT_TRUE(xi.angular.isZero(0.0));
  EXPECT_TRUE(xi.linear.isZero(0.0));
}

TEST(SpatialTwist, PureTranslation) {
  const Pose f = Pose::rot_z(-1.1, {0.3, 0.0, 0});
  const Pose g = Pose::from_translation({0.01, 0, 0}) * f;
  const auto xi = se3::spatial_twist(f, g, 1.0);
  expect_near(xi.angular, {0, 0, 0}, 1e-15);
  expect_near(xi.linear, {0.01, 0, 0}, 1e-15);
}

TEST(SpatialTwist, RotationAboutOffsetAxis) {
  // 0.1 rad about z through (1, 2, 0): v = -w x q = (0.2, -0.1, 0).
  const Vec3 q(1, 2, 0);
  const Pose d = Pose::from_translation(q) * Pose::rot_z(0.1) * Pose::from_translation(-q);
  const Pose f = Pose::rot_z(0.7, {0.5, -0.3, 0});
  const auto xi = se3::spatial_twist(f, d * f, 1.0);
  expect_near(xi.angular, {0, 0, 0.1}, 1e-12);
  expect_near(xi.linear, {0.2, -0.1, 0}, 1e-12);
}

TEST(SpatialTwist, ScalesWithDt) {
  const Pose f = Pose::identity();
  const Pose g = Pose::rot_z(0.2, {0.04, 0.01, 0});
  const auto a = se3::spatial_twist(f, g, 1.0), b = se3::spatial_twist(f, g, 2.0);
  EXPECT_TRUE((a.vector() - 2.0 * b.vector()).isZero(1e-15));
}

TEST(SpatialTwist, Errors) {
  const Pose f = Pose::identity();
  try {
    se3::spatial_twist(f, f, 0.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DegenerateDt);
  }
  try {
    se3::spatial_twist(f, Pose::rot_z(std::numbers::pi), 1.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::RotationNearPi);
  }
}

TEST(SpatialTwist, SameForEveryFrameOnABody) {
  Rng rng(21);
  for (int i = 0; i < 300; ++i) {
    const Pose d = testing::random_pose(rng);
    const Pose a = testing::random_pose(rng), b = testing::random_pose(rng);
    const auto xa = se3::spatial_twist(a, d * a, 1.0).vector();
    const auto xb = se3::spatial_twist(b, d * b, 1.0).vector();
    EXPECT_LE((xa - xb).lpNorm<Eigen::Infinity>(), 1e-9) << i;
  }
}

TEST(SpatialTwist, DistinctMotionsStayApart) {
  Rng rng(22);
  for (int i = 0; i < 300; ++i) {
    const Pose d1 = testing::random_pose(rng, 0.5, 0.1), d2 = testing::random_pose(rng, 0.5, 0.1);
    const double gap = (se3::log_pose(d1).vector() - se3::log_pose(d2).vector()).norm();
    const Pose a = testing::random_pose(rng), b = testing::random_pose(rng);
    const double got =
        (se3::spatial_twist(a, d1 * a, 1.0).vector() - se3::spatial_twist(b, d2 * b, 1.0).vector()).norm();
    EXPECT_GT(got, gap / 2);
  }
}

TEST(SpatialTwist, DifferenceMethodsAgreeForSmallRotations) {
  Rng rng(23);
  for (int i = 0; i < 300; ++i) {
    const Pose d = testing::random_pose(rng, 0.05, 0.02);
    const Pose f = testing::random_pose(rng, 3.0, 0.3);
    const auto log = se3::spatial_twist(f, d * f, 1.0, se3::TwistMethod::MatrixLog).vector();
    const auto fd = se3::spatial_twist(f, d * f, 1.0, se3::TwistMethod::FiniteDifference).vector();
    EXPECT_LE((log - fd).lpNorm<Eigen::Infinity>(), 1e-4) << i;
  }
}

TEST(ExpLog, RoundTrip) {
  Rng rng(24);
  for (int i = 0; i < 200; ++i) {
    const Pose p = testing::random_pose(rng);
    EXPECT_TRUE(se3::exp_twist(se3::log_pose(p)).matrix().isApprox(p.matrix(), 1e-10));
  }
}

}  // namespace
}  // namespace riseg
