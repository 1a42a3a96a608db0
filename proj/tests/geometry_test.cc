#include "sfusion/geometry.h"

#include <random>

#include <gtest/gtest.h>

#include "sfusion/errors.h"
#include "test_util.h"

namespace sfusion {
namespace {

const Intrinsics kIntr(500.0, 480.0, 320.0, 240.0, 640, 480);

TEST(IntrinsicsTest, RejectsInvalidParameters) {
  EXPECT_THROW(Intrinsics(0.0, 1.0, 1, 1, 4, 4), ConfigError);
  EXPECT_THROW(Intrinsics(1.0, -1.0, 1, 1, 4, 4), ConfigError);
  EXPECT_THROW(Intrinsics(1.0, 1.0, 4.0, 1, 4, 4), ConfigError);
  EXPECT_THROW(Intrinsics(1.0, 1.0, 1, -0.5, 4, 4), ConfigError);
  EXPECT_THROW(Intrinsics(1.0, 1.0, 0, 0, 0, 4), ConfigError);
  EXPECT_NO_THROW(Intrinsics(1.0, 1.0, 0, 0, 4, 4));
}

TEST(PoseTest, RejectsNonRotation) {
  Mat3 r = Mat3::Identity();
  r(0, 0) = 1.001;
  EXPECT_THROW(Pose(r, Vec3::Zero()), ConfigError);
  EXPECT_THROW(Pose(-Mat3::Identity(), Vec3::Zero()), ConfigError);
  Mat4 m = Mat4::Identity();
  m(3, 0) = 0.5;
  EXPECT_THROW(Pose::from_matrix(m), ConfigError);
}

TEST(PoseTest, ComposeWithInverseIsIdentity) {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 100; ++i) {
    const Pose p = testing::random_pose(rng);
    const Mat4 a = (p * p.inverse()).matrix();
    const Mat4 b = (p.inverse() * p).matrix();
    EXPECT_LT((a - Mat4::Identity()).cwiseAbs().maxCoeff(), 1e-9);
    EXPECT_LT((b - Mat4::Identity()).cwiseAbs().maxCoeff(), 1e-9);
  }
}

TEST(PoseTest, MatrixRoundTrip) {
  std::mt19937_64 rng(2);
  const Pose p = testing::random_pose(rng);
  const Pose q = Pose::from_matrix(p.matrix());
  EXPECT_EQ(p.matrix(), q.matrix());
}

TEST(UnprojectTest, PrincipalRay) {
  const Vec3 p = unproject({320, 240}, 1.0, kIntr, Pose::identity());
  EXPECT_DOUBLE_EQ(p.x(), 0.0);
  EXPECT_DOUBLE_EQ(p.y(), 0.0);
  EXPECT_DOUBLE_EQ(p.z(), 1.0);
}

TEST(UnprojectTest, FortyFiveDegreeRay) {
  const Intrinsics intr(100.0, 100.0, 50.0, 50.0, 200, 100);
  const Vec3 p = unproject({150, 50}, 2.0, intr, Pose::identity());
  EXPECT_NEAR(p.x(), 2.0, 1e-12);
  EXPECT_NEAR(p.y(), 0.0, 1e-12);
  EXPECT_NEAR(p.z(), 2.0, 1e-12);
}

TEST(UnprojectTest, Errors) {
  EXPECT_THROW(unproject({1, 1}, 0.0, kIntr, Pose()), InvalidSampleError);
  EXPECT_THROW(unproject({1, 1}, -1.0, kIntr, Pose()), InvalidSampleError);
  EXPECT_THROW(unproject({640, 1}, 1.0, kIntr, Pose()), BoundsError);
  EXPECT_THROW(unproject({1, -1}, 1.0, kIntr, Pose()), BoundsError);
}

TEST(ProjectTest, OriginAxisPoint) {
  const Projection p = project({0, 0, 1}, kIntr, Pose::identity());
  EXPECT_DOUBLE_EQ(p.u, 320.0);
  EXPECT_DOUBLE_EQ(p.v, 240.0);
  EXPECT_DOUBLE_EQ(p.z, 1.0);
}

TEST(ProjectTest, BehindCamera) {
  EXPECT_THROW(project({0, 0, -0.5}, kIntr, Pose::identity()),
               BehindCameraError);
  EXPECT_THROW(project({0, 0, 0}, kIntr, Pose::identity()),
               BehindCameraError);
}

TEST(ProjectTest, RoundTripWithRandomPoses) {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> u(0, 639), v(0, 479);
  std::uniform_real_distribution<double> d(0.1, 10.0);
  for (int i = 0; i < 1000; ++i) {
    const Pose pose = testing::random_pose(rng);
    const Pixel px{u(rng), v(rng)};
    const double depth = d(rng);
    const Projection p = project(unproject(px, depth, kIntr, pose), kIntr, pose);
    EXPECT_NEAR(p.u, px.u, 1e-6);
    EXPECT_NEAR(p.v, px.v, 1e-6);
    EXPECT_NEAR(p.z, depth, 1e-6);
  }
}

TEST(ProjectTest, FixedPixelRoundTrip) {
  std::mt19937_64 rng(4);
  const Pose pose = testing::random_pose(rng);
  const Projection p =
      project(unproject({100, 80}, 1.7, kIntr, pose), kIntr, pose);
  EXPECT_NEAR(p.u, 100.0, 1e-6);
  EXPECT_NEAR(p.v, 80.0, 1e-6);
  EXPECT_NEAR(p.z, 1.7, 1e-6);
}

TEST(PixelRayTest, UnitDirectionThroughUnprojectedPoint) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 100; ++i) {
    const Pose pose = testing::random_pose(rng);
    const Ray r = pixel_ray({17, 400}, kIntr, pose);
    EXPECT_NEAR(r.direction.norm(), 1.0, 1e-9);
    const Vec3 p = unproject({17, 400}, 3.0, kIntr, pose);
    EXPECT_LT((p - r.origin).normalized().cross(r.direction).norm(), 1e-9);
    EXPECT_GT((p - r.origin).dot(r.direction), 0.0);
  }
}

TEST(ZDepthTest, RayLengthConversion) {
  const Intrinsics intr(100.0, 100.0, 50.0, 50.0, 200, 100);
  EXPECT_DOUBLE_EQ(to_z_depth(2.0, {50, 50}, intr), 2.0);
  EXPECT_NEAR(to_z_depth(std::sqrt(8.0), {150, 50}, intr), 2.0, 1e-12);
}

TEST(RaySamplesTest, SingleSampleIsUnprojectedPoint) {
  std::mt19937_64 rng(6);
  const Pose pose = testing::random_pose(rng);
  const auto s = ray_samples({5, 6}, 1.3, kIntr, pose, 1, 0.01);
  ASSERT_EQ(s.size(), 1u);
  EXPECT_EQ(s[0], unproject({5, 6}, 1.3, kIntr, pose));
}

TEST(RaySamplesTest, SpacingCenterAndCollinearity) {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> u(0, 639), v(0, 479);
  std::uniform_real_distribution<double> d(0.2, 5.0);
  for (int i = 0; i < 100; ++i) {
    const Pose pose = testing::random_pose(rng);
    const Pixel px{u(rng), v(rng)};
    const double depth = d(rng);
    const auto s = ray_samples(px, depth, kIntr, pose, 9, 0.01);
    ASSERT_EQ(s.size(), 9u);
    EXPECT_EQ(s[4], unproject(px, depth, kIntr, pose));
    for (int k = 0; k + 1 < 9; ++k) {
      EXPECT_NEAR((s[k + 1] - s[k]).norm(), 0.01, 1e-9);
    }
    for (int k = 0; k + 2 < 9; ++k) {
      const Vec3 a = (s[k + 1] - s[k]).normalized();
      const Vec3 b = (s[k + 2] - s[k + 1]).normalized();
      EXPECT_LT(a.cross(b).norm(), 1e-9);
    }
    // Samples move away from the camera with k.
    const Vec3 c = pose.translation();
    EXPECT_LT((s[0] - c).norm(), (s[8] - c).norm());
  }
}

TEST(RaySamplesTest, RejectsEvenOrNonPositiveWindow) {
  EXPECT_THROW(ray_samples({1, 1}, 1.0, kIntr, Pose(), 8, 0.01), ConfigError);
  EXPECT_THROW(ray_samples({1, 1}, 1.0, kIntr, Pose(), 0, 0.01), ConfigError);
  EXPECT_THROW(ray_samples({1, 1}, -1.0, kIntr, Pose(), 9, 0.01),
               InvalidSampleError);
}

}  // namespace
}  // namespace sfusion
