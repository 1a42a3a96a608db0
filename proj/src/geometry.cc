#include "sfusion/geometry.h"

#include <cmath>
#include <string>

#include "sfusion/errors.h"

namespace sfusion {

Intrinsics::Intrinsics(double fx, double fy, double cx, double cy, int width,
                       int height)
    : fx_(fx), fy_(fy), cx_(cx), cy_(cy), width_(width), height_(height) {
  if (!(fx > 0.0) || !(fy > 0.0)) {
    throw ConfigError("intrinsics: focal lengths must be positive");
  }
  if (width <= 0 || height <= 0) {
    throw ConfigError("intrinsics: image size must be positive");
  }
  if (!(cx >= 0.0 && cx < width && cy >= 0.0 && cy < height)) {
    throw ConfigError("intrinsics: principal point outside the image");
  }
}

Pose::Pose(const Mat3& rotation, const Vec3& translation)
    : rotation_(rotation), translation_(translation) {
  if (!rotation.allFinite() || !translation.allFinite()) {
    throw ConfigError("pose: non-finite entries");
  }
  const double ortho_err =
      (rotation.transpose() * rotation - Mat3::Identity()).cwiseAbs().maxCoeff();
  if (ortho_err > 1e-6 || std::abs(rotation.determinant() - 1.0) > 1e-6) {
    throw ConfigError("pose: rotation is not a proper orthonormal matrix");
  }
}

Pose Pose::from_matrix(const Mat4& m) {
  if (!m.allFinite()) throw ConfigError("pose: non-finite entries");
  if (m.row(3).cwiseAbs().head<3>().maxCoeff() > 1e-9 ||
      std::abs(m(3, 3) - 1.0) > 1e-9) {
    throw ConfigError("pose: bottom row must be 0 0 0 1");
  }
  return Pose(m.topLeftCorner<3, 3>(), m.topRightCorner<3, 1>());
}

Mat4 Pose::matrix() const {
  Mat4 m = Mat4::Identity();
  m.topLeftCorner<3, 3>() = rotation_;
  m.topRightCorner<3, 1>() = translation_;
  return m;
}

Pose Pose::inverse() const {
  Pose inv;
  inv.rotation_ = rotation_.transpose();
  inv.translation_ = -(inv.rotation_ * translation_);
  return inv;
}

Pose Pose::operator*(const Pose& rhs) const {
  Pose out;
  out.rotation_ = rotation_ * rhs.rotation_;
  out.translation_ = rotation_ * rhs.translation_ + translation_;
  return out;
}

double to_z_depth(double ray_length, Pixel pixel, const Intrinsics& intr) {
  return ray_length / intr.pixel_ray(pixel).norm();
}

Vec3 unproject(Pixel pixel, double depth, const Intrinsics& intr,
               const Pose& pose) {
  if (!(depth > 0.0)) {
    throw InvalidSampleError("unproject: depth must be positive, got " +
                             std::to_string(depth));
  }
  if (!intr.contains(pixel)) {
    throw BoundsError("unproject: pixel (" + std::to_string(pixel.u) + ", " +
                      std::to_string(pixel.v) + ") outside image");
  }
  return pose.transform(intr.pixel_ray(pixel) * depth);
}

Projection project(const Vec3& world, const Intrinsics& intr,
                   const Pose& pose) {
  const Vec3 c = pose.inverse_transform(world);
  if (!(c.z() > 0.0)) {
    throw BehindCameraError("project: point behind camera (z = " +
                            std::to_string(c.z()) + ")");
  }
  return {intr.fx() * c.x() / c.z() + intr.cx(),
          intr.fy() * c.y() / c.z() + intr.cy(), c.z()};
}

Ray pixel_ray(Pixel pixel, const Intrinsics& intr, const Pose& pose) {
  if (!intr.contains(pixel)) {
    throw BoundsError("pixel_ray: pixel outside image");
  }
  return {pose.translation(),
          (pose.rotation() * intr.pixel_ray(pixel)).normalized(), pixel};
}

void check_window_size(int window_size) {
  if (window_size < 1 || window_size % 2 == 0) {
    throw ConfigError("window size T must be a positive odd number, got " +
                      std::to_string(window_size));
  }
}

std::vector<Vec3> ray_samples(Pixel pixel, double depth,
                              const Intrinsics& intr, const Pose& pose,
                              int window_size, double spacing) {
  check_window_size(window_size);
  const Vec3 center = unproject(pixel, depth, intr, pose);
  const Vec3 dir = (pose.rotation() * intr.pixel_ray(pixel)).normalized();
  const int half = (window_size - 1) / 2;
  std::vector<Vec3> out;
  out.reserve(window_size);
  for (int k = 0; k < window_size; ++k) {
    out.push_back(center + (static_cast<double>(k - half) * spacing) * dir);
  }
  return out;
}

}  // namespace sfusion
