#pragma once

#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace sfusion {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Mat4 = Eigen::Matrix4d;

struct Pixel {
  int u = 0;
  int v = 0;
};

// Pinhole camera, no distortion.
class Intrinsics {
 public:
  // Throws ConfigError unless fx, fy > 0 and the principal point lies inside
  // the image.
  Intrinsics(double fx, double fy, double cx, double cy, int width,
             int height);

  double fx() const { return fx_; }
  double fy() const { return fy_; }
  double cx() const { return cx_; }
  double cy() const { return cy_; }
  int width() const { return width_; }
  int height() const { return height_; }
  int pixel_count() const { return width_ * height_; }

  bool contains(Pixel p) const {
    return p.u >= 0 && p.v >= 0 && p.u < width_ && p.v < height_;
  }

  // Camera-frame direction through the pixel center with unit z component.
  Vec3 pixel_ray(Pixel p) const {
    return {(p.u - cx_) / fx_, (p.v - cy_) / fy_, 1.0};
  }

  bool operator==(const Intrinsics&) const = default;

 private:
  double fx_, fy_, cx_, cy_;
  int width_, height_;
};

// Rigid camera-to-world transform.
class Pose {
 public:
  Pose() : rotation_(Mat3::Identity()), translation_(Vec3::Zero()) {}
  // Throws ConfigError if `rotation` is not orthonormal with det +1 (1e-6).
  Pose(const Mat3& rotation, const Vec3& translation);

  static Pose identity() { return {}; }
  // Reads the upper 3x4 block; the bottom row must be (0 0 0 1).
  static Pose from_matrix(const Mat4& m);

  const Mat3& rotation() const { return rotation_; }
  const Vec3& translation() const { return translation_; }
  Mat4 matrix() const;

  Pose inverse() const;
  Pose operator*(const Pose& rhs) const;

  Vec3 transform(const Vec3& p) const { return rotation_ * p + translation_; }
  Vec3 inverse_transform(const Vec3& p) const {
    return rotation_.transpose() * (p - translation_);
  }

 private:
  Mat3 rotation_;
  Vec3 translation_;
};

struct Ray {
  Vec3 origin;
  Vec3 direction;  // unit length, world frame
  Pixel pixel;
};

struct Projection {
  double u;
  double v;
  double z;
};

// How a sensor stores depth: distance along the optical axis, or Euclidean
// distance from the camera center along the pixel ray.
enum class DepthKind { kZDepth, kRayLength };

// Converts a ray-length measurement at `pixel` into z-depth.
double to_z_depth(double ray_length, Pixel pixel, const Intrinsics& intr);

// Back-projects pixel at z-depth `depth` into world coordinates.
// Throws InvalidSampleError for depth <= 0 and BoundsError for pixels outside
// the image.
Vec3 unproject(Pixel pixel, double depth, const Intrinsics& intr,
               const Pose& pose);

// Throws BehindCameraError when the camera-frame z is not positive.
Projection project(const Vec3& world, const Intrinsics& intr,
                   const Pose& pose);

Ray pixel_ray(Pixel pixel, const Intrinsics& intr, const Pose& pose);

// T points along the viewing ray of `pixel`, spaced `spacing` metres apart
// and centered on the surface point at `depth`. Index (T-1)/2 is exactly
// unproject(pixel, depth). Throws ConfigError for even or non-positive T.
std::vector<Vec3> ray_samples(Pixel pixel, double depth,
                              const Intrinsics& intr, const Pose& pose,
                              int window_size, double spacing);

void check_window_size(int window_size);

}  // namespace sfusion
