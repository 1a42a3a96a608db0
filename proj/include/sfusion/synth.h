#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "sfusion/frame.h"
#include "sfusion/geometry.h"
#include "sfusion/volume.h"

namespace sfusion {

// Solid half-space behind a plane; `normal` points into free space.
struct PlaneShape {
  Vec3 point = Vec3::Zero();
  Vec3 normal = Vec3::UnitZ();
};

struct SphereShape {
  Vec3 center = Vec3::Zero();
  double radius = 1.0;
};

// Axis-aligned box.
struct BoxShape {
  Vec3 center = Vec3::Zero();
  Vec3 half_extents = Vec3::Ones();
};

struct Primitive {
  std::variant<PlaneShape, SphereShape, BoxShape> shape;
  ClassId class_id = 1;
  std::string name;

  // Signed distance, positive outside the solid.
  double sdf(const Vec3& p) const;
};

// Union of primitives with the min-composed signed distance.
class AnalyticScene {
 public:
  AnalyticScene() = default;
  // Throws ConfigError for an empty list, a class id of 0, a non-positive
  // radius or extent, or a zero plane normal.
  explicit AnalyticScene(std::vector<Primitive> primitives);

  const std::vector<Primitive>& primitives() const { return primitives_; }
  double sdf(const Vec3& p) const;
  // Index of the primitive with the smallest |sdf| at p, lowest index on ties.
  std::size_t nearest_primitive(const Vec3& p) const;
  ClassId label_at(const Vec3& p) const {
    return primitives_[nearest_primitive(p)].class_id;
  }
  // Largest class id plus one (for id 0).
  int class_count() const;
  std::map<int, std::string> class_names() const;

 private:
  std::vector<Primitive> primitives_;
};

struct RenderedFrame {
  DepthFrame depth;
  LabelFrame labels;
};

struct RenderOptions {
  double max_range = 50.0;
  int max_steps = 2000;
  double hit_epsilon = 1e-7;
};

// Sphere traces every pixel ray against the scene. Pixels without a hit get
// depth 0 and label 0; hits get the nearest primitive's class with score 1.
RenderedFrame render_depth(const AnalyticScene& scene, const Intrinsics& intr,
                           const Pose& pose, const RenderOptions& opts = {});

struct NoiseModel {
  double gaussian_sigma = 0.0;
  // Scale sigma by depth^2 when set.
  bool depth_scaled = false;
  double outlier_rate = 0.0;
  double outlier_magnitude = 0.1;
  double dropout_rate = 0.0;
  std::uint64_t seed = 0;

  void validate() const;
  bool is_identity() const {
    return gaussian_sigma == 0.0 && outlier_rate == 0.0 &&
           dropout_rate == 0.0;
  }
};

// Named presets used by the CLI: "none", "default", "heavy".
NoiseModel noise_preset(const std::string& name, std::uint64_t seed);

// Per valid pixel, in this order: dropout to 0 with dropout_rate, else
// replace by depth +- outlier_magnitude with outlier_rate, else add Gaussian
// noise. `stream` selects an independent deterministic RNG stream (the frame
// index, typically). Results that would be non-positive become 0.
DepthFrame apply_noise(const DepthFrame& frame, const NoiseModel& model,
                       std::uint64_t stream = 0);

// Ground-truth volume: clamped scene SDF at voxel centers, weight 1, score 1,
// and the nearest primitive's class where |sdf| <= truncation (0 elsewhere).
VoxelVolume bake_gt_volume(const AnalyticScene& scene,
                           const VolumeConfig& config);

enum class TrajectoryKind { kOrbit, kLine, kRoomScan };

struct TrajectoryParams {
  TrajectoryKind kind = TrajectoryKind::kOrbit;
  int steps = 24;
  Vec3 target = Vec3::Zero();
  Vec3 up = Vec3::UnitZ();
  // Orbit: distance to target and elevation angle (radians) above the plane
  // orthogonal to `up`. Full turn over `steps`.
  double radius = 1.5;
  double elevation = 0.3;
  // Orbit only: when set, the elevation moves linearly from `elevation` to
  // this value over the sequence, giving a helix.
  std::optional<double> elevation_end;
  // Line: eye moves from start to end while looking at target.
  Vec3 start = Vec3(-1.0, -2.0, 0.5);
  Vec3 end = Vec3(1.0, -2.0, 0.5);
  // Room scan: eye circles `center` at `scan_radius` and looks outward,
  // pitched by `elevation`. Full turn over `steps`.
  Vec3 center = Vec3::Zero();
  double scan_radius = 0.1;
};

// Camera looking from `eye` towards `target` (x right, y down, z forward).
Pose look_at(const Vec3& eye, const Vec3& target, const Vec3& up);

std::vector<Pose> trajectory(const TrajectoryParams& params);

}  // namespace sfusion
