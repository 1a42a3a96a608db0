#include "sfusion/synth.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "sfusion/errors.h"

namespace sfusion {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

double Primitive::sdf(const Vec3& p) const {
  return std::visit(
      Overloaded{
          [&](const PlaneShape& s) {
            return s.normal.normalized().dot(p - s.point);
          },
          [&](const SphereShape& s) { return (p - s.center).norm() - s.radius; },
          [&](const BoxShape& s) {
            const Vec3 q = (p - s.center).cwiseAbs() - s.half_extents;
            return q.cwiseMax(0.0).norm() + std::min(q.maxCoeff(), 0.0);
          }},
      shape);
}

AnalyticScene::AnalyticScene(std::vector<Primitive> primitives)
    : primitives_(std::move(primitives)) {
  if (primitives_.empty()) throw ConfigError("scene: no primitives");
  for (auto& prim : primitives_) {
    if (prim.class_id == kUnlabeled) {
      throw ConfigError("scene: primitive class id must be >= 1");
    }
    std::visit(Overloaded{[](PlaneShape& s) {
                            const double n = s.normal.norm();
                            if (!(n > 0.0)) {
                              throw ConfigError("scene: zero plane normal");
                            }
                            s.normal /= n;
                          },
                          [](const SphereShape& s) {
                            if (!(s.radius > 0.0)) {
                              throw ConfigError("scene: sphere radius <= 0");
                            }
                          },
                          [](const BoxShape& s) {
                            if (!(s.half_extents.minCoeff() > 0.0)) {
                              throw ConfigError("scene: box extent <= 0");
                            }
                          }},
               prim.shape);
  }
}

double AnalyticScene::sdf(const Vec3& p) const {
  double d = primitives_.front().sdf(p);
  for (std::size_t i = 1; i < primitives_.size(); ++i) {
    d = std::min(d, primitives_[i].sdf(p));
  }
  return d;
}

std::size_t AnalyticScene::nearest_primitive(const Vec3& p) const {
  std::size_t best = 0;
  double best_d = std::abs(primitives_.front().sdf(p));
  for (std::size_t i = 1; i < primitives_.size(); ++i) {
    const double d = std::abs(primitives_[i].sdf(p));
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

int AnalyticScene::class_count() const {
  int m = 0;
  for (const auto& p : primitives_) m = std::max(m, int(p.class_id));
  return m + 1;
}

std::map<int, std::string> AnalyticScene::class_names() const {
  std::map<int, std::string> names;
  for (const auto& p : primitives_) {
    if (!p.name.empty()) names.try_emplace(p.class_id, p.name);
  }
  return names;
}

RenderedFrame render_depth(const AnalyticScene& scene, const Intrinsics& intr,
                           const Pose& pose, const RenderOptions& opts) {
  RenderedFrame out{DepthFrame(intr.width(), intr.height()),
                    LabelFrame(intr.width(), intr.height(),
                               scene.class_count())};
  const Vec3 origin = pose.translation();
  for (int v = 0; v < intr.height(); ++v) {
    for (int u = 0; u < intr.width(); ++u) {
      const Vec3 cam_ray = intr.pixel_ray({u, v});
      const double ray_norm = cam_ray.norm();
      const Vec3 dir = pose.rotation() * (cam_ray / ray_norm);
      double t = 0.0;
      bool hit = false;
      for (int step = 0; step < opts.max_steps && t < opts.max_range;
           ++step) {
        const double d = scene.sdf(origin + t * dir);
        if (d < opts.hit_epsilon) {
          hit = true;
          break;
        }
        t += d;
      }
      if (!hit || t <= 0.0) continue;
      const std::size_t i = std::size_t(v) * intr.width() + u;
      out.depth.depth[i] = static_cast<float>(t / ray_norm);
      out.labels.labels[i] = scene.label_at(origin + t * dir);
      out.labels.scores[i] = 1.0f;
    }
  }
  return out;
}

void NoiseModel::validate() const {
  auto rate_ok = [](double r) { return r >= 0.0 && r <= 1.0; };
  if (!(gaussian_sigma >= 0.0)) throw ConfigError("noise: sigma must be >= 0");
  if (!rate_ok(outlier_rate) || !rate_ok(dropout_rate)) {
    throw ConfigError("noise: rates must lie in [0, 1]");
  }
  if (!(outlier_magnitude >= 0.0)) {
    throw ConfigError("noise: outlier_magnitude must be >= 0");
  }
}

NoiseModel noise_preset(const std::string& name, std::uint64_t seed) {
  NoiseModel m;
  m.seed = seed;
  if (name == "none") return m;
  if (name == "default") {
    m.gaussian_sigma = 0.005;
    m.outlier_rate = 0.005;
    m.outlier_magnitude = 0.1;
    m.dropout_rate = 0.01;
    return m;
  }
  if (name == "heavy") {
    m.gaussian_sigma = 0.01;
    m.outlier_rate = 0.01;
    m.outlier_magnitude = 0.1;
    m.dropout_rate = 0.02;
    return m;
  }
  throw ConfigError("unknown noise preset '" + name +
                    "' (expected none, default or heavy)");
}

DepthFrame apply_noise(const DepthFrame& frame, const NoiseModel& model,
                       std::uint64_t stream) {
  model.validate();
  DepthFrame out = frame;
  if (model.is_identity()) return out;
  std::mt19937_64 rng(splitmix64(model.seed ^ splitmix64(stream)));
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (float& d : out.depth) {
    if (!(d > 0.0f)) continue;
    const double u_drop = uniform(rng);
    const double u_out = uniform(rng);
    const double u_sign = uniform(rng);
    const double g = normal(rng);
    double noisy = d;
    if (u_drop < model.dropout_rate) {
      noisy = 0.0;
    } else if (u_out < model.outlier_rate) {
      noisy = d + (u_sign < 0.5 ? -1.0 : 1.0) * model.outlier_magnitude;
    } else {
      const double sigma =
          model.gaussian_sigma * (model.depth_scaled ? double(d) * d : 1.0);
      noisy = d + sigma * g;
    }
    d = noisy > 0.0 ? static_cast<float>(noisy) : 0.0f;
  }
  return out;
}

VoxelVolume bake_gt_volume(const AnalyticScene& scene,
                           const VolumeConfig& config) {
  VoxelVolume vol(config);
  const double trunc = config.truncation;
  const auto& dims = vol.dims();
  for (int x = 0; x < dims[0]; ++x) {
    for (int y = 0; y < dims[1]; ++y) {
      for (int z = 0; z < dims[2]; ++z) {
        const std::size_t i = vol.index(x, y, z);
        const Vec3 p = vol.voxel_center(x, y, z);
        const double d = scene.sdf(p);
        vol.set_tsdf(i, static_cast<float>(std::clamp(d, -trunc, trunc)));
        vol.set_weight(i, 1.0f);
        vol.set_score(i, 1.0f);
        vol.set_label(i, std::abs(d) <= trunc ? scene.label_at(p)
                                              : kUnlabeled);
      }
    }
  }
  return vol;
}

Pose look_at(const Vec3& eye, const Vec3& target, const Vec3& up) {
  const Vec3 forward = (target - eye).normalized();
  Vec3 right = forward.cross(up);
  if (right.norm() < 1e-9) {
    throw ConfigError("look_at: view direction parallel to up vector");
  }
  right.normalize();
  const Vec3 down = forward.cross(right);
  Mat3 r;
  r.col(0) = right;
  r.col(1) = down;
  r.col(2) = forward;
  return Pose(r, eye);
}

std::vector<Pose> trajectory(const TrajectoryParams& p) {
  if (p.steps < 1) throw ConfigError("trajectory: steps must be >= 1");
  const Vec3 up = p.up.normalized();
  // Orthonormal basis (e1, e2) of the plane orthogonal to `up`.
  Vec3 e1 = up.unitOrthogonal();
  const Vec3 e2 = up.cross(e1);
  std::vector<Pose> poses;
  poses.reserve(p.steps);
  for (int i = 0; i < p.steps; ++i) {
    const double angle = 2.0 * std::numbers::pi * i / p.steps;
    switch (p.kind) {
      case TrajectoryKind::kOrbit: {
        if (!(p.radius > 0.0)) {
          throw ConfigError("trajectory: orbit radius must be positive");
        }
        double elev = p.elevation;
        if (p.elevation_end && p.steps > 1) {
          elev += (*p.elevation_end - p.elevation) * i / (p.steps - 1);
        }
        const Vec3 dir = std::cos(elev) *
                             (std::cos(angle) * e1 + std::sin(angle) * e2) +
                         std::sin(elev) * up;
        poses.push_back(look_at(p.target + p.radius * dir, p.target, up));
        break;
      }
      case TrajectoryKind::kLine: {
        const double s = p.steps == 1 ? 0.0 : double(i) / (p.steps - 1);
        poses.push_back(look_at(p.start + s * (p.end - p.start), p.target, up));
        break;
      }
      case TrajectoryKind::kRoomScan: {
        const Vec3 radial = std::cos(angle) * e1 + std::sin(angle) * e2;
        const Vec3 eye = p.center + p.scan_radius * radial;
        const Vec3 look = std::cos(p.elevation) * radial +
                          std::sin(p.elevation) * up;
        poses.push_back(look_at(eye, eye + look, up));
        break;
      }
    }
  }
  return poses;
}

}  // namespace sfusion
