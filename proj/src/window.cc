#include "sfusion/window.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "sfusion/errors.h"

namespace sfusion {

void LabelFrame::validate() const {
  const std::size_t n = std::size_t(width) * height;
  if (labels.size() != n || scores.size() != n) {
    throw ConfigError("label frame: buffer size does not match dimensions");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (labels[i] >= class_count) {
      throw ConfigError("label frame: label " + std::to_string(labels[i]) +
                        " >= class_count " + std::to_string(class_count));
    }
    if (!(scores[i] >= 0.0f && scores[i] <= 1.0f)) {
      throw ConfigError("label frame: score outside [0,1]");
    }
  }
}

bool in_grid(const Vec3& c, const std::array<int, 3>& dims) {
  for (int a = 0; a < 3; ++a) {
    if (!(c[a] >= 0.0 && c[a] <= dims[a] - 1)) return false;
  }
  return true;
}

TrilinearCorners trilinear_corners(const VoxelVolume& volume, const Vec3& c) {
  const auto& dims = volume.dims();
  int lo[3];
  int hi[3];
  double frac[3];
  for (int a = 0; a < 3; ++a) {
    // A coordinate on the last lattice plane uses the cell below it with
    // fraction 1 so both corners stay inside the grid.
    int base = static_cast<int>(std::floor(c[a]));
    if (dims[a] == 1) {
      base = 0;
    } else if (base > dims[a] - 2) {
      base = dims[a] - 2;
    }
    lo[a] = base;
    hi[a] = std::min(base + 1, dims[a] - 1);
    frac[a] = c[a] - base;
  }
  TrilinearCorners out;
  for (int corner = 0; corner < 8; ++corner) {
    const int ox = (corner >> 2) & 1;
    const int oy = (corner >> 1) & 1;
    const int oz = corner & 1;
    out.index[corner] = volume.index(ox ? hi[0] : lo[0], oy ? hi[1] : lo[1],
                                     oz ? hi[2] : lo[2]);
    out.weight[corner] = (ox ? frac[0] : 1.0 - frac[0]) *
                         (oy ? frac[1] : 1.0 - frac[1]) *
                         (oz ? frac[2] : 1.0 - frac[2]);
  }
  return out;
}

std::size_t LocalWindow::valid_rays() const {
  return static_cast<std::size_t>(
      std::count(valid.begin(), valid.end(), std::uint8_t{1}));
}

LocalWindow extract(const VoxelVolume& volume, const DepthFrame& depth,
                    const Intrinsics& intr, const Pose& pose,
                    int window_size) {
  check_window_size(window_size);
  if (depth.width != intr.width() || depth.height != intr.height() ||
      depth.depth.size() != std::size_t(depth.width) * depth.height) {
    throw ConfigError("extract: depth frame " + std::to_string(depth.width) +
                      "x" + std::to_string(depth.height) +
                      " does not match intrinsics " +
                      std::to_string(intr.width()) + "x" +
                      std::to_string(intr.height()));
  }

  LocalWindow win;
  win.width = depth.width;
  win.height = depth.height;
  win.window_size = window_size;
  const std::size_t rays = win.ray_count();
  const std::size_t samples = win.sample_count();
  win.tsdf.assign(samples, 0.0f);
  win.weight.assign(samples, 0.0f);
  win.label.assign(samples, kUnlabeled);
  win.score.assign(samples, 0.0f);
  win.sample_coords.assign(samples, Vec3::Zero());
  win.sample_z.assign(samples, 0.0f);
  win.depth.assign(rays, 0.0f);
  win.valid.assign(rays, 0);

  const double spacing = volume.config().voxel_size;
  const int half = (window_size - 1) / 2;
  const auto& dims = volume.dims();

  for (int v = 0; v < win.height; ++v) {
    for (int u = 0; u < win.width; ++u) {
      const std::size_t ray = std::size_t(v) * win.width + u;
      const double d = depth.depth[ray];
      if (!(d > 0.0) || !std::isfinite(d)) continue;

      const Pixel px{u, v};
      const Vec3 cam_ray = intr.pixel_ray(px);
      const Vec3 center = pose.transform(cam_ray * d);
      const Vec3 dir = (pose.rotation() * cam_ray).normalized();
      const double dir_z = 1.0 / cam_ray.norm();

      bool ok = true;
      for (int k = 0; k < window_size && ok; ++k) {
        const Vec3 p =
            center + (static_cast<double>(k - half) * spacing) * dir;
        const Vec3 c = volume.world_to_voxel(p);
        const std::size_t s = win.sample_index(ray, k);
        win.sample_coords[s] = c;
        win.sample_z[s] = static_cast<float>(d + (k - half) * spacing * dir_z);
        ok = in_grid(c, dims);
      }
      if (!ok) {
        for (int k = 0; k < window_size; ++k) {
          const std::size_t s = win.sample_index(ray, k);
          win.sample_coords[s] = Vec3::Zero();
          win.sample_z[s] = 0.0f;
        }
        continue;
      }

      win.valid[ray] = 1;
      win.depth[ray] = static_cast<float>(d);
      for (int k = 0; k < window_size; ++k) {
        const std::size_t s = win.sample_index(ray, k);
        const TrilinearCorners tc =
            trilinear_corners(volume, win.sample_coords[s]);
        double tsdf = 0.0, weight = 0.0, score = 0.0;
        int best = 0;
        for (int c = 0; c < 8; ++c) {
          const double cw = tc.weight[c];
          tsdf += cw * volume.tsdf(tc.index[c]);
          weight += cw * volume.weight(tc.index[c]);
          score += cw * volume.score(tc.index[c]);
          if (cw > tc.weight[best]) best = c;
        }
        win.tsdf[s] = static_cast<float>(tsdf);
        win.weight[s] = static_cast<float>(weight);
        win.score[s] = static_cast<float>(score);
        win.label[s] = volume.label(tc.index[best]);
      }
    }
  }
  return win;
}

SplatAccumulator::SplatAccumulator(std::size_t voxel_count) {
  resize(voxel_count);
}

void SplatAccumulator::resize(std::size_t voxel_count) {
  sum_w_.assign(voxel_count, 0.0);
  sum_wv_.assign(voxel_count, 0.0);
  touched_.clear();
}

void SplatAccumulator::reset() {
  for (std::size_t i : touched_) {
    sum_w_[i] = 0.0;
    sum_wv_[i] = 0.0;
  }
  touched_.clear();
}

void splat(const VoxelVolume& volume, const LocalWindow& window,
           std::span<const float> updates,
           std::span<const float> update_weights, SplatAccumulator& acc) {
  if (updates.size() != window.sample_count() ||
      update_weights.size() != window.sample_count()) {
    throw ConfigError("splat: update arrays do not match window shape");
  }
  if (acc.capacity() != volume.size()) {
    acc.resize(volume.size());
  } else {
    acc.reset();
  }
  for (std::size_t ray = 0; ray < window.ray_count(); ++ray) {
    if (!window.valid[ray]) continue;
    for (int k = 0; k < window.window_size; ++k) {
      const std::size_t s = window.sample_index(ray, k);
      const double w = update_weights[s];
      if (!(w > 0.0)) continue;
      const double value = updates[s];
      const TrilinearCorners tc =
          trilinear_corners(volume, window.sample_coords[s]);
      for (int c = 0; c < 8; ++c) {
        acc.add(tc.index[c], w * tc.weight[c], value);
      }
    }
  }
}

SplatAccumulator splat(const VoxelVolume& volume, const LocalWindow& window,
                       std::span<const float> updates,
                       std::span<const float> update_weights) {
  SplatAccumulator acc(volume.size());
  splat(volume, window, updates, update_weights, acc);
  return acc;
}

}  // namespace sfusion
