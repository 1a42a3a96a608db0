#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "sfusion/frame.h"
#include "sfusion/geometry.h"
#include "sfusion/volume.h"

namespace sfusion {

// The eight lattice neighbours of a continuous voxel coordinate together with
// their trilinear weights. Corner c has offset (c >> 2 & 1, c >> 1 & 1, c & 1).
struct TrilinearCorners {
  std::array<std::size_t, 8> index;
  std::array<double, 8> weight;
};

// True when every axis satisfies 0 <= coord <= dim - 1.
bool in_grid(const Vec3& voxel_coord, const std::array<int, 3>& dims);

// Requires in_grid(voxel_coord, volume.dims()).
TrilinearCorners trilinear_corners(const VoxelVolume& volume,
                                   const Vec3& voxel_coord);

// Camera-aligned H x W x T samples pulled out of the global grids. Sample k of
// the ray through pixel (u, v) lives at flat index (v * W + u) * T + k.
struct LocalWindow {
  int width = 0;
  int height = 0;
  int window_size = 0;  // T

  std::vector<float> tsdf;
  std::vector<float> weight;
  std::vector<ClassId> label;
  std::vector<float> score;
  std::vector<Vec3> sample_coords;  // continuous voxel coordinates
  std::vector<float> sample_z;      // camera-frame z of each sample
  std::vector<float> depth;         // H x W observed depth per ray
  std::vector<std::uint8_t> valid;  // H x W

  std::size_t ray_count() const { return std::size_t(width) * height; }
  std::size_t sample_count() const { return ray_count() * window_size; }
  std::size_t sample_index(std::size_t ray, int k) const {
    return ray * window_size + k;
  }
  std::size_t valid_rays() const;
};

// Reads tsdf, weight and score at every window sample by trilinear
// interpolation; the label is taken from the corner with the largest weight.
// Rays with depth <= 0 or any sample outside the grid are invalid and zeroed.
// Throws ConfigError on a size mismatch or an even T.
LocalWindow extract(const VoxelVolume& volume, const DepthFrame& depth,
                    const Intrinsics& intr, const Pose& pose,
                    int window_size);

// Per-voxel sums of splatted contributions for one frame. Backed by dense
// scratch arrays so it can be reused frame after frame; reset() only clears
// voxels that were touched.
class SplatAccumulator {
 public:
  explicit SplatAccumulator(std::size_t voxel_count = 0);

  void resize(std::size_t voxel_count);
  void reset();

  void add(std::size_t voxel, double weight, double value) {
    if (!(weight > 0.0)) return;
    if (sum_w_[voxel] == 0.0) touched_.push_back(voxel);
    sum_w_[voxel] += weight;
    sum_wv_[voxel] += weight * value;
  }

  // Voxels with positive accumulated weight, in first-touch order.
  const std::vector<std::size_t>& touched() const { return touched_; }
  double sum_w(std::size_t voxel) const { return sum_w_[voxel]; }
  double sum_wv(std::size_t voxel) const { return sum_wv_[voxel]; }
  std::size_t capacity() const { return sum_w_.size(); }

 private:
  std::vector<double> sum_w_;
  std::vector<double> sum_wv_;
  std::vector<std::size_t> touched_;
};

// Distributes every sample of every valid ray to its eight corners using the
// extraction weights: corner c receives update_weight * w_c into sum_w and
// update * update_weight * w_c into sum_wv. `acc` is reset first.
void splat(const VoxelVolume& volume, const LocalWindow& window,
           std::span<const float> updates,
           std::span<const float> update_weights, SplatAccumulator& acc);

SplatAccumulator splat(const VoxelVolume& volume, const LocalWindow& window,
                       std::span<const float> updates,
                       std::span<const float> update_weights);

}  // namespace sfusion
