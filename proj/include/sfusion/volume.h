#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "sfusion/geometry.h"

namespace sfusion {

enum class StoragePrecision : std::uint8_t { kHalf = 0, kSingle = 1 };

using ClassId = std::uint8_t;
inline constexpr ClassId kUnlabeled = 0;

struct VolumeConfig {
  std::array<int, 3> dims{1, 1, 1};
  double voxel_size = 0.01;
  // World position of the center of voxel (0, 0, 0).
  Vec3 origin = Vec3::Zero();
  double truncation = 0.05;
  StoragePrecision precision = StoragePrecision::kHalf;
  // Number of class ids in use, including 0 (unlabeled).
  int class_count = 256;
  std::optional<double> max_weight;
  std::size_t memory_budget_bytes = std::size_t{4} << 30;

  // Throws ConfigError on the first violated invariant.
  void validate() const;

  std::size_t voxel_count() const {
    return static_cast<std::size_t>(dims[0]) * dims[1] * dims[2];
  }
  // tsdf + weight + score at storage precision, plus one byte of label.
  std::size_t bytes_per_voxel() const {
    const std::size_t s = precision == StoragePrecision::kHalf ? 2 : 4;
    return 3 * s + 1;
  }
  std::size_t required_bytes() const { return voxel_count() * bytes_per_voxel(); }
};

// A scalar grid that is stored at half or single precision and read back as
// float.
class ScalarGrid {
 public:
  ScalarGrid() = default;
  ScalarGrid(std::size_t size, StoragePrecision precision);

  StoragePrecision precision() const { return precision_; }
  std::size_t size() const { return size_; }

  float get(std::size_t i) const {
    return precision_ == StoragePrecision::kHalf ? static_cast<float>(half_[i])
                                                 : single_[i];
  }
  void set(std::size_t i, float value) {
    if (precision_ == StoragePrecision::kHalf) {
      half_[i] = Eigen::half(value);
    } else {
      single_[i] = value;
    }
  }
  // Value as it would read back after being stored.
  float round_trip(float value) const {
    return precision_ == StoragePrecision::kHalf
               ? static_cast<float>(Eigen::half(value))
               : value;
  }

  // Raw little-endian storage bytes, for checkpoints.
  std::size_t byte_size() const;
  const std::uint8_t* bytes() const;
  std::uint8_t* mutable_bytes();

 private:
  StoragePrecision precision_ = StoragePrecision::kSingle;
  std::size_t size_ = 0;
  std::vector<Eigen::half> half_;
  std::vector<float> single_;
};

// Dense global grids: TSDF, fusion weight, class label and label score.
//
// Linear order is z-fastest: index = (x * Y + y) * Z + z. Fresh volumes are
// all zero; weight 0 means "unknown". Only one writer may mutate a volume at
// a time, concurrent const access is fine.
class VoxelVolume {
 public:
  // Throws ConfigError for an invalid config and AllocationRefusedError if
  // the grids would exceed config.memory_budget_bytes.
  explicit VoxelVolume(const VolumeConfig& config);

  const VolumeConfig& config() const { return config_; }
  std::size_t size() const { return config_.voxel_count(); }
  const std::array<int, 3>& dims() const { return config_.dims; }

  std::size_t index(int x, int y, int z) const {
    return (static_cast<std::size_t>(x) * config_.dims[1] + y) *
               config_.dims[2] +
           z;
  }
  std::array<int, 3> coords(std::size_t index) const;
  bool in_bounds(int x, int y, int z) const {
    return x >= 0 && y >= 0 && z >= 0 && x < config_.dims[0] &&
           y < config_.dims[1] && z < config_.dims[2];
  }

  Vec3 world_to_voxel(const Vec3& world) const {
    return (world - config_.origin) / config_.voxel_size;
  }
  Vec3 voxel_to_world(const Vec3& voxel) const {
    return config_.origin + voxel * config_.voxel_size;
  }
  Vec3 voxel_center(int x, int y, int z) const {
    return voxel_to_world(Vec3(x, y, z));
  }

  float tsdf(std::size_t i) const { return tsdf_.get(i); }
  float weight(std::size_t i) const { return weight_.get(i); }
  ClassId label(std::size_t i) const { return label_[i]; }
  float score(std::size_t i) const { return score_.get(i); }

  // Raw writers. Integration and semantic updates are the intended callers;
  // loaders and the ground-truth baker also use them.
  void set_tsdf(std::size_t i, float v) { tsdf_.set(i, v); }
  void set_weight(std::size_t i, float w) { weight_.set(i, w); }
  void set_label(std::size_t i, ClassId l) { label_[i] = l; }
  void set_score(std::size_t i, float s) { score_.set(i, s); }

  const ScalarGrid& tsdf_grid() const { return tsdf_; }
  const ScalarGrid& weight_grid() const { return weight_; }
  const ScalarGrid& score_grid() const { return score_; }
  const std::vector<ClassId>& label_grid() const { return label_; }
  ScalarGrid& mutable_tsdf_grid() { return tsdf_; }
  ScalarGrid& mutable_weight_grid() { return weight_; }
  ScalarGrid& mutable_score_grid() { return score_; }
  std::vector<ClassId>& mutable_label_grid() { return label_; }

  float max_weight() const;

 private:
  VolumeConfig config_;
  ScalarGrid tsdf_;
  ScalarGrid weight_;
  std::vector<ClassId> label_;
  ScalarGrid score_;
};

struct WeightHistogram {
  // Bin i covers [edges[i], edges[i+1]); the last bin is open-ended.
  std::vector<double> edges;
  std::vector<std::size_t> counts;
};

struct VolumeStats {
  std::size_t occupied_voxels = 0;  // weight > 0
  std::size_t labeled_voxels = 0;   // score > 0
  WeightHistogram weight_histogram;
};

// `bin_edges` must start at 0 and be strictly increasing.
VolumeStats snapshot_stats(const VoxelVolume& volume,
                           std::vector<double> bin_edges = {0, 1, 2, 4, 8,
                                                            16, 32, 64});

// Returns a description of the first grid invariant violated, if any.
std::optional<std::string> check_invariants(const VoxelVolume& volume);

}  // namespace sfusion
