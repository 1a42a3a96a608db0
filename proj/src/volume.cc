#include "sfusion/volume.h"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "sfusion/errors.h"

namespace sfusion {

void VolumeConfig::validate() const {
  for (int d : dims) {
    if (d < 1) throw ConfigError("volume: every dimension must be >= 1");
  }
  if (!(voxel_size > 0.0)) {
    throw ConfigError("volume: voxel_size must be positive");
  }
  if (!(truncation >= voxel_size)) {
    throw ConfigError("volume: truncation must be >= voxel_size");
  }
  if (!origin.allFinite()) throw ConfigError("volume: origin not finite");
  if (class_count < 1 || class_count > 256) {
    throw ConfigError("volume: class_count must be in [1, 256]");
  }
  if (max_weight && !(*max_weight > 0.0)) {
    throw ConfigError("volume: max_weight must be positive when set");
  }
}

ScalarGrid::ScalarGrid(std::size_t size, StoragePrecision precision)
    : precision_(precision), size_(size) {
  if (precision == StoragePrecision::kHalf) {
    half_.assign(size, Eigen::half(0.0f));
  } else {
    single_.assign(size, 0.0f);
  }
}

std::size_t ScalarGrid::byte_size() const {
  return size_ * (precision_ == StoragePrecision::kHalf ? 2 : 4);
}

const std::uint8_t* ScalarGrid::bytes() const {
  return precision_ == StoragePrecision::kHalf
             ? reinterpret_cast<const std::uint8_t*>(half_.data())
             : reinterpret_cast<const std::uint8_t*>(single_.data());
}

std::uint8_t* ScalarGrid::mutable_bytes() {
  return precision_ == StoragePrecision::kHalf
             ? reinterpret_cast<std::uint8_t*>(half_.data())
             : reinterpret_cast<std::uint8_t*>(single_.data());
}

VoxelVolume::VoxelVolume(const VolumeConfig& config) : config_(config) {
  config_.validate();
  const std::size_t required = config_.required_bytes();
  if (required > config_.memory_budget_bytes) {
    throw AllocationRefusedError(required, config_.memory_budget_bytes);
  }
  const std::size_t n = config_.voxel_count();
  tsdf_ = ScalarGrid(n, config_.precision);
  weight_ = ScalarGrid(n, config_.precision);
  label_.assign(n, kUnlabeled);
  score_ = ScalarGrid(n, config_.precision);
}

std::array<int, 3> VoxelVolume::coords(std::size_t index) const {
  const int z = static_cast<int>(index % config_.dims[2]);
  index /= config_.dims[2];
  const int y = static_cast<int>(index % config_.dims[1]);
  const int x = static_cast<int>(index / config_.dims[1]);
  return {x, y, z};
}

float VoxelVolume::max_weight() const {
  float m = 0.0f;
  for (std::size_t i = 0; i < size(); ++i) m = std::max(m, weight_.get(i));
  return m;
}

VolumeStats snapshot_stats(const VoxelVolume& volume,
                           std::vector<double> bin_edges) {
  if (bin_edges.empty() || bin_edges.front() != 0.0 ||
      !std::is_sorted(bin_edges.begin(), bin_edges.end(),
                      std::less_equal<>())) {
    throw ConfigError(
        "histogram edges must start at 0 and be strictly increasing");
  }
  VolumeStats stats;
  stats.weight_histogram.counts.assign(bin_edges.size(), 0);
  for (std::size_t i = 0; i < volume.size(); ++i) {
    const float w = volume.weight(i);
    if (w > 0.0f) {
      ++stats.occupied_voxels;
      const auto it = std::upper_bound(bin_edges.begin(), bin_edges.end(),
                                       static_cast<double>(w));
      ++stats.weight_histogram.counts[(it - bin_edges.begin()) - 1];
    }
    if (volume.score(i) > 0.0f) ++stats.labeled_voxels;
  }
  stats.weight_histogram.edges = std::move(bin_edges);
  return stats;
}

std::optional<std::string> check_invariants(const VoxelVolume& volume) {
  const auto& cfg = volume.config();
  // Stored values are rounded, so the clamp band gets one storage ulp.
  const float trunc = static_cast<float>(cfg.truncation);
  const float trunc_stored =
      std::max(trunc, volume.tsdf_grid().round_trip(trunc));
  for (std::size_t i = 0; i < volume.size(); ++i) {
    const float v = volume.tsdf(i);
    const float w = volume.weight(i);
    const float s = volume.score(i);
    std::ostringstream msg;
    if (!std::isfinite(v) || std::abs(v) > trunc_stored) {
      msg << "tsdf " << v << " outside clamp band at voxel " << i;
    } else if (!std::isfinite(w) || w < 0.0f) {
      msg << "negative or non-finite weight " << w << " at voxel " << i;
    } else if (!(s >= 0.0f && s <= 1.0f)) {
      msg << "score " << s << " outside [0,1] at voxel " << i;
    } else if (s == 0.0f && volume.label(i) != kUnlabeled) {
      msg << "label " << int(volume.label(i)) << " with zero score at voxel "
          << i;
    } else if (volume.label(i) >= cfg.class_count) {
      msg << "label " << int(volume.label(i)) << " >= class_count at voxel "
          << i;
    } else {
      continue;
    }
    return msg.str();
  }
  return std::nullopt;
}

}  // namespace sfusion
