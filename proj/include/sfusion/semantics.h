#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "sfusion/frame.h"
#include "sfusion/volume.h"
#include "sfusion/window.h"

namespace sfusion {

// Frame labels assigned to every sample of the window (H x W x T).
struct LiftedLabels {
  std::vector<ClassId> labels;
  std::vector<float> scores;
};

// Each sample of a valid ray takes its pixel's label and score; samples of
// invalid rays get (0, 0). Throws ConfigError if the frame and window sizes
// differ.
LiftedLabels lift_labels(const LabelFrame& frame, const LocalWindow& window);

// Highest-score incoming label per voxel for one frame. Ties go to the lowest
// ray index, which makes the result independent of processing order.
class LabelAccumulator {
 public:
  explicit LabelAccumulator(std::size_t voxel_count = 0);

  void resize(std::size_t voxel_count);
  void reset();
  void offer(std::size_t voxel, float score, ClassId label, std::uint32_t ray);

  const std::vector<std::size_t>& touched() const { return touched_; }
  float score(std::size_t voxel) const { return score_[voxel]; }
  ClassId label(std::size_t voxel) const { return label_[voxel]; }
  std::size_t capacity() const { return score_.size(); }

 private:
  std::vector<float> score_;  // < 0 while untouched
  std::vector<ClassId> label_;
  std::vector<std::uint32_t> ray_;
  std::vector<std::size_t> touched_;
};

// One application of the max-confidence rule to a single voxel:
// S' = max(s, S) and L' = l when s >= S, otherwise L' = L.
struct LabelState {
  ClassId label = kUnlabeled;
  float score = 0.0f;
  bool operator==(const LabelState&) const = default;
};
LabelState apply_label_update(LabelState prior, ClassId label, float score);

// Integrates lifted labels into the global label and score grids at every
// voxel that receives nonzero splat weight (update_weights * trilinear
// weight). Samples with score 0 carry no observation and are skipped.
// Returns the number of voxels whose state was examined.
std::size_t update_labels(VoxelVolume& volume, const LocalWindow& window,
                          const LiftedLabels& lifted,
                          std::span<const float> update_weights,
                          LabelAccumulator& acc);

std::size_t update_labels(VoxelVolume& volume, const LocalWindow& window,
                          const LiftedLabels& lifted,
                          std::span<const float> update_weights);

}  // namespace sfusion
