#include "sfusion/semantics.h"

#include "sfusion/errors.h"

namespace sfusion {

LiftedLabels lift_labels(const LabelFrame& frame, const LocalWindow& window) {
  if (frame.width != window.width || frame.height != window.height ||
      frame.labels.size() != window.ray_count() ||
      frame.scores.size() != window.ray_count()) {
    throw ConfigError("lift_labels: label frame does not match window size");
  }
  LiftedLabels out;
  out.labels.assign(window.sample_count(), kUnlabeled);
  out.scores.assign(window.sample_count(), 0.0f);
  for (std::size_t ray = 0; ray < window.ray_count(); ++ray) {
    if (!window.valid[ray]) continue;
    for (int k = 0; k < window.window_size; ++k) {
      const std::size_t s = window.sample_index(ray, k);
      out.labels[s] = frame.labels[ray];
      out.scores[s] = frame.scores[ray];
    }
  }
  return out;
}

LabelAccumulator::LabelAccumulator(std::size_t voxel_count) {
  resize(voxel_count);
}

void LabelAccumulator::resize(std::size_t voxel_count) {
  score_.assign(voxel_count, -1.0f);
  label_.assign(voxel_count, kUnlabeled);
  ray_.assign(voxel_count, 0);
  touched_.clear();
}

void LabelAccumulator::reset() {
  for (std::size_t i : touched_) score_[i] = -1.0f;
  touched_.clear();
}

void LabelAccumulator::offer(std::size_t voxel, float score, ClassId label,
                             std::uint32_t ray) {
  float& best = score_[voxel];
  if (best < 0.0f) {
    touched_.push_back(voxel);
  } else if (!(score > best || (score == best && ray < ray_[voxel]))) {
    return;
  }
  best = score;
  label_[voxel] = label;
  ray_[voxel] = ray;
}

LabelState apply_label_update(LabelState prior, ClassId label, float score) {
  LabelState next = prior;
  if (score >= prior.score) {
    next.label = label;
    next.score = score;
  }
  return next;
}

std::size_t update_labels(VoxelVolume& volume, const LocalWindow& window,
                          const LiftedLabels& lifted,
                          std::span<const float> update_weights,
                          LabelAccumulator& acc) {
  if (lifted.labels.size() != window.sample_count() ||
      lifted.scores.size() != window.sample_count() ||
      update_weights.size() != window.sample_count()) {
    throw ConfigError("update_labels: inputs do not match window shape");
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
      const float score = lifted.scores[s];
      if (!(update_weights[s] > 0.0f) || !(score > 0.0f)) continue;
      const TrilinearCorners tc =
          trilinear_corners(volume, window.sample_coords[s]);
      for (int c = 0; c < 8; ++c) {
        if (tc.weight[c] > 0.0) {
          acc.offer(tc.index[c], score, lifted.labels[s],
                    static_cast<std::uint32_t>(ray));
        }
      }
    }
  }

  const ScalarGrid& score_grid = volume.score_grid();
  for (std::size_t voxel : acc.touched()) {
    const LabelState prior{volume.label(voxel), volume.score(voxel)};
    // Compare against the score as it will be stored, so a repeated update
    // is a no-op under half precision.
    const float incoming = score_grid.round_trip(acc.score(voxel));
    const LabelState next =
        apply_label_update(prior, acc.label(voxel), incoming);
    if (next != prior) {
      volume.set_label(voxel, next.label);
      volume.set_score(voxel, next.score);
    }
  }
  return acc.touched().size();
}

std::size_t update_labels(VoxelVolume& volume, const LocalWindow& window,
                          const LiftedLabels& lifted,
                          std::span<const float> update_weights) {
  LabelAccumulator acc(volume.size());
  return update_labels(volume, window, lifted, update_weights, acc);
}

}  // namespace sfusion
