#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "sfusion/volume.h"

namespace sfusion {

// Metric z-depth per pixel, row-major. 0 marks an invalid pixel.
struct DepthFrame {
  int width = 0;
  int height = 0;
  std::vector<float> depth;

  DepthFrame() = default;
  DepthFrame(int w, int h) : width(w), height(h), depth(std::size_t(w) * h) {}

  float at(int u, int v) const { return depth[std::size_t(v) * width + u]; }
  float& at(int u, int v) { return depth[std::size_t(v) * width + u]; }
  bool operator==(const DepthFrame&) const = default;
};

// Per-pixel class id and confidence. Ids are internal: 0 is unlabeled and
// dataset ids are shifted by +1.
struct LabelFrame {
  int width = 0;
  int height = 0;
  int class_count = 256;
  std::vector<ClassId> labels;
  std::vector<float> scores;

  LabelFrame() = default;
  LabelFrame(int w, int h, int classes)
      : width(w),
        height(h),
        class_count(classes),
        labels(std::size_t(w) * h, kUnlabeled),
        scores(std::size_t(w) * h, 0.0f) {}

  // Throws ConfigError if a label is >= class_count or a score leaves [0,1].
  void validate() const;
  bool operator==(const LabelFrame&) const = default;
};

}  // namespace sfusion
