#include "sfusion/fusion.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <string>

#include "sfusion/errors.h"

namespace sfusion {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

void check_prediction(const FusionInput& input, const PredictorOutput& out) {
  const std::size_t n =
      std::size_t(input.width) * input.height * input.window_size;
  if (out.updates.size() != n || out.update_weights.size() != n) {
    throw PredictorFaultError("predictor returned " +
                              std::to_string(out.updates.size()) +
                              " updates for " + std::to_string(n) +
                              " samples");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(out.updates[i]) ||
        !std::isfinite(out.update_weights[i])) {
      throw PredictorFaultError("predictor produced a non-finite value at "
                                "sample " + std::to_string(i));
    }
    if (out.update_weights[i] < 0.0f) {
      throw PredictorFaultError("predictor produced a negative weight at "
                                "sample " + std::to_string(i));
    }
  }
}

}  // namespace

FusionInput assemble_input(const LocalWindow& window,
                           const LabelFrame* labels) {
  FusionInput in;
  in.width = window.width;
  in.height = window.height;
  in.window_size = window.window_size;
  in.depth = window.depth;
  in.tsdf_window = window.tsdf;
  in.weight_window = window.weight;
  in.sample_z = window.sample_z;
  in.valid = window.valid;
  if (labels != nullptr) {
    if (labels->width != window.width || labels->height != window.height) {
      throw ConfigError("assemble_input: label frame size mismatch");
    }
    in.semantic = labels->labels;
  }
  return in;
}

ClassicPredictor::ClassicPredictor(double truncation)
    : truncation_(truncation) {
  if (!(truncation > 0.0)) {
    throw ConfigError("classic predictor: truncation must be positive");
  }
}

void ClassicPredictor::predict(const FusionInput& input,
                               PredictorOutput& out) {
  const std::size_t n =
      std::size_t(input.width) * input.height * input.window_size;
  out.updates.assign(n, 0.0f);
  out.update_weights.assign(n, 0.0f);
  const float trunc = static_cast<float>(truncation_);
  const std::size_t rays = std::size_t(input.width) * input.height;
  for (std::size_t ray = 0; ray < rays; ++ray) {
    if (!input.valid[ray]) continue;
    const float d = input.depth[ray];
    for (int k = 0; k < input.window_size; ++k) {
      const std::size_t s = ray * input.window_size + k;
      const float sdf = d - input.sample_z[s];
      out.updates[s] = std::clamp(sdf, -trunc, trunc);
      out.update_weights[s] = sdf >= -trunc ? 1.0f : 0.0f;
    }
  }
}

PredictorOutput classic_predict(const FusionInput& input, double truncation) {
  ClassicPredictor predictor(truncation);
  PredictorOutput out;
  predictor.predict(input, out);
  return out;
}

void FusionConfig::validate() const {
  check_window_size(window_size);
  if (!(outlier_weight_threshold >= 0.0)) {
    throw ConfigError("fusion: outlier_weight_threshold must be >= 0");
  }
}

void apply_accumulated(VoxelVolume& volume, const SplatAccumulator& acc) {
  const auto& cfg = volume.config();
  const double trunc = cfg.truncation;
  for (std::size_t i : acc.touched()) {
    const double sum_w = acc.sum_w(i);
    if (!(sum_w > 0.0)) continue;
    const double w_prev = volume.weight(i);
    const double v_prev = volume.tsdf(i);
    const double w_next = w_prev + sum_w;
    double v_next = (w_prev * v_prev + acc.sum_wv(i)) / w_next;
    v_next = std::clamp(v_next, -trunc, trunc);
    volume.set_tsdf(i, static_cast<float>(v_next));
    volume.set_weight(i, static_cast<float>(
                             cfg.max_weight ? std::min(w_next, *cfg.max_weight)
                                            : w_next));
  }
}

std::size_t integrate(VoxelVolume& volume, const LocalWindow& window,
                      std::span<const float> updates,
                      std::span<const float> update_weights,
                      SplatAccumulator& acc) {
  splat(volume, window, updates, update_weights, acc);
  apply_accumulated(volume, acc);
  return acc.touched().size();
}

std::size_t integrate(VoxelVolume& volume, const LocalWindow& window,
                      std::span<const float> updates,
                      std::span<const float> update_weights) {
  SplatAccumulator acc(volume.size());
  return integrate(volume, window, updates, update_weights, acc);
}

FrameReport fuse_frame(VoxelVolume& volume, const DepthFrame& depth,
                       const LabelFrame* labels, const Intrinsics& intr,
                       const Pose& pose, FusionPredictor& predictor,
                       const FusionConfig& config,
                       FusionWorkspace& workspace) {
  config.validate();
  const auto frame_start = Clock::now();
  FrameReport report;

  auto t = Clock::now();
  const LocalWindow window =
      extract(volume, depth, intr, pose, config.window_size);
  report.stages.extract = seconds_since(t);
  report.rays_valid = window.valid_rays();

  const bool with_labels = config.semantics_enabled && labels != nullptr;
  if (with_labels) labels->validate();

  t = Clock::now();
  const FusionInput input = assemble_input(
      window, with_labels && predictor.uses_semantics() ? labels : nullptr);
  PredictorOutput& pred = workspace.prediction;
  predictor.predict(input, pred);
  check_prediction(input, pred);
  const float trunc = static_cast<float>(volume.config().truncation);
  for (std::size_t ray = 0; ray < window.ray_count(); ++ray) {
    for (int k = 0; k < window.window_size; ++k) {
      const std::size_t s = window.sample_index(ray, k);
      if (!window.valid[ray]) {
        pred.update_weights[s] = 0.0f;
        continue;
      }
      pred.updates[s] = std::clamp(pred.updates[s], -trunc, trunc);
    }
  }
  report.stages.predict = seconds_since(t);

  t = Clock::now();
  report.voxels_touched = integrate(volume, window, pred.updates,
                                    pred.update_weights, workspace.splat);
  report.stages.integrate = seconds_since(t);

  if (with_labels) {
    t = Clock::now();
    const LiftedLabels lifted = lift_labels(*labels, window);
    report.labels_touched = update_labels(volume, window, lifted,
                                          pred.update_weights,
                                          workspace.labels);
    report.stages.semantic = seconds_since(t);
  }

  report.elapsed = seconds_since(frame_start);
  return report;
}

FrameReport fuse_frame(VoxelVolume& volume, const DepthFrame& depth,
                       const LabelFrame* labels, const Intrinsics& intr,
                       const Pose& pose, FusionPredictor& predictor,
                       const FusionConfig& config) {
  FusionWorkspace workspace;
  return fuse_frame(volume, depth, labels, intr, pose, predictor, config,
                    workspace);
}

VoxelVolume filter_outliers(const VoxelVolume& volume, double threshold) {
  if (!(threshold >= 0.0)) {
    throw ConfigError("filter_outliers: threshold must be >= 0");
  }
  VoxelVolume out = volume;
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (out.weight(i) < threshold) out.set_weight(i, 0.0f);
  }
  return out;
}

}  // namespace sfusion
