#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "sfusion/frame.h"
#include "sfusion/geometry.h"
#include "sfusion/semantics.h"
#include "sfusion/volume.h"
#include "sfusion/window.h"

namespace sfusion {

// Per-frame input to a TSDF update predictor. All spans view the window (and
// label frame) they were assembled from.
struct FusionInput {
  int width = 0;
  int height = 0;
  int window_size = 0;
  std::span<const float> depth;          // H x W
  std::span<const ClassId> semantic;     // H x W, empty without semantics
  std::span<const float> tsdf_window;    // H x W x T
  std::span<const float> weight_window;  // H x W x T
  std::span<const float> sample_z;       // H x W x T camera-frame z
  std::span<const std::uint8_t> valid;   // H x W

  bool has_semantics() const { return !semantic.empty(); }
};

// The semantic channel is attached only when `labels` is non-null.
FusionInput assemble_input(const LocalWindow& window,
                           const LabelFrame* labels);

struct PredictorOutput {
  std::vector<float> updates;         // v*, H x W x T
  std::vector<float> update_weights;  // w*, H x W x T
};

// Maps the assembled input to local TSDF updates. Implementations must write
// finite values and non-negative weights of the input's sample count; the
// pipeline clamps updates to the truncation band afterwards.
class FusionPredictor {
 public:
  virtual ~FusionPredictor() = default;
  virtual void predict(const FusionInput& input, PredictorOutput& out) = 0;
  // Whether predict() reads the semantic channel.
  virtual bool uses_semantics() const { return false; }
};

// Projective TSDF averaging. For a ray observing depth d, sample k at camera
// depth z_k gets v = clamp(d - z_k, +-truncation) and weight 1 unless it lies
// more than `truncation` behind the surface.
class ClassicPredictor final : public FusionPredictor {
 public:
  explicit ClassicPredictor(double truncation);
  void predict(const FusionInput& input, PredictorOutput& out) override;
  double truncation() const { return truncation_; }

 private:
  double truncation_;
};

PredictorOutput classic_predict(const FusionInput& input, double truncation);

struct FusionConfig {
  int window_size = 9;
  double outlier_weight_threshold = 2.0;
  bool semantics_enabled = true;

  void validate() const;
};

// Applies the running weighted mean to every voxel touched by `acc`:
//   V' = (W V + sum_wv) / (W + sum_w),  W' = W + sum_w
// V' is clamped to the truncation band and W' to max_weight when set.
void apply_accumulated(VoxelVolume& volume, const SplatAccumulator& acc);

// splat() followed by apply_accumulated(). Returns the number of voxels
// touched.
std::size_t integrate(VoxelVolume& volume, const LocalWindow& window,
                      std::span<const float> updates,
                      std::span<const float> update_weights,
                      SplatAccumulator& acc);
std::size_t integrate(VoxelVolume& volume, const LocalWindow& window,
                      std::span<const float> updates,
                      std::span<const float> update_weights);

struct StageTimes {
  double extract = 0.0;  // seconds
  double predict = 0.0;
  double integrate = 0.0;
  double semantic = 0.0;

  double total() const { return extract + predict + integrate + semantic; }
  StageTimes& operator+=(const StageTimes& o) {
    extract += o.extract;
    predict += o.predict;
    integrate += o.integrate;
    semantic += o.semantic;
    return *this;
  }
};

struct FrameReport {
  std::size_t rays_valid = 0;
  std::size_t voxels_touched = 0;
  std::size_t labels_touched = 0;
  double elapsed = 0.0;  // seconds, wall clock
  StageTimes stages;
};

// Scratch buffers reused across frames.
struct FusionWorkspace {
  SplatAccumulator splat;
  LabelAccumulator labels;
  PredictorOutput prediction;
};

// extract -> assemble -> predict -> clamp -> splat -> integrate -> labels.
// Throws PredictorFaultError, leaving the volume untouched, when the
// predictor returns a wrongly sized buffer, a non-finite value or a negative
// weight. Labels are integrated only when `labels` is non-null and
// config.semantics_enabled is set.
FrameReport fuse_frame(VoxelVolume& volume, const DepthFrame& depth,
                       const LabelFrame* labels, const Intrinsics& intr,
                       const Pose& pose, FusionPredictor& predictor,
                       const FusionConfig& config, FusionWorkspace& workspace);

FrameReport fuse_frame(VoxelVolume& volume, const DepthFrame& depth,
                       const LabelFrame* labels, const Intrinsics& intr,
                       const Pose& pose, FusionPredictor& predictor,
                       const FusionConfig& config);

// Copy of `volume` with the weight of every voxel below `threshold` set to
// zero, i.e. marked unknown for meshing and evaluation.
VoxelVolume filter_outliers(const VoxelVolume& volume, double threshold);

}  // namespace sfusion
