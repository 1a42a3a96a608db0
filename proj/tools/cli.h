#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "sfusion/config.h"
#include "sfusion/fusion.h"
#include "sfusion/io.h"
#include "sfusion/meshing.h"
#include "sfusion/metrics.h"
#include "sfusion/volume.h"

namespace sfusion::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kDataError = 2,
  kInternal = 3,
};

// Runs the command line `args` (program name first). Everything the command
// prints goes to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);

struct FuseSummary {
  int frames_fused = 0;
  int frames_skipped = 0;  // predictor faults
  std::vector<std::string> faults;
  // Steady-state timing, first kWarmupFrames excluded.
  int steady_frames = 0;
  double steady_fusion_seconds = 0.0;
  double steady_total_seconds = 0.0;  // including frame loading
  StageTimes steady_stages;
};

inline constexpr int kWarmupFrames = 3;

// Streams every dataset frame through fuse_frame in order. Loading errors
// are rethrown as FormatError prefixed with the frame index; predictor faults
// skip the frame and are counted.
FuseSummary fuse_dataset(VoxelVolume& volume, const Dataset& dataset,
                         const RunConfig& config, FusionPredictor& predictor,
                         bool semantics);

// Mesh of the volume after the outlier filter.
TriMesh filtered_mesh(const VoxelVolume& volume, double threshold);

struct SweepRow {
  double threshold = 0.0;
  ReconReport report;
};

// Rows sorted by threshold, one filter + mesh + evaluation per threshold.
std::vector<SweepRow> sweep(const VoxelVolume& volume, const TriMesh& gt,
                            std::vector<double> thresholds,
                            const FscoreOptions& options);

// CSV with header "threshold,precision,recall,f1".
std::string sweep_csv(const std::vector<SweepRow>& rows);
// CSV with header "class_id,class_name,iou,support".
std::string iou_csv(const IouReport& report,
                    const std::map<int, std::string>& class_names);
// CSV with header
// "threshold,precision,recall,f1,n_pred_points,n_gt_points".
std::string recon_csv(const ReconReport& report);

}  // namespace sfusion::cli
