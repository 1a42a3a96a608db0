#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>

#include "json.hpp"

#include "sfusion/fusion.h"
#include "sfusion/geometry.h"
#include "sfusion/io.h"
#include "sfusion/synth.h"
#include "sfusion/volume.h"

namespace sfusion {

struct DatasetConventions {
  double depth_scale = 1000.0;
  PoseConvention pose_convention = PoseConvention::kCameraToWorld;
  DepthKind depth_kind = DepthKind::kZDepth;
};

struct MetricDefaults {
  double distance_threshold = 0.01;  // metres
  double sample_density = 1e5;       // samples per square metre
  std::uint64_t seed = 0;
  // Label transfer radius in voxels.
  double label_radius_voxels = 2.0;
};

// Run configuration file (JSON). Every section and key is optional; unknown
// keys are rejected.
//
//   {
//     "volume":  {"dims": [X, Y, Z], "voxel_size": m, "origin": [x, y, z],
//                 "truncation": m, "storage_precision": "half" | "single",
//                 "class_count": n, "max_weight": w | null,
//                 "memory_budget_bytes": n},
//     "fusion":  {"window_size": T, "outlier_weight_threshold": w,
//                 "semantics_enabled": bool},
//     "dataset": {"depth_scale": s,
//                 "pose_convention": "camera_to_world" | "world_to_camera",
//                 "depth_kind": "z_depth" | "ray_length"},
//     "noise":   {"gaussian_sigma": m, "depth_scaled": bool,
//                 "outlier_rate": p, "outlier_magnitude": m,
//                 "dropout_rate": p, "seed": n},
//     "metrics": {"distance_threshold": m, "sample_density": n,
//                 "seed": n, "label_radius_voxels": r}
//   }
struct RunConfig {
  VolumeConfig volume;
  FusionConfig fusion;
  DatasetConventions dataset;
  NoiseModel noise;
  MetricDefaults metrics;

  void validate() const;
};

// Throws ConfigError naming the offending key.
RunConfig parse_run_config(const nlohmann::json& j);
RunConfig load_run_config(const std::filesystem::path& path);
nlohmann::json to_json(const RunConfig& config);
void save_run_config(const std::filesystem::path& path,
                     const RunConfig& config);

// Scene description file (JSON):
//
//   {
//     "primitives": [
//       {"type": "sphere", "center": [..], "radius": r, "class": c,
//        "name": "..."},
//       {"type": "plane", "point": [..], "normal": [..], "class": c},
//       {"type": "box", "center": [..], "half_extents": [..], "class": c}
//     ],
//     "camera": {"fx": .., "fy": .., "cx": .., "cy": .., "width": W,
//                "height": H},
//     "trajectory": {"kind": "orbit" | "line" | "room_scan", "steps": n,
//                    "target": [..], "up": [..], "radius": r,
//                    "elevation": rad, "elevation_end": rad | null,
//                    "start": [..], "end": [..],
//                    "center": [..], "scan_radius": r},
//     "noise": {...as in the run config...},
//     "config": {...a run config...}
//   }
struct SceneSpec {
  AnalyticScene scene;
  Intrinsics camera{100.0, 100.0, 64.0, 64.0, 128, 128};
  TrajectoryParams trajectory;
  NoiseModel noise;
  RunConfig config;
  std::map<int, std::string> class_names;
};

SceneSpec parse_scene_spec(const nlohmann::json& j);
SceneSpec load_scene_spec(const std::filesystem::path& path);
nlohmann::json to_json(const SceneSpec& spec);

}  // namespace sfusion
