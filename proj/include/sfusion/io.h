#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "sfusion/frame.h"
#include "sfusion/geometry.h"
#include "sfusion/meshing.h"
#include "sfusion/volume.h"

namespace sfusion {

namespace fs = std::filesystem;

// Depth images: 16-bit single-channel PNG, metres = raw / scale, raw 0 is
// invalid. Errors name the offending path.
DepthFrame load_depth(const fs::path& path, double scale = 1000.0);
// Inverse of load_depth: raw = round(depth * scale), saturated to 65535.
void write_depth(const fs::path& path, const DepthFrame& frame,
                 double scale = 1000.0);

// Raw id of the dataset "unlabeled" class in label images.
inline constexpr std::uint8_t kRawUnlabeled = 255;

// Label images: 8-bit single-channel PNG. Raw id r becomes r + 1 internally
// and raw 255 becomes 0 (unlabeled, score 0). Optional score images are 8-bit
// (score = raw / 255); without one every labeled pixel scores 1.
LabelFrame load_labels(const fs::path& label_path,
                       const std::optional<fs::path>& score_path = {},
                       int class_count = 256);
void write_labels(const fs::path& path, const LabelFrame& frame);
void write_scores(const fs::path& path, const LabelFrame& frame);

enum class PoseConvention { kCameraToWorld, kWorldToCamera };

// One pose per non-empty, non-comment line: either 16 numbers (row-major
// 4x4) or 7 numbers "tx ty tz qx qy qz qw". Rotations within 1e-4 of
// orthonormal are projected onto the nearest rotation. Returned poses are
// camera-to-world.
std::vector<Pose> load_trajectory(const fs::path& path,
                                  PoseConvention convention =
                                      PoseConvention::kCameraToWorld);
// Writes camera-to-world 4x4 rows with round-trip precision.
void save_trajectory(const fs::path& path, const std::vector<Pose>& poses);

// "fx fy cx cy width height" on one line.
Intrinsics load_intrinsics(const fs::path& path);
void save_intrinsics(const fs::path& path, const Intrinsics& intr);

// Fixed class colour table used for mesh export.
std::array<std::uint8_t, 3> class_color(ClassId id);

// Binary little-endian PLY: x y z (float), red green blue (uchar), label
// (uchar), score (float) per vertex; uchar-counted int vertex_indices per
// face.
void write_mesh_ply(const TriMesh& mesh, const fs::path& path);
// Reads binary little-endian or ASCII PLY with at least x, y, z. label and
// score are optional (0 and 0 when absent).
TriMesh read_mesh_ply(const fs::path& path);

// Volume checkpoint: "VXF1", header, then tsdf, weight, label and score
// grids in z-fastest order at storage precision, little-endian.
void save_checkpoint(const VoxelVolume& volume, const fs::path& path);
VoxelVolume load_checkpoint(const fs::path& path,
                            std::size_t memory_budget_bytes =
                                std::size_t{4} << 30);

// Frame stream of a dataset directory:
//   intrinsics.txt, trajectory.txt, depth/NNNNNN.png,
//   label/NNNNNN.png and score/NNNNNN.png (both optional).
struct FrameRecord {
  fs::path depth_path;
  std::optional<fs::path> label_path;
  std::optional<fs::path> score_path;
  Pose pose;
  int index = 0;
};

struct Dataset {
  fs::path root;
  Intrinsics intrinsics;
  std::vector<FrameRecord> frames;
};

std::string frame_name(int index);

// Throws NotFoundError naming the missing file, FormatError when frame and
// pose counts disagree.
Dataset load_dataset(const fs::path& root,
                     PoseConvention convention =
                         PoseConvention::kCameraToWorld);

}  // namespace sfusion
