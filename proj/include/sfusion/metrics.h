#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "sfusion/geometry.h"
#include "sfusion/meshing.h"
#include "sfusion/volume.h"

namespace sfusion {

// Uniform hash grid over a point set for fixed-radius queries.
class PointGrid {
 public:
  PointGrid(std::span<const Vec3> points, double cell_size);

  // True if some point lies strictly closer than `radius` (<= cell size).
  bool any_within(const Vec3& p, double radius) const;
  // Closest point within `radius` (<= cell size); lowest index on ties.
  std::optional<std::size_t> nearest(const Vec3& p, double radius) const;

 private:
  struct Cell {
    std::int64_t x, y, z;
    bool operator==(const Cell&) const = default;
  };
  struct CellHash {
    std::size_t operator()(const Cell& c) const;
  };
  Cell cell_of(const Vec3& p) const;
  template <class Fn>
  void for_neighbours(const Vec3& p, Fn&& fn) const;

  std::span<const Vec3> points_;
  double cell_size_;
  std::vector<std::size_t> order_;
  std::unordered_map<Cell, std::pair<std::size_t, std::size_t>, CellHash>
      cells_;
};

// Area-weighted surface samples. Each triangle draws its samples from an RNG
// seeded by the triangle's own coordinates and `seed`, so a triangle yields
// the same points in any mesh that contains it.
std::vector<Vec3> sample_surface(const TriMesh& mesh, double density,
                                 std::uint64_t seed);

struct ReconReport {
  double precision = 0.0;  // percent
  double recall = 0.0;     // percent
  double f1 = 0.0;         // percent
  double distance_threshold = 0.0;
  std::size_t n_pred_points = 0;
  std::size_t n_gt_points = 0;
};

struct FscoreOptions {
  double threshold = 0.01;  // metres
  double density = 1e5;     // samples per square metre (10 per cm^2)
  std::uint64_t seed = 0;
};

// Precision: share of predicted surface samples closer than the threshold to
// a ground-truth sample; recall symmetric. Throws Error when both meshes are
// empty; a single empty mesh scores 0.
ReconReport fscore(const TriMesh& pred, const TriMesh& gt,
                   const FscoreOptions& options = {});
ReconReport fscore_from_samples(std::span<const Vec3> pred_samples,
                                std::span<const Vec3> gt_samples,
                                double threshold);

// Rows are ground truth, columns prediction.
class ConfusionMatrix {
 public:
  explicit ConfusionMatrix(int class_count);

  void add(ClassId gt, ClassId pred) { ++at(gt, pred); ++total_; }
  std::uint64_t at(ClassId gt, ClassId pred) const {
    return counts_[std::size_t(gt) * class_count_ + pred];
  }
  int class_count() const { return class_count_; }
  std::uint64_t total() const { return total_; }

  std::uint64_t true_positives(ClassId c) const { return at(c, c); }
  std::uint64_t false_positives(ClassId c) const;
  std::uint64_t false_negatives(ClassId c) const;
  std::uint64_t support(ClassId c) const;

 private:
  std::uint64_t& at(ClassId gt, ClassId pred) {
    return counts_[std::size_t(gt) * class_count_ + pred];
  }
  int class_count_;
  std::vector<std::uint64_t> counts_;
  std::uint64_t total_ = 0;
};

struct ClassIou {
  ClassId class_id = 0;
  double iou = 0.0;
  std::uint64_t support = 0;  // ground-truth vertices of this class
};

struct IouReport {
  std::vector<ClassIou> classes;  // classes present in ground truth, by id
  double mean_iou = 0.0;
  ConfusionMatrix confusion{1};
};

// Ground-truth vertices with label 0 are not evaluated; a prediction of 0
// means "unlabeled" and counts as a false negative of the true class.
// Throws Error if no vertex carries a ground-truth label.
IouReport iou_per_class(std::span<const ClassId> pred_labels,
                        std::span<const ClassId> gt_labels, int class_count);

struct LabeledPoints {
  std::vector<Vec3> points;
  std::vector<ClassId> labels;
};

// Centers of voxels with a non-zero label and positive score.
LabeledPoints labeled_voxels(const VoxelVolume& volume);
// Mesh vertices with a non-zero label.
LabeledPoints labeled_vertices(const TriMesh& mesh);

// Label of the nearest labeled point within `radius` of each query point, 0
// where none is in range.
std::vector<ClassId> transfer_labels(std::span<const Vec3> queries,
                                     const LabeledPoints& source,
                                     double radius);

// Sum over valid rays of l1*L1 + l2*L2 + lc*Lc where L1 is the mean absolute
// difference along the ray, L2 the mean squared difference and Lc the cosine
// embedding loss 1 - cos(pred, gt). Lc is 0 when either ray vector has zero
// norm.
struct FusionLossWeights {
  double l1 = 1.0;
  double l2 = 10.0;
  double cosine = 0.1;
};
double fusion_loss(std::span<const float> pred, std::span<const float> gt,
                   std::span<const std::uint8_t> valid, int window_size,
                   const FusionLossWeights& weights = {});

// Bootstrapped cross-entropy over per-pixel losses. When at least K losses
// exceed h_th, all losses above h_th are summed; otherwise the K largest are.
// With fewer than K pixels, everything is summed.
double bootstrapped_ce(std::span<const double> losses, std::size_t k = 4096,
                       double h_th = 0.5);

double multiscale_seg_loss(double main, double aux1, double aux2,
                           double lambda1 = 0.6, double lambda2 = 0.5);

}  // namespace sfusion
