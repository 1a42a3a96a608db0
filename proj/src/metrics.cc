#include "sfusion/metrics.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>
#include <random>
#include <string>

#include "sfusion/errors.h"

namespace sfusion {
namespace {

std::uint64_t mix(std::uint64_t h, std::uint64_t v) {
  h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  h = (h ^ (h >> 33)) * 0xff51afd7ed558ccdULL;
  return h ^ (h >> 33);
}

std::uint64_t triangle_seed(const Vec3& a, const Vec3& b, const Vec3& c,
                            std::uint64_t seed) {
  std::uint64_t h = mix(0x243f6a8885a308d3ULL, seed);
  for (const Vec3* p : {&a, &b, &c}) {
    for (int i = 0; i < 3; ++i) h = mix(h, std::bit_cast<std::uint64_t>((*p)[i]));
  }
  return h;
}

double percent(std::size_t hits, std::size_t total) {
  return total == 0 ? 0.0 : 100.0 * double(hits) / double(total);
}

}  // namespace

std::size_t PointGrid::CellHash::operator()(const Cell& c) const {
  return static_cast<std::size_t>(
      mix(mix(mix(0, std::uint64_t(c.x)), std::uint64_t(c.y)),
          std::uint64_t(c.z)));
}

PointGrid::Cell PointGrid::cell_of(const Vec3& p) const {
  return {static_cast<std::int64_t>(std::floor(p.x() / cell_size_)),
          static_cast<std::int64_t>(std::floor(p.y() / cell_size_)),
          static_cast<std::int64_t>(std::floor(p.z() / cell_size_))};
}

PointGrid::PointGrid(std::span<const Vec3> points, double cell_size)
    : points_(points), cell_size_(cell_size) {
  if (!(cell_size > 0.0)) throw ConfigError("PointGrid: cell size must be > 0");
  std::vector<Cell> keys(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) keys[i] = cell_of(points[i]);
  order_.resize(points.size());
  for (std::size_t i = 0; i < order_.size(); ++i) order_[i] = i;
  auto less = [&](std::size_t a, std::size_t b) {
    const Cell& ka = keys[a];
    const Cell& kb = keys[b];
    if (ka.x != kb.x) return ka.x < kb.x;
    if (ka.y != kb.y) return ka.y < kb.y;
    if (ka.z != kb.z) return ka.z < kb.z;
    return a < b;
  };
  std::sort(order_.begin(), order_.end(), less);
  std::size_t begin = 0;
  while (begin < order_.size()) {
    std::size_t end = begin + 1;
    while (end < order_.size() && keys[order_[end]] == keys[order_[begin]]) {
      ++end;
    }
    cells_.emplace(keys[order_[begin]], std::make_pair(begin, end));
    begin = end;
  }
}

template <class Fn>
void PointGrid::for_neighbours(const Vec3& p, Fn&& fn) const {
  const Cell c = cell_of(p);
  for (std::int64_t dx = -1; dx <= 1; ++dx) {
    for (std::int64_t dy = -1; dy <= 1; ++dy) {
      for (std::int64_t dz = -1; dz <= 1; ++dz) {
        const auto it = cells_.find({c.x + dx, c.y + dy, c.z + dz});
        if (it == cells_.end()) continue;
        for (std::size_t k = it->second.first; k < it->second.second; ++k) {
          if (!fn(order_[k])) return;
        }
      }
    }
  }
}

bool PointGrid::any_within(const Vec3& p, double radius) const {
  const double r2 = radius * radius;
  bool found = false;
  for_neighbours(p, [&](std::size_t i) {
    found = (points_[i] - p).squaredNorm() < r2;
    return !found;
  });
  return found;
}

std::optional<std::size_t> PointGrid::nearest(const Vec3& p,
                                              double radius) const {
  double best_d2 = radius * radius;
  std::optional<std::size_t> best;
  for_neighbours(p, [&](std::size_t i) {
    const double d2 = (points_[i] - p).squaredNorm();
    if (d2 < best_d2 || (d2 == best_d2 && best && i < *best)) {
      best_d2 = d2;
      best = i;
    }
    return true;
  });
  return best;
}

std::vector<Vec3> sample_surface(const TriMesh& mesh, double density,
                                 std::uint64_t seed) {
  if (!(density > 0.0)) throw ConfigError("sample density must be positive");
  std::vector<Vec3> out;
  out.reserve(static_cast<std::size_t>(mesh.area() * density) + 16);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  for (const auto& t : mesh.triangles) {
    const Vec3& a = mesh.vertices[t[0]];
    const Vec3& b = mesh.vertices[t[1]];
    const Vec3& c = mesh.vertices[t[2]];
    const double expected = 0.5 * (b - a).cross(c - a).norm() * density;
    std::mt19937_64 rng(triangle_seed(a, b, c, seed));
    std::size_t n = static_cast<std::size_t>(expected);
    if (uniform(rng) < expected - double(n)) ++n;
    for (std::size_t i = 0; i < n; ++i) {
      const double r1 = std::sqrt(uniform(rng));
      const double r2 = uniform(rng);
      out.push_back((1.0 - r1) * a + r1 * (1.0 - r2) * b + r1 * r2 * c);
    }
  }
  return out;
}

ReconReport fscore_from_samples(std::span<const Vec3> pred_samples,
                                std::span<const Vec3> gt_samples,
                                double threshold) {
  if (!(threshold > 0.0)) throw ConfigError("fscore: threshold must be > 0");
  if (pred_samples.empty() && gt_samples.empty()) {
    throw Error("fscore: both meshes are empty");
  }
  ReconReport r;
  r.distance_threshold = threshold;
  r.n_pred_points = pred_samples.size();
  r.n_gt_points = gt_samples.size();
  if (pred_samples.empty() || gt_samples.empty()) return r;

  const PointGrid gt_grid(gt_samples, threshold);
  const PointGrid pred_grid(pred_samples, threshold);
  std::size_t pred_hits = 0;
  for (const Vec3& p : pred_samples) {
    if (gt_grid.any_within(p, threshold)) ++pred_hits;
  }
  std::size_t gt_hits = 0;
  for (const Vec3& p : gt_samples) {
    if (pred_grid.any_within(p, threshold)) ++gt_hits;
  }
  r.precision = percent(pred_hits, pred_samples.size());
  r.recall = percent(gt_hits, gt_samples.size());
  const double sum = r.precision + r.recall;
  r.f1 = sum > 0.0 ? 2.0 * r.precision * r.recall / sum : 0.0;
  return r;
}

ReconReport fscore(const TriMesh& pred, const TriMesh& gt,
                   const FscoreOptions& options) {
  const std::vector<Vec3> ps = sample_surface(pred, options.density, options.seed);
  const std::vector<Vec3> gs = sample_surface(gt, options.density, options.seed);
  return fscore_from_samples(ps, gs, options.threshold);
}

ConfusionMatrix::ConfusionMatrix(int class_count)
    : class_count_(class_count),
      counts_(std::size_t(class_count) * class_count, 0) {
  if (class_count < 1) throw ConfigError("confusion matrix needs >= 1 class");
}

std::uint64_t ConfusionMatrix::false_positives(ClassId c) const {
  std::uint64_t n = 0;
  for (int g = 0; g < class_count_; ++g) {
    if (g != c) n += at(ClassId(g), c);
  }
  return n;
}

std::uint64_t ConfusionMatrix::false_negatives(ClassId c) const {
  std::uint64_t n = 0;
  for (int p = 0; p < class_count_; ++p) {
    if (p != c) n += at(c, ClassId(p));
  }
  return n;
}

std::uint64_t ConfusionMatrix::support(ClassId c) const {
  std::uint64_t n = 0;
  for (int p = 0; p < class_count_; ++p) n += at(c, ClassId(p));
  return n;
}

IouReport iou_per_class(std::span<const ClassId> pred_labels,
                        std::span<const ClassId> gt_labels, int class_count) {
  if (pred_labels.size() != gt_labels.size()) {
    throw ConfigError("iou: prediction and ground truth sizes differ");
  }
  IouReport report;
  report.confusion = ConfusionMatrix(class_count);
  for (std::size_t i = 0; i < gt_labels.size(); ++i) {
    if (gt_labels[i] == kUnlabeled) continue;
    if (gt_labels[i] >= class_count || pred_labels[i] >= class_count) {
      throw ConfigError("iou: label id " +
                        std::to_string(std::max(gt_labels[i], pred_labels[i])) +
                        " >= class_count " + std::to_string(class_count));
    }
    report.confusion.add(gt_labels[i], pred_labels[i]);
  }
  if (report.confusion.total() == 0) {
    throw Error("iou: no ground-truth labels to evaluate");
  }
  double sum = 0.0;
  for (int c = 1; c < class_count; ++c) {
    const auto id = ClassId(c);
    const std::uint64_t support = report.confusion.support(id);
    if (support == 0) continue;
    const std::uint64_t tp = report.confusion.true_positives(id);
    const std::uint64_t denom = tp + report.confusion.false_positives(id) +
                                report.confusion.false_negatives(id);
    const double iou = double(tp) / double(denom);
    report.classes.push_back({id, iou, support});
    sum += iou;
  }
  report.mean_iou = sum / double(report.classes.size());
  return report;
}

LabeledPoints labeled_voxels(const VoxelVolume& volume) {
  LabeledPoints out;
  for (std::size_t i = 0; i < volume.size(); ++i) {
    if (volume.label(i) == kUnlabeled || !(volume.score(i) > 0.0f)) continue;
    const auto c = volume.coords(i);
    out.points.push_back(volume.voxel_center(c[0], c[1], c[2]));
    out.labels.push_back(volume.label(i));
  }
  return out;
}

LabeledPoints labeled_vertices(const TriMesh& mesh) {
  LabeledPoints out;
  for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
    if (mesh.vertex_labels[i] == kUnlabeled) continue;
    out.points.push_back(mesh.vertices[i]);
    out.labels.push_back(mesh.vertex_labels[i]);
  }
  return out;
}

std::vector<ClassId> transfer_labels(std::span<const Vec3> queries,
                                     const LabeledPoints& source,
                                     double radius) {
  std::vector<ClassId> out(queries.size(), kUnlabeled);
  if (source.points.empty()) return out;
  const PointGrid grid(source.points, radius);
  for (std::size_t i = 0; i < queries.size(); ++i) {
    if (const auto hit = grid.nearest(queries[i], radius)) {
      out[i] = source.labels[*hit];
    }
  }
  return out;
}

double fusion_loss(std::span<const float> pred, std::span<const float> gt,
                   std::span<const std::uint8_t> valid, int window_size,
                   const FusionLossWeights& weights) {
  if (window_size < 1 || pred.size() != gt.size() ||
      pred.size() != valid.size() * std::size_t(window_size)) {
    throw ConfigError("fusion_loss: shapes do not match");
  }
  double total = 0.0;
  for (std::size_t ray = 0; ray < valid.size(); ++ray) {
    if (!valid[ray]) continue;
    double abs_sum = 0.0, sq_sum = 0.0, dot = 0.0, pn = 0.0, gn = 0.0;
    for (int k = 0; k < window_size; ++k) {
      const double p = pred[ray * window_size + k];
      const double g = gt[ray * window_size + k];
      abs_sum += std::abs(p - g);
      sq_sum += (p - g) * (p - g);
      dot += p * g;
      pn += p * p;
      gn += g * g;
    }
    const double l1 = abs_sum / window_size;
    const double l2 = sq_sum / window_size;
    const double lc =
        (pn > 0.0 && gn > 0.0) ? 1.0 - dot / (std::sqrt(pn) * std::sqrt(gn))
                               : 0.0;
    total += weights.l1 * l1 + weights.l2 * l2 + weights.cosine * lc;
  }
  return total;
}

double bootstrapped_ce(std::span<const double> losses, std::size_t k,
                       double h_th) {
  if (k < 1) throw ConfigError("bootstrapped_ce: K must be >= 1");
  std::vector<double> sorted(losses.begin(), losses.end());
  for (double h : sorted) {
    if (!std::isfinite(h)) throw ConfigError("bootstrapped_ce: non-finite loss");
  }
  if (sorted.size() <= k) {
    double s = 0.0;
    for (double h : sorted) s += h;
    return s;
  }
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  const std::size_t above = static_cast<std::size_t>(
      std::count_if(sorted.begin(), sorted.end(),
                    [h_th](double h) { return h > h_th; }));
  const std::size_t n = above >= k ? above : k;
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += sorted[i];
  return s;
}

double multiscale_seg_loss(double main, double aux1, double aux2,
                           double lambda1, double lambda2) {
  return main + lambda1 * aux1 + lambda2 * aux2;
}

}  // namespace sfusion
