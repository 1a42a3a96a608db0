#include "sfusion/fusion.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <gtest/gtest.h>

#include "sfusion/errors.h"
#include "sfusion/meshing.h"
#include "sfusion/synth.h"
#include "test_util.h"

namespace sfusion {
namespace {

const Intrinsics kPinhole(1.0, 1.0, 0.0, 0.0, 1, 1);

VolumeConfig column(StoragePrecision p = StoragePrecision::kSingle) {
  VolumeConfig c;
  c.dims = {3, 3, 40};
  c.voxel_size = 0.01;
  c.origin = Vec3(-0.01, -0.01, 0.0);
  c.truncation = 0.05;
  c.precision = p;
  return c;
}

DepthFrame single(float d) {
  DepthFrame f(1, 1);
  f.depth[0] = d;
  return f;
}

PredictorOutput predict_single(const VoxelVolume& vol, float depth, int t) {
  const LocalWindow w = extract(vol, single(depth), kPinhole, Pose(), t);
  return classic_predict(assemble_input(w, nullptr), vol.config().truncation);
}

TEST(ClassicPredictTest, SignConventionAndBand) {
  const VoxelVolume vol(column());
  const PredictorOutput out = predict_single(vol, 0.2f, 15);
  // Sample k sits at z = 0.2 + (k - 7) * 0.01.
  EXPECT_NEAR(out.updates[7], 0.0, 1e-6);
  EXPECT_EQ(out.update_weights[7], 1.0f);
  EXPECT_NEAR(out.updates[6], 0.01, 1e-6);
  EXPECT_EQ(out.update_weights[6], 1.0f);
  EXPECT_NEAR(out.updates[0], 0.05, 1e-6);  // 7 voxels in front, clamped
  EXPECT_NEAR(out.updates[12], -0.05, 1e-6);
  EXPECT_EQ(out.update_weights[12], 1.0f);  // 5 cm behind, still in band
  EXPECT_EQ(out.update_weights[13], 0.0f);  // 6 cm behind
  EXPECT_EQ(out.update_weights[14], 0.0f);
}

TEST(ClassicPredictTest, InvalidRayHasZeroWeight) {
  const VoxelVolume vol(column());
  const PredictorOutput out = predict_single(vol, 0.0f, 9);
  for (float w : out.update_weights) EXPECT_EQ(w, 0.0f);
}

TEST(AssembleTest, SemanticChannelOnlyWithLabels) {
  const VoxelVolume vol(column());
  const LocalWindow w = extract(vol, single(0.2f), kPinhole, Pose(), 9);
  EXPECT_FALSE(assemble_input(w, nullptr).has_semantics());
  LabelFrame labels(1, 1, 4);
  labels.labels[0] = 3;
  const FusionInput in = assemble_input(w, &labels);
  ASSERT_TRUE(in.has_semantics());
  EXPECT_EQ(in.semantic[0], 3);
  EXPECT_EQ(in.tsdf_window.size(), 9u);
  EXPECT_EQ(in.depth.size(), 1u);
}

LocalWindow voxel_samples(const VoxelVolume& vol) {
  LocalWindow w;
  w.width = int(vol.size());
  w.height = 1;
  w.window_size = 1;
  w.valid.assign(vol.size(), 1);
  w.depth.assign(vol.size(), 1.0f);
  for (std::size_t i = 0; i < vol.size(); ++i) {
    const auto c = vol.coords(i);
    w.sample_coords.push_back(Vec3(c[0], c[1], c[2]));
  }
  w.sample_z.assign(vol.size(), 0.0f);
  w.tsdf.assign(vol.size(), 0.0f);
  w.weight.assign(vol.size(), 0.0f);
  w.label.assign(vol.size(), 0);
  w.score.assign(vol.size(), 0.0f);
  return w;
}

TEST(IntegrateTest, WeightedMeanArithmetic) {
  VolumeConfig c = column();
  c.dims = {1, 1, 1};
  VoxelVolume vol(c);
  const LocalWindow w = voxel_samples(vol);
  const std::vector<float> one{1.0f};
  integrate(vol, w, std::vector<float>{0.03f}, one);
  EXPECT_NEAR(vol.tsdf(0), 0.03, 1e-7);
  EXPECT_EQ(vol.weight(0), 1.0f);
  vol.set_tsdf(0, 0.02f);
  integrate(vol, w, std::vector<float>{0.04f}, one);
  EXPECT_NEAR(vol.tsdf(0), 0.03, 1e-7);
  EXPECT_EQ(vol.weight(0), 2.0f);
  // Zero incoming weight leaves the voxel untouched.
  EXPECT_EQ(integrate(vol, w, std::vector<float>{0.5f},
                      std::vector<float>{0.0f}),
            0u);
  EXPECT_NEAR(vol.tsdf(0), 0.03, 1e-7);
  EXPECT_EQ(vol.weight(0), 2.0f);
}

TEST(IntegrateTest, ClampsToTruncationAndCapsWeight) {
  VolumeConfig c = column();
  c.dims = {1, 1, 1};
  c.max_weight = 3.0;
  VoxelVolume vol(c);
  const LocalWindow w = voxel_samples(vol);
  integrate(vol, w, std::vector<float>{0.2f}, std::vector<float>{2.0f});
  EXPECT_NEAR(vol.tsdf(0), 0.05, 1e-7);
  integrate(vol, w, std::vector<float>{0.0f}, std::vector<float>{2.0f});
  EXPECT_EQ(vol.weight(0), 3.0f);
}

void streaming_vs_batch(StoragePrecision precision, double tol) {
  VolumeConfig c = column(precision);
  c.dims = {10, 10, 10};
  VoxelVolume vol(c);
  const LocalWindow w = voxel_samples(vol);
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> count(1, 100);
  std::uniform_real_distribution<double> value(-c.truncation, c.truncation);
  std::uniform_real_distribution<double> weight(0.0, 1.0);
  std::vector<std::vector<std::pair<float, float>>> contrib(vol.size());
  for (auto& list : contrib) {
    const int n = count(rng);
    for (int i = 0; i < n; ++i) {
      list.emplace_back(float(value(rng)), float(weight(rng)));
    }
  }
  SplatAccumulator acc;
  std::vector<float> v(vol.size()), wt(vol.size());
  for (int step = 0; step < 100; ++step) {
    for (std::size_t i = 0; i < vol.size(); ++i) {
      const bool has = step < int(contrib[i].size());
      v[i] = has ? contrib[i][step].first : 0.0f;
      wt[i] = has ? contrib[i][step].second : 0.0f;
    }
    integrate(vol, w, v, wt, acc);
  }
  for (std::size_t i = 0; i < vol.size(); ++i) {
    double sw = 0.0, swv = 0.0;
    for (const auto& [vi, wi] : contrib[i]) {
      sw += wi;
      swv += double(wi) * vi;
    }
    EXPECT_NEAR(vol.tsdf(i), swv / sw, tol) << "voxel " << i;
  }
}

TEST(IntegrateTest, StreamingEqualsBatchHalf) {
  streaming_vs_batch(StoragePrecision::kHalf, 1e-3);
}

TEST(IntegrateTest, StreamingEqualsBatchSingle) {
  streaming_vs_batch(StoragePrecision::kSingle, 1e-6);
}

TEST(IntegrateTest, ExtractOfSplattedConstantField) {
  VoxelVolume vol(column());
  const LocalWindow w = voxel_samples(vol);
  const std::vector<float> v(vol.size(), 0.0125f), wt(vol.size(), 1.0f);
  integrate(vol, w, v, wt);
  const LocalWindow back = extract(vol, single(0.2f), kPinhole, Pose(), 9);
  for (float x : back.tsdf) EXPECT_EQ(x, 0.0125f);
  for (float x : back.weight) EXPECT_EQ(x, 1.0f);
}

class FaultyPredictor : public FusionPredictor {
 public:
  enum Mode { kNaN, kNegativeWeight, kWrongSize };
  explicit FaultyPredictor(Mode m) : mode_(m) {}
  void predict(const FusionInput& in, PredictorOutput& out) override {
    out = classic_predict(in, 0.05);
    switch (mode_) {
      case kNaN:
        out.updates[out.updates.size() / 2] =
            std::numeric_limits<float>::quiet_NaN();
        break;
      case kNegativeWeight:
        out.update_weights[0] = -1.0f;
        break;
      case kWrongSize:
        out.updates.pop_back();
        break;
    }
  }

 private:
  Mode mode_;
};

struct PlaneFixture {
  Intrinsics intr{50.0, 50.0, 32.0, 32.0, 64, 64};
  AnalyticScene scene{{Primitive{PlaneShape{Vec3(0, 0, 1), Vec3(0, 0, -1)},
                                 1, "plane"}}};
  VolumeConfig config;
  PlaneFixture() {
    config.dims = {140, 140, 40};
    config.voxel_size = 0.01;
    config.origin = Vec3(-0.7, -0.7, 0.8);
    config.truncation = 0.05;
    config.precision = StoragePrecision::kSingle;
  }
};

TEST(FuseFrameTest, PredictorFaultLeavesVolumeUntouched) {
  PlaneFixture f;
  const RenderedFrame r = render_depth(f.scene, f.intr, Pose());
  for (auto mode : {FaultyPredictor::kNaN, FaultyPredictor::kNegativeWeight,
                    FaultyPredictor::kWrongSize}) {
    VoxelVolume vol(f.config);
    FaultyPredictor bad(mode);
    EXPECT_THROW(fuse_frame(vol, r.depth, &r.labels, f.intr, Pose(), bad, {}),
                 PredictorFaultError);
    EXPECT_EQ(snapshot_stats(vol).occupied_voxels, 0u);
    EXPECT_EQ(snapshot_stats(vol).labeled_voxels, 0u);
  }
}

TEST(FuseFrameTest, EmptyDepthChangesNothing) {
  PlaneFixture f;
  VoxelVolume vol(f.config);
  ClassicPredictor p(f.config.truncation);
  const FrameReport rep =
      fuse_frame(vol, DepthFrame(64, 64), nullptr, f.intr, Pose(), p, {});
  EXPECT_EQ(rep.rays_valid, 0u);
  EXPECT_EQ(rep.voxels_touched, 0u);
  EXPECT_EQ(snapshot_stats(vol).occupied_voxels, 0u);
}

TEST(FuseFrameTest, PlaneZeroCrossing) {
  PlaneFixture f;
  VoxelVolume vol(f.config);
  ClassicPredictor p(f.config.truncation);
  const RenderedFrame r = render_depth(f.scene, f.intr, Pose());
  const FrameReport rep =
      fuse_frame(vol, r.depth, nullptr, f.intr, Pose(), p, {});
  EXPECT_EQ(rep.rays_valid, 64u * 64u);
  // Along the voxel column through the principal axis.
  const int x = 70, y = 70;
  int crossings = 0;
  for (int z = 0; z + 1 < 40; ++z) {
    const std::size_t a = vol.index(x, y, z), b = vol.index(x, y, z + 1);
    if (vol.weight(a) <= 0 || vol.weight(b) <= 0) continue;
    const double ta = vol.tsdf(a), tb = vol.tsdf(b);
    if ((ta > 0) != (tb > 0)) {
      const double za = vol.voxel_center(x, y, z).z();
      const double zc = za + 0.01 * ta / (ta - tb);
      EXPECT_NEAR(zc, 1.0, 0.005);
      ++crossings;
    }
  }
  EXPECT_EQ(crossings, 1);
}

TEST(FuseFrameTest, SameFrameTwiceKeepsTsdfAndDoublesWeight) {
  PlaneFixture f;
  VoxelVolume vol(f.config);
  ClassicPredictor p(f.config.truncation);
  const Pose pose = look_at(Vec3(0.05, -0.02, 0.0), Vec3(0, 0, 1),
                            Vec3(0, -1, 0));
  const RenderedFrame r = render_depth(f.scene, f.intr, pose);
  fuse_frame(vol, r.depth, nullptr, f.intr, pose, p, {});
  const VoxelVolume once = vol;
  fuse_frame(vol, r.depth, nullptr, f.intr, pose, p, {});
  for (std::size_t i = 0; i < vol.size(); ++i) {
    if (once.weight(i) == 0.0f) {
      EXPECT_EQ(vol.weight(i), 0.0f);
      continue;
    }
    EXPECT_NEAR(vol.tsdf(i), once.tsdf(i), 1e-6);
    EXPECT_NEAR(vol.weight(i), 2.0 * once.weight(i), 1e-6 * once.weight(i));
  }
}

// Noisy frames of a sphere from random viewpoints.
struct SphereSequence {
  AnalyticScene scene{{Primitive{SphereShape{Vec3::Zero(), 0.3}, 2, "ball"}}};
  Intrinsics intr{40.0, 40.0, 24.0, 24.0, 48, 48};
  VolumeConfig config;
  std::vector<Pose> poses;
  std::vector<RenderedFrame> frames;

  SphereSequence(int n, std::uint64_t seed, StoragePrecision p) {
    config.dims = {72, 72, 72};
    config.voxel_size = 0.01;
    config.origin = Vec3::Constant(-0.355);
    config.truncation = 0.04;
    config.precision = p;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, 1.0);
    NoiseModel noise;
    noise.gaussian_sigma = 0.005;
    noise.outlier_rate = 0.01;
    noise.seed = seed;
    for (int i = 0; i < n; ++i) {
      const Vec3 eye = Vec3(g(rng), g(rng), g(rng)).normalized() * 0.9;
      poses.push_back(look_at(eye, Vec3::Zero(), Vec3(0.3, 0.2, 1.0)));
      RenderedFrame r = render_depth(scene, intr, poses.back());
      r.depth = apply_noise(r.depth, noise, i);
      frames.push_back(std::move(r));
    }
  }
};

TEST(FuseFrameTest, InvariantsAndMonotoneWeightOverRandomFrames) {
  SphereSequence seq(100, 5, StoragePrecision::kHalf);
  VoxelVolume vol(seq.config);
  ClassicPredictor p(seq.config.truncation);
  FusionWorkspace ws;
  std::vector<float> prev_w(vol.size(), 0.0f);
  for (std::size_t i = 0; i < seq.frames.size(); ++i) {
    fuse_frame(vol, seq.frames[i].depth, &seq.frames[i].labels, seq.intr,
               seq.poses[i], p, {}, ws);
    const auto broken = check_invariants(vol);
    ASSERT_FALSE(broken.has_value()) << "frame " << i << ": " << *broken;
    for (std::size_t j = 0; j < vol.size(); ++j) {
      ASSERT_GE(vol.weight(j), prev_w[j]);
      prev_w[j] = vol.weight(j);
    }
  }
  EXPECT_GT(snapshot_stats(vol).occupied_voxels, 0u);
}

TEST(FuseFrameTest, ConvexCombinationOfPriorAndUpdates) {
  SphereSequence seq(6, 6, StoragePrecision::kSingle);
  VoxelVolume vol(seq.config);
  ClassicPredictor p(seq.config.truncation);
  FusionWorkspace ws;
  for (std::size_t i = 0; i < seq.frames.size(); ++i) {
    const VoxelVolume before = vol;
    const LocalWindow win = extract(vol, seq.frames[i].depth, seq.intr,
                                    seq.poses[i], 9);
    const PredictorOutput out =
        classic_predict(assemble_input(win, nullptr), seq.config.truncation);
    std::vector<float> lo(vol.size(), 1e9f), hi(vol.size(), -1e9f);
    for (std::size_t ray = 0; ray < win.ray_count(); ++ray) {
      if (!win.valid[ray]) continue;
      for (int k = 0; k < 9; ++k) {
        const std::size_t s = win.sample_index(ray, k);
        if (out.update_weights[s] <= 0) continue;
        const TrilinearCorners tc = trilinear_corners(vol, win.sample_coords[s]);
        for (int c = 0; c < 8; ++c) {
          if (tc.weight[c] <= 0) continue;
          lo[tc.index[c]] = std::min(lo[tc.index[c]], out.updates[s]);
          hi[tc.index[c]] = std::max(hi[tc.index[c]], out.updates[s]);
        }
      }
    }
    fuse_frame(vol, seq.frames[i].depth, nullptr, seq.intr, seq.poses[i], p,
               {}, ws);
    for (std::size_t j = 0; j < vol.size(); ++j) {
      if (lo[j] > hi[j]) {
        EXPECT_EQ(vol.tsdf(j), before.tsdf(j));
        continue;
      }
      float a = lo[j], b = hi[j];
      if (before.weight(j) > 0) {
        a = std::min(a, before.tsdf(j));
        b = std::max(b, before.tsdf(j));
      }
      EXPECT_GE(vol.tsdf(j), a - 1e-6f);
      EXPECT_LE(vol.tsdf(j), b + 1e-6f);
    }
  }
}

TEST(FuseFrameTest, FrameOrderOnlyChangesRounding) {
  SphereSequence seq(12, 7, StoragePrecision::kHalf);
  VoxelVolume fwd(seq.config), rev(seq.config);
  ClassicPredictor p(seq.config.truncation);
  for (std::size_t i = 0; i < seq.frames.size(); ++i) {
    fuse_frame(fwd, seq.frames[i].depth, nullptr, seq.intr, seq.poses[i], p,
               {});
  }
  for (std::size_t i = seq.frames.size(); i-- > 0;) {
    fuse_frame(rev, seq.frames[i].depth, nullptr, seq.intr, seq.poses[i], p,
               {});
  }
  // Extraction reads the evolving volume, but ClassicPredictor ignores it,
  // so both orders integrate the same contributions.
  for (std::size_t j = 0; j < fwd.size(); ++j) {
    EXPECT_NEAR(fwd.weight(j), rev.weight(j),
                4e-3 * std::max(1.0f, fwd.weight(j)));
    EXPECT_NEAR(fwd.tsdf(j), rev.tsdf(j), 1e-3);
  }
}

TEST(FuseFrameTest, FrameOrderExactWeightsOnLattice) {
  // Power-of-two voxel size puts every sample exactly on a voxel center.
  VolumeConfig c = column(StoragePrecision::kHalf);
  c.voxel_size = 1.0 / 64;
  c.origin = Vec3(-1.0 / 64, -1.0 / 64, 0.0);
  c.truncation = 4.0 / 64;
  VoxelVolume fwd(c), rev(c);
  ClassicPredictor p(c.truncation);
  const std::vector<float> depths{10, 12, 15, 20, 11, 13};
  for (float d : depths) {
    fuse_frame(fwd, single(d / 64), nullptr, kPinhole, Pose(), p, {});
  }
  for (auto it = depths.rbegin(); it != depths.rend(); ++it) {
    fuse_frame(rev, single(*it / 64), nullptr, kPinhole, Pose(), p, {});
  }
  for (std::size_t j = 0; j < fwd.size(); ++j) {
    EXPECT_EQ(fwd.weight(j), rev.weight(j));
    EXPECT_NEAR(fwd.tsdf(j), rev.tsdf(j), 1e-3);
  }
  // Windows span depth +- 4 voxels, so every frame but depth 20 reaches z 12.
  EXPECT_EQ(fwd.weight(fwd.index(1, 1, 12)), 5.0f);
}

TEST(FilterOutliersTest, Thresholds) {
  SphereSequence seq(4, 8, StoragePrecision::kHalf);
  VoxelVolume vol(seq.config);
  ClassicPredictor p(seq.config.truncation);
  for (std::size_t i = 0; i < seq.frames.size(); ++i) {
    fuse_frame(vol, seq.frames[i].depth, nullptr, seq.intr, seq.poses[i], p,
               {});
  }
  const VoxelVolume same = filter_outliers(vol, 0.0);
  for (std::size_t j = 0; j < vol.size(); ++j) {
    EXPECT_EQ(same.weight(j), vol.weight(j));
  }
  const VoxelVolume none = filter_outliers(vol, vol.max_weight() + 1.0);
  EXPECT_EQ(snapshot_stats(none).occupied_voxels, 0u);
  EXPECT_TRUE(marching_cubes(none, 0.0).empty());
  EXPECT_GT(snapshot_stats(vol).occupied_voxels, 0u);

  const VoxelVolume two = filter_outliers(vol, 2.0);
  for (std::size_t j = 0; j < vol.size(); ++j) {
    EXPECT_EQ(two.weight(j), vol.weight(j) < 2.0f ? 0.0f : vol.weight(j));
    EXPECT_EQ(two.tsdf(j), vol.tsdf(j));
  }
  EXPECT_THROW(filter_outliers(vol, -1.0), ConfigError);
}

// Projective per-voxel TSDF fusion: every voxel center is projected into each
// frame and compared with the depth of the pixel it lands in. A frame counts
// for a voxel when the voxel lies inside the extraction band along the pixel
// ray. With `smooth_only`, voxels whose splat footprint straddles a depth
// edge or an invalid pixel in some frame are left out.
struct OracleResult {
  double rms = 0.0;
  std::size_t voxels = 0;
};

OracleResult dense_oracle_rms(const VoxelVolume& vol,
                              const std::vector<DepthFrame>& depth,
                              const std::vector<Pose>& poses,
                              const Intrinsics& intr, int window_size,
                              bool smooth_only) {
  const auto& cfg = vol.config();
  const double half_band = (window_size - 1) / 2 * cfg.voxel_size;
  double sq = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < vol.size(); ++i) {
    if (vol.weight(i) <= 0.0f) continue;
    const auto c = vol.coords(i);
    const Vec3 x = vol.voxel_center(c[0], c[1], c[2]);
    double sw = 0.0, swv = 0.0;
    bool rough = false;
    for (std::size_t f = 0; f < poses.size() && !rough; ++f) {
      const Vec3 cam = poses[f].inverse_transform(x);
      if (cam.z() <= 0) continue;
      const int u = int(std::lround(intr.fx() * cam.x() / cam.z() + intr.cx()));
      const int v = int(std::lround(intr.fy() * cam.y() / cam.z() + intr.cy()));
      if (!intr.contains({u, v})) continue;
      const double d = depth[f].at(u, v);
      if (d <= 0) continue;
      const double sdf = d - cam.z();
      if (std::abs(sdf) * cam.norm() / cam.z() > half_band) continue;
      if (smooth_only) {
        const int r = int(std::ceil(intr.fx() * cfg.voxel_size / cam.z())) + 1;
        double lo = d, hi = d;
        for (int dv = -r; dv <= r; ++dv) {
          for (int du = -r; du <= r; ++du) {
            const Pixel q{u + du, v + dv};
            const double dq = intr.contains(q) ? depth[f].at(q.u, q.v) : 0.0;
            lo = std::min(lo, dq);
            hi = std::max(hi, dq);
          }
        }
        rough = lo <= 0.0 || hi - lo > 5.0 * cfg.voxel_size;
      }
      sw += 1.0;
      swv += std::clamp(sdf, -cfg.truncation, cfg.truncation);
    }
    if (sw == 0.0 || rough) continue;
    const double diff = vol.tsdf(i) - swv / sw;
    sq += diff * diff;
    ++n;
  }
  return {n ? std::sqrt(sq / n) : 0.0, n};
}

struct OracleRig {
  AnalyticScene scene{{Primitive{SphereShape{Vec3::Zero(), 0.5}, 1, "sphere"}}};
  VolumeConfig cfg;
  TrajectoryParams tp;
  OracleRig() {
    cfg.dims = {128, 128, 128};
    cfg.voxel_size = 0.01;
    cfg.origin = Vec3::Constant(-0.635);
    cfg.truncation = 0.05;
    cfg.precision = StoragePrecision::kSingle;
    tp.steps = 24;
    tp.radius = 1.5;
    tp.elevation = -1.0;
    tp.elevation_end = 1.0;
  }
};

TEST(FuseFrameTest, SingleFrameMatchesDenseProjectiveOracle) {
  OracleRig rig;
  const Intrinsics intr(400.0, 400.0, 256.0, 256.0, 512, 512);
  const Pose pose = trajectory(rig.tp)[6];
  VoxelVolume vol(rig.cfg);
  ClassicPredictor p(rig.cfg.truncation);
  const std::vector<DepthFrame> depth{render_depth(rig.scene, intr, pose).depth};
  fuse_frame(vol, depth[0], nullptr, intr, pose, p, {});
  const OracleResult r = dense_oracle_rms(vol, depth, {pose}, intr, 9, true);
  ASSERT_GT(r.voxels, 5000u);
  RecordProperty("rms_m", std::to_string(r.rms));
  EXPECT_LE(r.rms, 0.1 * rig.cfg.voxel_size) << "over " << r.voxels;
}

TEST(FuseFrameTest, SequenceTracksDenseProjectiveOracle) {
  OracleRig rig;
  const Intrinsics intr(100.0, 100.0, 64.0, 64.0, 128, 128);
  const std::vector<Pose> poses = trajectory(rig.tp);
  VoxelVolume vol(rig.cfg);
  ClassicPredictor p(rig.cfg.truncation);
  FusionWorkspace ws;
  std::vector<DepthFrame> depth;
  for (const Pose& pose : poses) {
    depth.push_back(render_depth(rig.scene, intr, pose).depth);
    fuse_frame(vol, depth.back(), nullptr, intr, pose, p, {}, ws);
  }
  const OracleResult r = dense_oracle_rms(vol, depth, poses, intr, 9, false);
  ASSERT_GT(r.voxels, 10000u);
  RecordProperty("rms_m", std::to_string(r.rms));
  EXPECT_LE(r.rms, 0.5 * rig.cfg.voxel_size) << "over " << r.voxels;
}

}  // namespace
}  // namespace sfusion
