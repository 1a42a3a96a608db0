#include "sfusion/io.h"

#include <cmath>
#include <fstream>
#include <iterator>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "sfusion/errors.h"
#include "sfusion/synth.h"
#include "test_util.h"

namespace sfusion {
namespace {

using testing::TempDir;

std::string read_bytes(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

void write_text(const fs::path& p, const std::string& s) {
  std::ofstream(p) << s;
}

TEST(DepthIoTest, RoundTripAtMillimetres) {
  TempDir dir("depth");
  DepthFrame f(7, 5);
  std::mt19937 rng(1);
  std::uniform_real_distribution<float> u(0.1f, 60.0f);
  for (float& d : f.depth) d = u(rng);
  f.depth[3] = 0.0f;
  f.depth[4] = 100.0f;  // saturates
  write_depth(dir / "d.png", f);
  const DepthFrame g = load_depth(dir / "d.png");
  ASSERT_EQ(g.width, 7);
  ASSERT_EQ(g.height, 5);
  for (std::size_t i = 0; i < f.depth.size(); ++i) {
    if (i == 4) {
      EXPECT_FLOAT_EQ(g.depth[i], 65.535f);
    } else {
      EXPECT_NEAR(g.depth[i], f.depth[i], 0.0005 + 1e-6);
    }
  }
  EXPECT_EQ(g.depth[3], 0.0f);
  const DepthFrame h = load_depth(dir / "d.png", 5000.0);
  EXPECT_NEAR(h.depth[0], g.depth[0] * 1000.0 / 5000.0, 1e-6);
}

TEST(DepthIoTest, Errors) {
  TempDir dir("depth_err");
  EXPECT_THROW(load_depth(dir / "missing.png"), NotFoundError);
  write_text(dir / "junk.png", "not an image");
  EXPECT_THROW(load_depth(dir / "junk.png"), FormatError);
  LabelFrame l(4, 4, 10);
  write_labels(dir / "eight.png", l);
  EXPECT_THROW(load_depth(dir / "eight.png"), FormatError);
  try {
    load_depth(dir / "missing.png");
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("missing.png"), std::string::npos);
  }
}

TEST(LabelIoTest, ShiftAndScores) {
  TempDir dir("labels");
  LabelFrame f(3, 2, 10);
  f.labels = {0, 1, 2, 9, 5, 0};
  f.scores = {0.0f, 1.0f, 0.5f, 0.2f, 1.0f, 0.0f};
  write_labels(dir / "l.png", f);
  write_scores(dir / "s.png", f);
  const LabelFrame g = load_labels(dir / "l.png", dir / "s.png", 10);
  EXPECT_EQ(g.labels, f.labels);
  for (std::size_t i = 0; i < f.scores.size(); ++i) {
    EXPECT_NEAR(g.scores[i], f.scores[i], 0.5 / 255.0 + 1e-7);
  }
  const LabelFrame h = load_labels(dir / "l.png", std::nullopt, 10);
  EXPECT_EQ(h.scores, (std::vector<float>{0, 1, 1, 1, 1, 0}));
  EXPECT_THROW(load_labels(dir / "l.png", std::nullopt, 5), FormatError);
  LabelFrame small(2, 2, 10);
  write_scores(dir / "small.png", small);
  EXPECT_THROW(load_labels(dir / "l.png", dir / "small.png", 10), FormatError);
}

TEST(TrajectoryIoTest, RoundTripIsExact) {
  TempDir dir("traj");
  std::mt19937_64 rng(2);
  std::vector<Pose> poses;
  for (int i = 0; i < 20; ++i) poses.push_back(testing::random_pose(rng));
  save_trajectory(dir / "t.txt", poses);
  const auto back = load_trajectory(dir / "t.txt");
  ASSERT_EQ(back.size(), poses.size());
  for (std::size_t i = 0; i < poses.size(); ++i) {
    EXPECT_TRUE(back[i].matrix().isApprox(poses[i].matrix(), 1e-14));
  }
}

TEST(TrajectoryIoTest, QuaternionAndMatrixForms) {
  TempDir dir("traj_forms");
  const double s = std::sqrt(0.5);
  write_text(dir / "t.txt",
             "# comment\n"
             "1 2 3 0 0 0 1\n"
             "\n"
             "0 0 0 0 0 " + std::to_string(s) + " " + std::to_string(s) + "\n"
             "1 0 0 4  0 1 0 5  0 0 1 6  0 0 0 1\n");
  const auto poses = load_trajectory(dir / "t.txt");
  ASSERT_EQ(poses.size(), 3u);
  EXPECT_TRUE(poses[0].translation().isApprox(Vec3(1, 2, 3)));
  EXPECT_TRUE(poses[0].rotation().isIdentity());
  EXPECT_TRUE(poses[1].transform(Vec3::UnitX()).isApprox(Vec3::UnitY(), 1e-6));
  EXPECT_TRUE(poses[2].translation().isApprox(Vec3(4, 5, 6)));

  const auto inv = load_trajectory(dir / "t.txt",
                                   PoseConvention::kWorldToCamera);
  EXPECT_TRUE(inv[0].translation().isApprox(Vec3(-1, -2, -3)));
}

TEST(TrajectoryIoTest, Errors) {
  TempDir dir("traj_err");
  EXPECT_THROW(load_trajectory(dir / "none.txt"), NotFoundError);
  write_text(dir / "a.txt", "1 2 3\n");
  EXPECT_THROW(load_trajectory(dir / "a.txt"), FormatError);
  write_text(dir / "b.txt", "1 2 3 0 0 0 x\n");
  EXPECT_THROW(load_trajectory(dir / "b.txt"), FormatError);
  write_text(dir / "c.txt", "2 0 0 0  0 1 0 0  0 0 1 0  0 0 0 1\n");
  EXPECT_THROW(load_trajectory(dir / "c.txt"), FormatError);
  write_text(dir / "d.txt", "0 0 0 0 0 0 0\n");
  EXPECT_THROW(load_trajectory(dir / "d.txt"), FormatError);
  try {
    load_trajectory(dir / "b.txt");
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("b.txt:1"), std::string::npos);
  }
}

TEST(IntrinsicsIoTest, RoundTrip) {
  TempDir dir("intr");
  const Intrinsics k(525.5, 524.25, 319.5, 239.5, 640, 480);
  save_intrinsics(dir / "k.txt", k);
  const Intrinsics g = load_intrinsics(dir / "k.txt");
  EXPECT_EQ(g.fx(), k.fx());
  EXPECT_EQ(g.fy(), k.fy());
  EXPECT_EQ(g.cx(), k.cx());
  EXPECT_EQ(g.width(), 640);
  write_text(dir / "bad.txt", "1 2 3\n");
  EXPECT_THROW(load_intrinsics(dir / "bad.txt"), FormatError);
  EXPECT_THROW(load_intrinsics(dir / "none.txt"), NotFoundError);
}

TEST(PaletteTest, MatchesGoldenTable) {
  std::ifstream in(fs::path(SFUSION_TEST_DATA) / "palette.txt");
  ASSERT_TRUE(in);
  std::string line;
  int rows = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    int id, r, g, b;
    ss >> id >> r >> g >> b;
    const auto c = class_color(ClassId(id));
    EXPECT_EQ(c[0], r) << id;
    EXPECT_EQ(c[1], g) << id;
    EXPECT_EQ(c[2], b) << id;
    ++rows;
  }
  EXPECT_EQ(rows, 21);
  EXPECT_EQ(class_color(200), class_color(200));
}

TriMesh labeled_sphere_mesh() {
  VolumeConfig c;
  c.dims = {24, 24, 24};
  c.voxel_size = 0.01;
  c.origin = Vec3::Constant(-0.115);
  const AnalyticScene s({Primitive{SphereShape{Vec3::Zero(), 0.08}, 3, ""},
                         Primitive{SphereShape{Vec3(0.08, 0, 0), 0.04}, 6, ""}});
  return marching_cubes(bake_gt_volume(s, c), 0.0);
}

TEST(PlyTest, BinaryRoundTrip) {
  TempDir dir("ply");
  TriMesh m = labeled_sphere_mesh();
  for (std::size_t i = 0; i < m.vertex_scores.size(); ++i) {
    m.vertex_scores[i] = float(i % 7) / 7.0f;
  }
  write_mesh_ply(m, dir / "m.ply");
  const TriMesh g = read_mesh_ply(dir / "m.ply");
  ASSERT_EQ(g.vertices.size(), m.vertices.size());
  EXPECT_EQ(g.triangles, m.triangles);
  EXPECT_EQ(g.vertex_labels, m.vertex_labels);
  EXPECT_EQ(g.vertex_scores, m.vertex_scores);
  for (std::size_t i = 0; i < m.vertices.size(); ++i) {
    EXPECT_TRUE(g.vertices[i].isApprox(m.vertices[i].cast<float>().cast<double>(),
                                       0.0));
  }
  write_mesh_ply(g, dir / "n.ply");
  EXPECT_EQ(read_bytes(dir / "m.ply"), read_bytes(dir / "n.ply"));
}

TEST(PlyTest, AsciiWithoutAttributes) {
  TempDir dir("ply_ascii");
  write_text(dir / "a.ply",
             "ply\nformat ascii 1.0\ncomment hi\nelement vertex 4\n"
             "property float x\nproperty float y\nproperty float z\n"
             "element face 2\nproperty list uchar int vertex_indices\n"
             "end_header\n0 0 0\n1 0 0\n0 1 0\n1 1 0\n3 0 1 2\n3 2 1 3\n");
  const TriMesh m = read_mesh_ply(dir / "a.ply");
  ASSERT_EQ(m.vertices.size(), 4u);
  ASSERT_EQ(m.triangles.size(), 2u);
  EXPECT_EQ(m.vertex_labels, std::vector<ClassId>(4, 0));
  EXPECT_DOUBLE_EQ(m.area(), 1.0);
}

TEST(PlyTest, Errors) {
  TempDir dir("ply_err");
  EXPECT_THROW(read_mesh_ply(dir / "none.ply"), NotFoundError);
  write_text(dir / "a.ply", "obj\n");
  EXPECT_THROW(read_mesh_ply(dir / "a.ply"), FormatError);
  write_text(dir / "b.ply",
             "ply\nformat ascii 1.0\nelement vertex 2\nproperty float x\n"
             "property float y\nproperty float z\nend_header\n0 0 0\n");
  EXPECT_THROW(read_mesh_ply(dir / "b.ply"), FormatError);
  write_text(dir / "c.ply",
             "ply\nformat ascii 1.0\nelement vertex 1\nproperty float x\n"
             "property float y\nproperty float z\nelement face 1\n"
             "property list uchar int vertex_indices\nend_header\n0 0 0\n"
             "3 0 1 2\n");
  EXPECT_THROW(read_mesh_ply(dir / "c.ply"), FormatError);
}

VoxelVolume random_volume(StoragePrecision p, std::uint64_t seed) {
  VolumeConfig c;
  c.dims = {9, 7, 5};
  c.voxel_size = 0.02;
  c.origin = Vec3(-0.1, 0.2, 0.3);
  c.truncation = 0.06;
  c.precision = p;
  c.class_count = 12;
  VoxelVolume v(c);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<float> u(-0.06f, 0.06f), w(0.0f, 50.0f),
      s(0.0f, 1.0f);
  std::uniform_int_distribution<int> l(0, 11);
  for (std::size_t i = 0; i < v.size(); ++i) {
    v.set_tsdf(i, u(rng));
    v.set_weight(i, w(rng));
    v.set_label(i, ClassId(l(rng)));
    v.set_score(i, s(rng));
  }
  return v;
}

TEST(CheckpointTest, BitExactRoundTrip) {
  TempDir dir("ckpt");
  for (StoragePrecision p :
       {StoragePrecision::kHalf, StoragePrecision::kSingle}) {
    const VoxelVolume v = random_volume(p, 3);
    save_checkpoint(v, dir / "a.vxf");
    const VoxelVolume g = load_checkpoint(dir / "a.vxf");
    EXPECT_EQ(g.dims(), v.dims());
    EXPECT_EQ(g.config().voxel_size, 0.02);
    EXPECT_TRUE(g.config().origin.isApprox(v.config().origin, 0.0));
    EXPECT_EQ(g.config().truncation, 0.06);
    EXPECT_EQ(g.config().precision, p);
    EXPECT_EQ(g.config().class_count, 12);
    for (std::size_t i = 0; i < v.size(); ++i) {
      ASSERT_EQ(g.tsdf(i), v.tsdf(i));
      ASSERT_EQ(g.weight(i), v.weight(i));
      ASSERT_EQ(g.label(i), v.label(i));
      ASSERT_EQ(g.score(i), v.score(i));
    }
    save_checkpoint(g, dir / "b.vxf");
    const std::string bytes = read_bytes(dir / "a.vxf");
    EXPECT_EQ(bytes, read_bytes(dir / "b.vxf"));
    const std::size_t scalar = p == StoragePrecision::kHalf ? 2 : 4;
    EXPECT_EQ(bytes.size(), 4u + 12 + 8 + 24 + 8 + 1 + 2 +
                                v.size() * (3 * scalar + 1));
    EXPECT_EQ(bytes.substr(0, 4), "VXF1");
  }
}

TEST(CheckpointTest, Errors) {
  TempDir dir("ckpt_err");
  EXPECT_THROW(load_checkpoint(dir / "none.vxf"), NotFoundError);
  write_text(dir / "bad.vxf", "VXF2 and more");
  EXPECT_THROW(load_checkpoint(dir / "bad.vxf"), FormatError);
  save_checkpoint(random_volume(StoragePrecision::kHalf, 1), dir / "a.vxf");
  const std::string bytes = read_bytes(dir / "a.vxf");
  write_text(dir / "short.vxf", bytes.substr(0, bytes.size() - 1));
  EXPECT_THROW(load_checkpoint(dir / "short.vxf"), FormatError);
  write_text(dir / "long.vxf", bytes + "x");
  EXPECT_THROW(load_checkpoint(dir / "long.vxf"), FormatError);
  EXPECT_THROW(load_checkpoint(dir / "a.vxf", 100), AllocationRefusedError);
}

void make_dataset(const fs::path& root, int frames, int poses) {
  fs::create_directories(root / "depth");
  fs::create_directories(root / "label");
  save_intrinsics(root / "intrinsics.txt", Intrinsics(10, 10, 2, 2, 4, 4));
  DepthFrame d(4, 4);
  std::fill(d.depth.begin(), d.depth.end(), 1.0f);
  for (int i = 0; i < frames; ++i) write_depth(root / "depth" / frame_name(i), d);
  write_labels(root / "label" / frame_name(0), LabelFrame(4, 4, 3));
  save_trajectory(root / "trajectory.txt", std::vector<Pose>(poses));
}

TEST(DatasetTest, LoadsFramesInOrder) {
  TempDir dir("dataset");
  make_dataset(dir.path(), 3, 3);
  const Dataset ds = load_dataset(dir.path());
  ASSERT_EQ(ds.frames.size(), 3u);
  EXPECT_EQ(ds.frames[2].depth_path.filename(), "000002.png");
  EXPECT_TRUE(ds.frames[0].label_path.has_value());
  EXPECT_FALSE(ds.frames[1].label_path.has_value());
  EXPECT_FALSE(ds.frames[0].score_path.has_value());
  EXPECT_EQ(ds.intrinsics.width(), 4);
  EXPECT_EQ(frame_name(12), "000012.png");
}

TEST(DatasetTest, Errors) {
  TempDir dir("dataset_err");
  EXPECT_THROW(load_dataset(dir / "none"), NotFoundError);
  make_dataset(dir / "a", 3, 2);
  EXPECT_THROW(load_dataset(dir / "a"), FormatError);
  make_dataset(dir / "b", 2, 2);
  fs::remove(dir / "b" / "trajectory.txt");
  try {
    load_dataset(dir / "b");
    FAIL();
  } catch (const NotFoundError& e) {
    EXPECT_NE(std::string(e.what()).find("trajectory.txt"), std::string::npos);
  }
}

}  // namespace
}  // namespace sfusion
