#include "cli.h"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>

#include "CLI11.hpp"

#include "sfusion/errors.h"
#include "sfusion/synth.h"

namespace sfusion::cli {
namespace {

using Clock = std::chrono::steady_clock;

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

std::string class_name(const std::map<int, std::string>& names, int id) {
  const auto it = names.find(id);
  return it != names.end() ? it->second : "class_" + std::to_string(id);
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError(path.string() + ": cannot write");
  f << text;
  if (!f) throw IoError(path.string() + ": write failed");
}

bool is_ply(const fs::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return ext == ".ply";
}

DepthFrame load_frame_depth(const FrameRecord& rec, const Intrinsics& intr,
                            const DatasetConventions& conv) {
  DepthFrame depth = load_depth(rec.depth_path, conv.depth_scale);
  if (depth.width != intr.width() || depth.height != intr.height()) {
    throw FormatError(rec.depth_path.string() + ": image is " +
                      std::to_string(depth.width) + "x" +
                      std::to_string(depth.height) + ", intrinsics expect " +
                      std::to_string(intr.width()) + "x" +
                      std::to_string(intr.height()));
  }
  if (conv.depth_kind == DepthKind::kRayLength) {
    for (int v = 0; v < depth.height; ++v) {
      for (int u = 0; u < depth.width; ++u) {
        float& d = depth.at(u, v);
        if (d > 0.0f) d = float(to_z_depth(d, {u, v}, intr));
      }
    }
  }
  return depth;
}

RunConfig resolve_config(const std::string& config_path,
                         const fs::path& dataset_root) {
  if (!config_path.empty()) return load_run_config(config_path);
  const fs::path fallback = dataset_root / "config.json";
  if (fs::exists(fallback)) return load_run_config(fallback);
  throw NotFoundError(fallback.string() +
                      ": no run config (pass --config)");
}

std::map<int, std::string> names_from_scene(const std::string& path) {
  if (path.empty()) return {};
  return load_scene_spec(path).class_names;
}

// ---------------------------------------------------------------- fuse

struct FuseArgs {
  std::string config;
  std::string dataset;
  std::string output;
  std::string checkpoint;
  std::string report;
  std::optional<double> filter;
  bool no_semantics = false;
  bool fps_report = false;
};

int cmd_fuse(const FuseArgs& a, std::ostream& out) {
  RunConfig config = resolve_config(a.config, a.dataset);
  if (a.filter) {
    config.fusion.outlier_weight_threshold = *a.filter;
    config.fusion.validate();
  }
  const bool semantics = config.fusion.semantics_enabled && !a.no_semantics;
  config.fusion.semantics_enabled = semantics;

  const Dataset dataset = load_dataset(a.dataset, config.dataset.pose_convention);
  VoxelVolume volume(config.volume);
  ClassicPredictor predictor(config.volume.truncation);
  const FuseSummary s =
      fuse_dataset(volume, dataset, config, predictor, semantics);

  const TriMesh mesh =
      filtered_mesh(volume, config.fusion.outlier_weight_threshold);
  write_mesh_ply(mesh, a.output);
  if (!a.checkpoint.empty()) save_checkpoint(volume, a.checkpoint);

  out << "frames fused: " << s.frames_fused << "\n";
  out << "frames skipped: " << s.frames_skipped << "\n";
  for (const std::string& f : s.faults) out << "  " << f << "\n";
  out << "mesh: " << mesh.vertices.size() << " vertices, "
      << mesh.triangles.size() << " triangles -> " << a.output << "\n";
  if (!a.checkpoint.empty()) out << "checkpoint: " << a.checkpoint << "\n";

  if (a.fps_report) {
    out << "timing over " << s.steady_frames << " steady-state frames ("
        << kWarmupFrames << " warmup frames excluded)\n";
    if (s.steady_frames > 0) {
      const double n = s.steady_frames;
      out << "  extract   " << fixed(1e3 * s.steady_stages.extract / n, 3)
          << " ms/frame\n";
      out << "  predict   " << fixed(1e3 * s.steady_stages.predict / n, 3)
          << " ms/frame\n";
      out << "  integrate " << fixed(1e3 * s.steady_stages.integrate / n, 3)
          << " ms/frame\n";
      out << "  semantic  " << fixed(1e3 * s.steady_stages.semantic / n, 3)
          << " ms/frame\n";
      out << "  fusion fps " << fixed(n / s.steady_fusion_seconds, 2) << "\n";
      out << "  end-to-end fps " << fixed(n / s.steady_total_seconds, 2)
          << "\n";
    }
  }

  if (!a.report.empty()) {
    nlohmann::json r = {{"frames_fused", s.frames_fused},
                        {"frames_skipped", s.frames_skipped},
                        {"faults", s.faults},
                        {"vertices", mesh.vertices.size()},
                        {"triangles", mesh.triangles.size()}};
    write_text(a.report, r.dump(2) + "\n");
  }
  return s.frames_fused > 0 || dataset.frames.empty() ? kOk : kDataError;
}

// ---------------------------------------------------------------- eval

struct EvalArgs {
  std::string pred;
  std::string gt;
  std::string csv;
  std::string iou_csv;
  std::string names;
  double threshold = 0.01;
  double density = 1e5;
  double filter = 0.0;
  double label_radius = 0.02;
  std::uint64_t seed = 0;
  bool iou = false;
};

TriMesh load_prediction(const fs::path& path, double filter) {
  if (is_ply(path)) return read_mesh_ply(path);
  return filtered_mesh(load_checkpoint(path), filter);
}

int cmd_eval(const EvalArgs& a, std::ostream& out) {
  const TriMesh pred = load_prediction(a.pred, a.filter);
  const TriMesh gt = read_mesh_ply(a.gt);
  if (pred.empty() && gt.empty()) {
    throw FormatError("both meshes are empty: " + a.pred + ", " + a.gt);
  }
  const ReconReport r =
      fscore(pred, gt, {a.threshold, a.density, a.seed});
  out << "threshold " << fixed(r.distance_threshold, 4) << " m\n";
  out << "precision " << fixed(r.precision, 2) << "\n";
  out << "recall " << fixed(r.recall, 2) << "\n";
  out << "F1 " << fixed(r.f1, 2) << "\n";
  out << "points " << r.n_pred_points << " pred, " << r.n_gt_points
      << " gt\n";
  if (!a.csv.empty()) write_text(a.csv, recon_csv(r));

  if (a.iou) {
    const LabeledPoints source = labeled_vertices(pred);
    const std::vector<ClassId> transferred =
        transfer_labels(gt.vertices, source, a.label_radius);
    const IouReport iou = iou_per_class(transferred, gt.vertex_labels, 256);
    const auto names = names_from_scene(a.names);
    out << "class_id class_name iou support\n";
    for (const ClassIou& c : iou.classes) {
      out << int(c.class_id) << " " << class_name(names, c.class_id) << " "
          << fixed(c.iou, 4) << " " << c.support << "\n";
    }
    out << "mean IoU " << fixed(iou.mean_iou, 4) << "\n";
    if (!a.iou_csv.empty()) write_text(a.iou_csv, iou_csv(iou, names));
  }
  return kOk;
}

// ---------------------------------------------------------------- synth

struct SynthArgs {
  std::string scene;
  std::string output;
  std::optional<int> frames;
  std::string noise;
  std::optional<std::uint64_t> seed;
};

int cmd_synth(const SynthArgs& a, std::ostream& out) {
  SceneSpec spec = load_scene_spec(a.scene);
  if (a.frames) spec.trajectory.steps = *a.frames;
  NoiseModel noise = spec.noise;
  if (!a.noise.empty()) noise = noise_preset(a.noise, noise.seed);
  if (a.seed) noise.seed = *a.seed;
  spec.noise = noise;
  spec.config.noise = noise;
  spec.config.dataset.pose_convention = PoseConvention::kCameraToWorld;
  spec.config.dataset.depth_kind = DepthKind::kZDepth;
  const auto& dims = spec.config.volume.dims;
  if (dims[0] * dims[1] * dims[2] <= 1) {
    throw ConfigError(a.scene + ": config.volume.dims must describe the "
                      "scene volume");
  }

  const fs::path root(a.output);
  std::error_code ec;
  for (const char* sub : {"depth", "label", "score"}) {
    fs::create_directories(root / sub, ec);
    if (ec) {
      throw IoError((root / sub).string() + ": " + ec.message());
    }
  }

  const std::vector<Pose> poses = trajectory(spec.trajectory);
  const double scale = spec.config.dataset.depth_scale;
  for (std::size_t i = 0; i < poses.size(); ++i) {
    const RenderedFrame f = render_depth(spec.scene, spec.camera, poses[i]);
    const DepthFrame noisy = apply_noise(f.depth, noise, i);
    const std::string name = frame_name(int(i));
    write_depth(root / "depth" / name, noisy, scale);
    write_labels(root / "label" / name, f.labels);
    write_scores(root / "score" / name, f.labels);
  }
  save_trajectory(root / "trajectory.txt", poses);
  save_intrinsics(root / "intrinsics.txt", spec.camera);
  save_run_config(root / "config.json", spec.config);
  write_text(root / "scene.json", to_json(spec).dump(2) + "\n");

  const VoxelVolume gt = bake_gt_volume(spec.scene, spec.config.volume);
  const TriMesh gt_mesh = marching_cubes(gt, 0.0);
  write_mesh_ply(gt_mesh, root / "gt_mesh.ply");

  out << "wrote " << poses.size() << " frames to " << root.string() << "\n";
  out << "ground truth mesh: " << gt_mesh.vertices.size() << " vertices, "
      << gt_mesh.triangles.size() << " triangles\n";
  return kOk;
}

// ---------------------------------------------------------------- sweep

struct SweepArgs {
  std::string dataset;
  std::string checkpoint;
  std::string config;
  std::string gt;
  std::string output;
  std::vector<double> thresholds;
  double threshold = 0.01;
  double density = 1e5;
  std::uint64_t seed = 0;
};

int cmd_sweep(const SweepArgs& a, std::ostream& out, std::ostream& err) {
  if (a.thresholds.empty()) {
    err << "sweep: --thresholds needs at least one value\n";
    return kUsage;
  }
  std::optional<VoxelVolume> volume;
  std::string gt_path = a.gt;
  if (!a.checkpoint.empty()) {
    volume.emplace(load_checkpoint(a.checkpoint));
  } else {
    const RunConfig config = resolve_config(a.config, a.dataset);
    const Dataset dataset =
        load_dataset(a.dataset, config.dataset.pose_convention);
    volume.emplace(config.volume);
    ClassicPredictor predictor(config.volume.truncation);
    fuse_dataset(*volume, dataset, config, predictor, false);
    if (gt_path.empty()) gt_path = (fs::path(a.dataset) / "gt_mesh.ply").string();
  }
  if (gt_path.empty()) {
    err << "sweep: --gt is required with --checkpoint\n";
    return kUsage;
  }
  const TriMesh gt = read_mesh_ply(gt_path);
  const std::vector<SweepRow> rows =
      sweep(*volume, gt, a.thresholds, {a.threshold, a.density, a.seed});
  const std::string csv = sweep_csv(rows);
  if (a.output.empty()) {
    out << csv;
  } else {
    write_text(a.output, csv);
    out << "wrote " << rows.size() << " rows to " << a.output << "\n";
  }
  return kOk;
}

// ---------------------------------------------------------------- info

int cmd_info(const std::string& path, std::ostream& out) {
  const fs::path p(path);
  if (fs::is_directory(p)) {
    const Dataset d = load_dataset(p);
    const Intrinsics& k = d.intrinsics;
    out << "dataset " << p.string() << "\n";
    out << "frames " << d.frames.size() << "\n";
    out << "intrinsics fx " << k.fx() << " fy " << k.fy() << " cx " << k.cx()
        << " cy " << k.cy() << " size " << k.width() << "x" << k.height()
        << "\n";
    const auto labeled = std::count_if(
        d.frames.begin(), d.frames.end(),
        [](const FrameRecord& r) { return r.label_path.has_value(); });
    out << "label frames " << labeled << "\n";
    return kOk;
  }
  if (is_ply(p)) {
    const TriMesh m = read_mesh_ply(p);
    out << "mesh " << p.string() << "\n";
    out << "vertices " << m.vertices.size() << "\n";
    out << "triangles " << m.triangles.size() << "\n";
    out << "area " << fixed(m.area(), 6) << " m^2\n";
    std::map<int, std::size_t> hist;
    for (ClassId l : m.vertex_labels) ++hist[l];
    for (const auto& [id, n] : hist) {
      out << "label " << id << " vertices " << n << "\n";
    }
    return kOk;
  }
  const VoxelVolume v = load_checkpoint(p);
  const VolumeConfig& c = v.config();
  const VolumeStats s = snapshot_stats(v);
  out << "checkpoint " << p.string() << "\n";
  out << "dims " << c.dims[0] << " " << c.dims[1] << " " << c.dims[2] << "\n";
  out << "voxel_size " << c.voxel_size << "\n";
  out << "origin " << c.origin[0] << " " << c.origin[1] << " " << c.origin[2]
      << "\n";
  out << "truncation " << c.truncation << "\n";
  out << "precision "
      << (c.precision == StoragePrecision::kHalf ? "half" : "single") << "\n";
  out << "class_count " << c.class_count << "\n";
  out << "observed voxels " << s.occupied_voxels << "\n";
  out << "labeled voxels " << s.labeled_voxels << "\n";
  const WeightHistogram& h = s.weight_histogram;
  for (std::size_t i = 0; i < h.counts.size(); ++i) {
    out << "weight [" << h.edges[i] << ", "
        << (i + 1 < h.edges.size() ? std::to_string(int(h.edges[i + 1]))
                                   : std::string("inf"))
        << ") " << h.counts[i] << "\n";
  }
  return kOk;
}

}  // namespace

FuseSummary fuse_dataset(VoxelVolume& volume, const Dataset& dataset,
                         const RunConfig& config, FusionPredictor& predictor,
                         bool semantics) {
  FuseSummary s;
  FusionConfig fusion = config.fusion;
  fusion.semantics_enabled = semantics;
  FusionWorkspace ws;
  for (std::size_t i = 0; i < dataset.frames.size(); ++i) {
    const FrameRecord& rec = dataset.frames[i];
    const auto t0 = Clock::now();
    DepthFrame depth;
    std::optional<LabelFrame> labels;
    try {
      depth = load_frame_depth(rec, dataset.intrinsics, config.dataset);
      if (semantics && rec.label_path) {
        labels = load_labels(*rec.label_path, rec.score_path,
                             config.volume.class_count);
        if (labels->width != depth.width || labels->height != depth.height) {
          throw FormatError(rec.label_path->string() +
                            ": size differs from the depth image");
        }
      }
    } catch (const Error& e) {
      throw FormatError("frame " + std::to_string(rec.index) + ": " +
                        e.what());
    }
    FrameReport report;
    try {
      report = fuse_frame(volume, depth, labels ? &*labels : nullptr,
                          dataset.intrinsics, rec.pose, predictor, fusion, ws);
    } catch (const PredictorFaultError& e) {
      ++s.frames_skipped;
      s.faults.push_back("frame " + std::to_string(rec.index) + ": " +
                         e.what());
      continue;
    }
    const double total =
        std::chrono::duration<double>(Clock::now() - t0).count();
    ++s.frames_fused;
    if (int(i) >= kWarmupFrames) {
      ++s.steady_frames;
      s.steady_fusion_seconds += report.elapsed;
      s.steady_total_seconds += total;
      s.steady_stages += report.stages;
    }
  }
  return s;
}

TriMesh filtered_mesh(const VoxelVolume& volume, double threshold) {
  if (threshold <= 0.0) return marching_cubes(volume, 0.0);
  return marching_cubes(filter_outliers(volume, threshold), 0.0);
}

std::vector<SweepRow> sweep(const VoxelVolume& volume, const TriMesh& gt,
                            std::vector<double> thresholds,
                            const FscoreOptions& options) {
  std::sort(thresholds.begin(), thresholds.end());
  std::vector<SweepRow> rows;
  rows.reserve(thresholds.size());
  for (double t : thresholds) {
    rows.push_back({t, fscore(filtered_mesh(volume, t), gt, options)});
  }
  return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::ostringstream s;
  s << "threshold,precision,recall,f1\n";
  for (const SweepRow& r : rows) {
    s << r.threshold << "," << fixed(r.report.precision, 4) << ","
      << fixed(r.report.recall, 4) << "," << fixed(r.report.f1, 4) << "\n";
  }
  return s.str();
}

std::string iou_csv(const IouReport& report,
                    const std::map<int, std::string>& class_names) {
  std::ostringstream s;
  s << "class_id,class_name,iou,support\n";
  for (const ClassIou& c : report.classes) {
    s << int(c.class_id) << "," << class_name(class_names, c.class_id) << ","
      << fixed(c.iou, 6) << "," << c.support << "\n";
  }
  return s.str();
}

std::string recon_csv(const ReconReport& r) {
  std::ostringstream s;
  s << "threshold,precision,recall,f1,n_pred_points,n_gt_points\n";
  s << r.distance_threshold << "," << fixed(r.precision, 4) << ","
    << fixed(r.recall, 4) << "," << fixed(r.f1, 4) << "," << r.n_pred_points
    << "," << r.n_gt_points << "\n";
  return s.str();
}

int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"Semantic TSDF fusion: fuse, evaluate and synthesise scenes",
               "sfusion"};
  app.require_subcommand(1);
  app.failure_message(CLI::FailureMessage::help);

  FuseArgs fa;
  auto* fuse = app.add_subcommand("fuse", "Fuse a dataset into a mesh");
  fuse->add_option("--config", fa.config,
                   "Run config (JSON); defaults to <dataset>/config.json");
  fuse->add_option("--dataset", fa.dataset, "Dataset directory")->required();
  fuse->add_option("--output", fa.output, "Output mesh (PLY)")->required();
  fuse->add_flag("--no-semantics", fa.no_semantics,
                 "Ignore label frames; the mesh carries label 0 everywhere");
  fuse->add_option("--filter", fa.filter,
                   "Outlier weight threshold applied before meshing");
  fuse->add_option("--checkpoint", fa.checkpoint,
                   "Also write the fused volume to this checkpoint");
  fuse->add_flag("--fps-report", fa.fps_report,
                 "Print per-stage timing and frames per second");
  fuse->add_option("--report", fa.report, "Write a JSON summary here");

  EvalArgs ea;
  auto* eval = app.add_subcommand("eval", "Evaluate a reconstruction");
  eval->add_option("--pred", ea.pred, "Predicted mesh (PLY) or checkpoint")
      ->required();
  eval->add_option("--gt", ea.gt, "Ground-truth mesh (PLY, vertex labels)")
      ->required();
  eval->add_option("--threshold", ea.threshold,
                   "F-score distance threshold in metres")
      ->capture_default_str();
  eval->add_option("--density", ea.density,
                   "Surface samples per square metre")
      ->capture_default_str();
  eval->add_option("--seed", ea.seed, "Surface sampling seed")
      ->capture_default_str();
  eval->add_option("--filter", ea.filter,
                   "Outlier weight threshold when --pred is a checkpoint")
      ->capture_default_str();
  eval->add_flag("--iou", ea.iou, "Also report per-class IoU");
  eval->add_option("--label-radius", ea.label_radius,
                   "Label transfer radius in metres")
      ->capture_default_str();
  eval->add_option("--names", ea.names, "Scene file providing class names");
  eval->add_option("--csv", ea.csv, "Write the F-score report as CSV");
  eval->add_option("--iou-csv", ea.iou_csv, "Write the IoU table as CSV");

  SynthArgs sa;
  auto* synth = app.add_subcommand("synth", "Render a synthetic dataset");
  synth->add_option("--scene", sa.scene, "Scene file (JSON)")->required();
  synth->add_option("--output", sa.output, "Output dataset directory")
      ->required();
  synth->add_option("--frames", sa.frames, "Number of frames")
      ->check(CLI::PositiveNumber);
  synth->add_option("--noise", sa.noise, "Noise preset")
      ->check(CLI::IsMember({"none", "default", "heavy"}));
  synth->add_option("--seed", sa.seed, "Noise seed");

  SweepArgs wa;
  auto* sw = app.add_subcommand(
      "sweep", "Evaluate one fused volume across outlier thresholds");
  auto* sw_dataset =
      sw->add_option("--dataset", wa.dataset, "Dataset directory to fuse");
  auto* sw_ckpt =
      sw->add_option("--checkpoint", wa.checkpoint, "Fused volume checkpoint");
  sw_dataset->excludes(sw_ckpt);
  sw->add_option("--config", wa.config,
                 "Run config; defaults to <dataset>/config.json");
  sw->add_option("--gt", wa.gt,
                 "Ground-truth mesh; defaults to <dataset>/gt_mesh.ply");
  sw->add_option("--thresholds", wa.thresholds,
                 "Comma-separated weight thresholds")
      ->delimiter(',')
      ->check([](const std::string& v) {
        return v.empty() ? std::string("empty threshold value") : std::string();
      })
      ->required();
  sw->add_option("--threshold", wa.threshold, "F-score distance threshold")
      ->capture_default_str();
  sw->add_option("--density", wa.density, "Surface samples per square metre")
      ->capture_default_str();
  sw->add_option("--seed", wa.seed, "Surface sampling seed")
      ->capture_default_str();
  sw->add_option("--output", wa.output, "CSV output path (default stdout)");

  std::string info_path;
  auto* info = app.add_subcommand(
      "info", "Describe a checkpoint, mesh or dataset directory");
  info->add_option("path", info_path, "Checkpoint, PLY mesh or dataset")
      ->required();

  std::vector<const char*> argv;
  for (const std::string& a : args) argv.push_back(a.c_str());
  try {
    app.parse(int(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }
  if (sw->parsed() && wa.dataset.empty() && wa.checkpoint.empty()) {
    err << "sweep: one of --dataset or --checkpoint is required\n";
    return kUsage;
  }

  try {
    if (fuse->parsed()) return cmd_fuse(fa, out);
    if (eval->parsed()) return cmd_eval(ea, out);
    if (synth->parsed()) return cmd_synth(sa, out);
    if (sw->parsed()) return cmd_sweep(wa, out, err);
    if (info->parsed()) return cmd_info(info_path, out);
  } catch (const AllocationRefusedError& e) {
    err << "error: " << e.what() << "\n";
    return kDataError;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kDataError;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kInternal;
  }
  return kInternal;
}

}  // namespace sfusion::cli
