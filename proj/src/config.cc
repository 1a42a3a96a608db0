#include "sfusion/config.h"

#include <fstream>
#include <set>
#include <utility>

#include "sfusion/errors.h"

namespace sfusion {
namespace {

using nlohmann::json;

// Reads keys of one JSON object and rejects any key that was never asked for.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_ + ": expected an object");
  }

  bool has(const std::string& key) {
    seen_.insert(key);
    return j_.contains(key) && !j_.at(key).is_null();
  }

  template <class T>
  T get(const std::string& key, T fallback) {
    if (!has(key)) return fallback;
    try {
      return j_.at(key).get<T>();
    } catch (const json::exception&) {
      throw ConfigError(path_ + "." + key + ": wrong type");
    }
  }

  Vec3 vec3(const std::string& key, const Vec3& fallback) {
    if (!has(key)) return fallback;
    const json& v = j_.at(key);
    if (!v.is_array() || v.size() != 3) {
      throw ConfigError(path_ + "." + key + ": expected 3 numbers");
    }
    Vec3 out;
    for (int i = 0; i < 3; ++i) {
      if (!v[i].is_number()) {
        throw ConfigError(path_ + "." + key + ": expected 3 numbers");
      }
      out[i] = v[i].get<double>();
    }
    return out;
  }

  const json& child(const std::string& key) {
    seen_.insert(key);
    return j_.at(key);
  }

  std::string path(const std::string& key) const { return path_ + "." + key; }

  void finish() const {
    for (const auto& [key, _] : j_.items()) {
      if (!seen_.count(key)) {
        throw ConfigError(path_ + ": unknown key '" + key + "'");
      }
    }
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

json vec_json(const Vec3& v) { return json::array({v[0], v[1], v[2]}); }

NoiseModel parse_noise(Section s, NoiseModel m) {
  m.gaussian_sigma = s.get("gaussian_sigma", m.gaussian_sigma);
  m.depth_scaled = s.get("depth_scaled", m.depth_scaled);
  m.outlier_rate = s.get("outlier_rate", m.outlier_rate);
  m.outlier_magnitude = s.get("outlier_magnitude", m.outlier_magnitude);
  m.dropout_rate = s.get("dropout_rate", m.dropout_rate);
  m.seed = s.get<std::uint64_t>("seed", m.seed);
  s.finish();
  m.validate();
  return m;
}

json noise_json(const NoiseModel& m) {
  return {{"gaussian_sigma", m.gaussian_sigma},
          {"depth_scaled", m.depth_scaled},
          {"outlier_rate", m.outlier_rate},
          {"outlier_magnitude", m.outlier_magnitude},
          {"dropout_rate", m.dropout_rate},
          {"seed", m.seed}};
}

}  // namespace

void RunConfig::validate() const {
  volume.validate();
  fusion.validate();
  noise.validate();
  if (!(dataset.depth_scale > 0.0)) {
    throw ConfigError("dataset.depth_scale must be positive");
  }
  if (!(metrics.distance_threshold > 0.0) || !(metrics.sample_density > 0.0) ||
      !(metrics.label_radius_voxels > 0.0)) {
    throw ConfigError("metrics: threshold, density and radius must be > 0");
  }
}

RunConfig parse_run_config(const json& j) {
  RunConfig c;
  Section root(j, "config");
  if (root.has("volume")) {
    Section s(root.child("volume"), "config.volume");
    if (s.has("dims")) {
      const json& d = s.child("dims");
      if (!d.is_array() || d.size() != 3) {
        throw ConfigError("config.volume.dims: expected 3 integers");
      }
      for (int i = 0; i < 3; ++i) {
        if (!d[i].is_number_integer()) {
          throw ConfigError("config.volume.dims: expected 3 integers");
        }
        c.volume.dims[i] = d[i].get<int>();
      }
    }
    c.volume.voxel_size = s.get("voxel_size", c.volume.voxel_size);
    c.volume.origin = s.vec3("origin", c.volume.origin);
    c.volume.truncation = s.get("truncation", c.volume.truncation);
    const std::string prec = s.get<std::string>("storage_precision", "half");
    if (prec == "half") {
      c.volume.precision = StoragePrecision::kHalf;
    } else if (prec == "single") {
      c.volume.precision = StoragePrecision::kSingle;
    } else {
      throw ConfigError("config.volume.storage_precision: expected half or "
                        "single");
    }
    c.volume.class_count = s.get("class_count", c.volume.class_count);
    if (s.has("max_weight")) c.volume.max_weight = s.get("max_weight", 0.0);
    c.volume.memory_budget_bytes =
        s.get("memory_budget_bytes", c.volume.memory_budget_bytes);
    s.finish();
  }
  if (root.has("fusion")) {
    Section s(root.child("fusion"), "config.fusion");
    c.fusion.window_size = s.get("window_size", c.fusion.window_size);
    c.fusion.outlier_weight_threshold =
        s.get("outlier_weight_threshold", c.fusion.outlier_weight_threshold);
    c.fusion.semantics_enabled =
        s.get("semantics_enabled", c.fusion.semantics_enabled);
    s.finish();
  }
  if (root.has("dataset")) {
    Section s(root.child("dataset"), "config.dataset");
    c.dataset.depth_scale = s.get("depth_scale", c.dataset.depth_scale);
    const std::string conv =
        s.get<std::string>("pose_convention", "camera_to_world");
    if (conv == "camera_to_world") {
      c.dataset.pose_convention = PoseConvention::kCameraToWorld;
    } else if (conv == "world_to_camera") {
      c.dataset.pose_convention = PoseConvention::kWorldToCamera;
    } else {
      throw ConfigError("config.dataset.pose_convention: expected "
                        "camera_to_world or world_to_camera");
    }
    const std::string kind = s.get<std::string>("depth_kind", "z_depth");
    if (kind == "z_depth") {
      c.dataset.depth_kind = DepthKind::kZDepth;
    } else if (kind == "ray_length") {
      c.dataset.depth_kind = DepthKind::kRayLength;
    } else {
      throw ConfigError("config.dataset.depth_kind: expected z_depth or "
                        "ray_length");
    }
    s.finish();
  }
  if (root.has("noise")) {
    c.noise = parse_noise(Section(root.child("noise"), "config.noise"),
                          c.noise);
  }
  if (root.has("metrics")) {
    Section s(root.child("metrics"), "config.metrics");
    c.metrics.distance_threshold =
        s.get("distance_threshold", c.metrics.distance_threshold);
    c.metrics.sample_density =
        s.get("sample_density", c.metrics.sample_density);
    c.metrics.seed = s.get<std::uint64_t>("seed", c.metrics.seed);
    c.metrics.label_radius_voxels =
        s.get("label_radius_voxels", c.metrics.label_radius_voxels);
    s.finish();
  }
  root.finish();
  c.validate();
  return c;
}

namespace {

json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    if (!std::filesystem::exists(path)) {
      throw NotFoundError(path.string() + ": file not found");
    }
    throw IoError(path.string() + ": cannot open");
  }
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

void write_json(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw IoError(path.string() + ": cannot write");
  out << j.dump(2) << '\n';
  if (!out) throw IoError(path.string() + ": write failed");
}

}  // namespace

RunConfig load_run_config(const std::filesystem::path& path) {
  const json j = read_json(path);
  try {
    return parse_run_config(j);
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

json to_json(const RunConfig& c) {
  json volume = {
      {"dims", c.volume.dims},
      {"voxel_size", c.volume.voxel_size},
      {"origin", vec_json(c.volume.origin)},
      {"truncation", c.volume.truncation},
      {"storage_precision",
       c.volume.precision == StoragePrecision::kHalf ? "half" : "single"},
      {"class_count", c.volume.class_count},
      {"max_weight",
       c.volume.max_weight ? json(*c.volume.max_weight) : json(nullptr)},
      {"memory_budget_bytes", c.volume.memory_budget_bytes}};
  json fusion = {{"window_size", c.fusion.window_size},
                 {"outlier_weight_threshold", c.fusion.outlier_weight_threshold},
                 {"semantics_enabled", c.fusion.semantics_enabled}};
  json dataset = {
      {"depth_scale", c.dataset.depth_scale},
      {"pose_convention",
       c.dataset.pose_convention == PoseConvention::kCameraToWorld
           ? "camera_to_world"
           : "world_to_camera"},
      {"depth_kind",
       c.dataset.depth_kind == DepthKind::kZDepth ? "z_depth" : "ray_length"}};
  json metrics = {{"distance_threshold", c.metrics.distance_threshold},
                  {"sample_density", c.metrics.sample_density},
                  {"seed", c.metrics.seed},
                  {"label_radius_voxels", c.metrics.label_radius_voxels}};
  return {{"volume", volume},
          {"fusion", fusion},
          {"dataset", dataset},
          {"noise", noise_json(c.noise)},
          {"metrics", metrics}};
}

void save_run_config(const std::filesystem::path& path, const RunConfig& c) {
  write_json(path, to_json(c));
}

SceneSpec parse_scene_spec(const json& j) {
  SceneSpec spec;
  Section root(j, "scene");
  if (!root.has("primitives") || !root.child("primitives").is_array()) {
    throw ConfigError("scene.primitives: expected an array");
  }
  std::vector<Primitive> prims;
  const json& list = root.child("primitives");
  for (std::size_t i = 0; i < list.size(); ++i) {
    Section s(list[i], "scene.primitives[" + std::to_string(i) + "]");
    Primitive p;
    const std::string type = s.get<std::string>("type", "");
    if (type == "sphere") {
      p.shape = SphereShape{s.vec3("center", Vec3::Zero()),
                            s.get("radius", 1.0)};
    } else if (type == "plane") {
      p.shape = PlaneShape{s.vec3("point", Vec3::Zero()),
                           s.vec3("normal", Vec3::UnitZ())};
    } else if (type == "box") {
      p.shape = BoxShape{s.vec3("center", Vec3::Zero()),
                         s.vec3("half_extents", Vec3::Ones())};
    } else {
      throw ConfigError(s.path("type") + ": expected sphere, plane or box");
    }
    const int cls = s.get("class", 1);
    if (cls < 1 || cls > 255) {
      throw ConfigError(s.path("class") + ": must be in [1, 255]");
    }
    p.class_id = static_cast<ClassId>(cls);
    p.name = s.get<std::string>("name", "");
    s.finish();
    prims.push_back(std::move(p));
  }
  spec.scene = AnalyticScene(std::move(prims));
  spec.class_names = spec.scene.class_names();

  if (root.has("camera")) {
    Section s(root.child("camera"), "scene.camera");
    spec.camera = Intrinsics(s.get("fx", 100.0), s.get("fy", 100.0),
                             s.get("cx", 64.0), s.get("cy", 64.0),
                             s.get("width", 128), s.get("height", 128));
    s.finish();
  }
  if (root.has("trajectory")) {
    Section s(root.child("trajectory"), "scene.trajectory");
    TrajectoryParams& t = spec.trajectory;
    const std::string kind = s.get<std::string>("kind", "orbit");
    if (kind == "orbit") {
      t.kind = TrajectoryKind::kOrbit;
    } else if (kind == "line") {
      t.kind = TrajectoryKind::kLine;
    } else if (kind == "room_scan") {
      t.kind = TrajectoryKind::kRoomScan;
    } else {
      throw ConfigError(s.path("kind") + ": expected orbit, line or room_scan");
    }
    t.steps = s.get("steps", t.steps);
    t.target = s.vec3("target", t.target);
    t.up = s.vec3("up", t.up);
    t.radius = s.get("radius", t.radius);
    t.elevation = s.get("elevation", t.elevation);
    if (s.has("elevation_end")) {
      t.elevation_end = s.get("elevation_end", 0.0);
    }
    t.start = s.vec3("start", t.start);
    t.end = s.vec3("end", t.end);
    t.center = s.vec3("center", t.center);
    t.scan_radius = s.get("scan_radius", t.scan_radius);
    s.finish();
  }
  if (root.has("config")) spec.config = parse_run_config(root.child("config"));
  spec.noise = spec.config.noise;
  if (root.has("noise")) {
    spec.noise = parse_noise(Section(root.child("noise"), "scene.noise"),
                             spec.noise);
  }
  root.finish();
  return spec;
}

SceneSpec load_scene_spec(const std::filesystem::path& path) {
  const json j = read_json(path);
  try {
    return parse_scene_spec(j);
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

json to_json(const SceneSpec& spec) {
  json prims = json::array();
  for (const Primitive& p : spec.scene.primitives()) {
    json o;
    if (const auto* s = std::get_if<SphereShape>(&p.shape)) {
      o = {{"type", "sphere"}, {"center", vec_json(s->center)},
           {"radius", s->radius}};
    } else if (const auto* s = std::get_if<PlaneShape>(&p.shape)) {
      o = {{"type", "plane"}, {"point", vec_json(s->point)},
           {"normal", vec_json(s->normal)}};
    } else if (const auto* s = std::get_if<BoxShape>(&p.shape)) {
      o = {{"type", "box"}, {"center", vec_json(s->center)},
           {"half_extents", vec_json(s->half_extents)}};
    }
    o["class"] = p.class_id;
    if (!p.name.empty()) o["name"] = p.name;
    prims.push_back(o);
  }
  const TrajectoryParams& t = spec.trajectory;
  const char* kind = t.kind == TrajectoryKind::kOrbit  ? "orbit"
                     : t.kind == TrajectoryKind::kLine ? "line"
                                                       : "room_scan";
  return {{"primitives", prims},
          {"camera",
           {{"fx", spec.camera.fx()},
            {"fy", spec.camera.fy()},
            {"cx", spec.camera.cx()},
            {"cy", spec.camera.cy()},
            {"width", spec.camera.width()},
            {"height", spec.camera.height()}}},
          {"trajectory",
           {{"kind", kind},
            {"steps", t.steps},
            {"target", vec_json(t.target)},
            {"up", vec_json(t.up)},
            {"radius", t.radius},
            {"elevation", t.elevation},
            {"elevation_end",
             t.elevation_end ? json(*t.elevation_end) : json(nullptr)},
            {"start", vec_json(t.start)},
            {"end", vec_json(t.end)},
            {"center", vec_json(t.center)},
            {"scan_radius", t.scan_radius}}},
          {"noise", noise_json(spec.noise)},
          {"config", to_json(spec.config)}};
}

}  // namespace sfusion
