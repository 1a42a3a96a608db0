#include "sfusion/io.h"

#include <png.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <map>
#include <memory>
#include <sstream>

#include <Eigen/SVD>

#include "sfusion/errors.h"

namespace sfusion {
namespace {

static_assert(std::endian::native == std::endian::little,
              "binary formats assume a little-endian host");

struct PngImage {
  int width = 0;
  int height = 0;
  int bit_depth = 0;
  int channels = 0;
  std::vector<std::uint16_t> pixels;  // row-major, one value per sample
};

struct FileCloser {
  void operator()(std::FILE* f) const { std::fclose(f); }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_file(const fs::path& path, const char* mode) {
  FilePtr f(std::fopen(path.c_str(), mode));
  if (!f) {
    if (mode[0] == 'r' && !fs::exists(path)) {
      throw NotFoundError(path.string() + ": file not found");
    }
    throw IoError(path.string() + ": cannot open (" + std::strerror(errno) +
                  ")");
  }
  return f;
}

void png_error_fn(png_structp png, png_const_charp msg) {
  auto* what = static_cast<std::string*>(png_get_error_ptr(png));
  *what = msg;
  png_longjmp(png, 1);
}

void png_warning_fn(png_structp, png_const_charp) {}

PngImage read_png(const fs::path& path) {
  FilePtr file = open_file(path, "rb");
  unsigned char sig[8];
  if (std::fread(sig, 1, 8, file.get()) != 8 || png_sig_cmp(sig, 0, 8) != 0) {
    throw FormatError(path.string() + ": not a PNG file");
  }
  std::string error;
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &error,
                                           png_error_fn, png_warning_fn);
  png_infop info = png_create_info_struct(png);
  PngImage img;
  std::vector<png_bytep> rows;
  std::vector<std::uint8_t> buffer;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw FormatError(path.string() + ": " + error);
  }
  png_init_io(png, file.get());
  png_set_sig_bytes(png, 8);
  png_read_info(png, info);
  img.width = static_cast<int>(png_get_image_width(png, info));
  img.height = static_cast<int>(png_get_image_height(png, info));
  img.bit_depth = png_get_bit_depth(png, info);
  img.channels = png_get_channels(png, info);
  const int color_type = png_get_color_type(png, info);
  if (color_type == PNG_COLOR_TYPE_PALETTE) img.channels = 3;
  if (img.bit_depth == 16) png_set_swap(png);
  png_read_update_info(png, info);
  const std::size_t row_bytes = png_get_rowbytes(png, info);
  buffer.resize(row_bytes * img.height);
  rows.resize(img.height);
  for (int y = 0; y < img.height; ++y) rows[y] = buffer.data() + y * row_bytes;
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);

  if (color_type != PNG_COLOR_TYPE_GRAY) {
    img.pixels.clear();
    return img;
  }
  img.pixels.resize(std::size_t(img.width) * img.height);
  for (std::size_t i = 0; i < img.pixels.size(); ++i) {
    if (img.bit_depth == 16) {
      std::uint16_t v;
      std::memcpy(&v, buffer.data() + 2 * i, 2);
      img.pixels[i] = v;
    } else if (img.bit_depth == 8) {
      img.pixels[i] = buffer[i];
    }
  }
  return img;
}

void write_png(const fs::path& path, int width, int height, int bit_depth,
               const std::vector<std::uint16_t>& pixels) {
  FilePtr file = open_file(path, "wb");
  std::string error;
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &error,
                                            png_error_fn, png_warning_fn);
  png_infop info = png_create_info_struct(png);
  const std::size_t bytes = bit_depth == 16 ? 2 : 1;
  std::vector<std::uint8_t> buffer(std::size_t(width) * height * bytes);
  for (std::size_t i = 0; i < pixels.size(); ++i) {
    if (bytes == 2) {
      std::memcpy(buffer.data() + 2 * i, &pixels[i], 2);
    } else {
      buffer[i] = static_cast<std::uint8_t>(pixels[i]);
    }
  }
  std::vector<png_bytep> rows(height);
  for (int y = 0; y < height; ++y) {
    rows[y] = buffer.data() + std::size_t(y) * width * bytes;
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw IoError(path.string() + ": " + error);
  }
  png_init_io(png, file.get());
  png_set_IHDR(png, info, width, height, bit_depth, PNG_COLOR_TYPE_GRAY,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  if (bit_depth == 16) png_set_swap(png);
  png_write_image(png, rows.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

PngImage read_gray(const fs::path& path, int expected_depth,
                   const char* what) {
  PngImage img = read_png(path);
  if (img.channels != 1 || img.bit_depth != expected_depth ||
      img.pixels.empty()) {
    throw FormatError(path.string() + ": " + what + " must be a " +
                      std::to_string(expected_depth) +
                      "-bit single-channel image (got " +
                      std::to_string(img.bit_depth) + "-bit, " +
                      std::to_string(img.channels) + " channel(s))");
  }
  return img;
}

Mat3 nearest_rotation(const Mat3& m) {
  Eigen::JacobiSVD<Mat3> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat3 d = Mat3::Identity();
  d(2, 2) = (svd.matrixU() * svd.matrixV().transpose()).determinant() < 0
                ? -1.0
                : 1.0;
  return svd.matrixU() * d * svd.matrixV().transpose();
}

template <class T>
void put(std::ostream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::istream& in, const fs::path& path) {
  T v;
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw FormatError(path.string() + ": truncated file");
  return v;
}

}  // namespace

DepthFrame load_depth(const fs::path& path, double scale) {
  if (!(scale > 0.0)) throw ConfigError("depth scale must be positive");
  const PngImage img = read_gray(path, 16, "depth image");
  DepthFrame frame(img.width, img.height);
  for (std::size_t i = 0; i < img.pixels.size(); ++i) {
    frame.depth[i] = static_cast<float>(img.pixels[i] / scale);
  }
  return frame;
}

void write_depth(const fs::path& path, const DepthFrame& frame, double scale) {
  if (!(scale > 0.0)) throw ConfigError("depth scale must be positive");
  std::vector<std::uint16_t> raw(frame.depth.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const double d = frame.depth[i];
    const double r = std::isfinite(d) && d > 0.0 ? std::round(d * scale) : 0.0;
    raw[i] = static_cast<std::uint16_t>(std::clamp(r, 0.0, 65535.0));
  }
  write_png(path, frame.width, frame.height, 16, raw);
}

LabelFrame load_labels(const fs::path& label_path,
                       const std::optional<fs::path>& score_path,
                       int class_count) {
  const PngImage labels = read_gray(label_path, 8, "label image");
  LabelFrame frame(labels.width, labels.height, class_count);
  std::optional<PngImage> scores;
  if (score_path) {
    scores = read_gray(*score_path, 8, "score image");
    if (scores->width != labels.width || scores->height != labels.height) {
      throw FormatError(score_path->string() +
                        ": score image size differs from " +
                        label_path.string());
    }
  }
  for (std::size_t i = 0; i < labels.pixels.size(); ++i) {
    const auto raw = static_cast<std::uint8_t>(labels.pixels[i]);
    if (raw == kRawUnlabeled) continue;
    const int id = raw + 1;
    if (id >= class_count) {
      throw FormatError(label_path.string() + ": raw label " +
                        std::to_string(raw) + " exceeds class count " +
                        std::to_string(class_count));
    }
    frame.labels[i] = static_cast<ClassId>(id);
    frame.scores[i] = scores ? static_cast<float>(scores->pixels[i] / 255.0)
                             : 1.0f;
  }
  return frame;
}

void write_labels(const fs::path& path, const LabelFrame& frame) {
  std::vector<std::uint16_t> raw(frame.labels.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    raw[i] = frame.labels[i] == kUnlabeled ? kRawUnlabeled
                                           : frame.labels[i] - 1;
  }
  write_png(path, frame.width, frame.height, 8, raw);
}

void write_scores(const fs::path& path, const LabelFrame& frame) {
  std::vector<std::uint16_t> raw(frame.scores.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    raw[i] = static_cast<std::uint16_t>(
        std::lround(std::clamp(frame.scores[i], 0.0f, 1.0f) * 255.0));
  }
  write_png(path, frame.width, frame.height, 8, raw);
}

std::vector<Pose> load_trajectory(const fs::path& path,
                                  PoseConvention convention) {
  std::ifstream in(path);
  if (!in) {
    if (!fs::exists(path)) {
      throw NotFoundError(path.string() + ": trajectory file not found");
    }
    throw IoError(path.string() + ": cannot open trajectory file");
  }
  std::vector<Pose> poses;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream ss(line);
    std::vector<double> v;
    std::string tok;
    while (ss >> tok) {
      try {
        std::size_t used = 0;
        v.push_back(std::stod(tok, &used));
        if (used != tok.size()) throw std::invalid_argument(tok);
      } catch (const std::exception&) {
        throw FormatError(path.string() + ":" + std::to_string(line_no) +
                          ": not a number '" + tok + "'");
      }
    }
    const std::string where = path.string() + ": pose " +
                              std::to_string(poses.size()) + " (line " +
                              std::to_string(line_no) + ")";
    Mat4 m = Mat4::Identity();
    if (v.size() == 16) {
      for (int i = 0; i < 16; ++i) m(i / 4, i % 4) = v[i];
    } else if (v.size() == 7) {
      const Eigen::Quaterniond q(v[6], v[3], v[4], v[5]);
      if (!(q.norm() > 1e-12) || !std::isfinite(q.norm())) {
        throw FormatError(where + ": degenerate quaternion");
      }
      m.topLeftCorner<3, 3>() = q.normalized().toRotationMatrix();
      m.topRightCorner<3, 1>() = Vec3(v[0], v[1], v[2]);
    } else {
      throw FormatError(where + ": expected 16 or 7 numbers, got " +
                        std::to_string(v.size()));
    }
    if (!m.allFinite()) throw FormatError(where + ": non-finite entries");
    const Mat3 r = m.topLeftCorner<3, 3>();
    if ((r.transpose() * r - Mat3::Identity()).cwiseAbs().maxCoeff() > 1e-4 ||
        std::abs(r.determinant() - 1.0) > 1e-4) {
      throw FormatError(where + ": rotation is not orthonormal "
                                "(singular or non-invertible pose)");
    }
    m.topLeftCorner<3, 3>() = nearest_rotation(r);
    Pose pose;
    try {
      pose = Pose::from_matrix(m);
    } catch (const ConfigError& e) {
      throw FormatError(where + ": " + e.what());
    }
    poses.push_back(convention == PoseConvention::kWorldToCamera
                        ? pose.inverse()
                        : pose);
  }
  return poses;
}

void save_trajectory(const fs::path& path, const std::vector<Pose>& poses) {
  std::ofstream out(path);
  if (!out) throw IoError(path.string() + ": cannot write trajectory");
  out << std::setprecision(17);
  for (const Pose& p : poses) {
    const Mat4 m = p.matrix();
    for (int i = 0; i < 16; ++i) out << (i ? " " : "") << m(i / 4, i % 4);
    out << '\n';
  }
  if (!out) throw IoError(path.string() + ": write failed");
}

Intrinsics load_intrinsics(const fs::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw NotFoundError(path.string() + ": intrinsics file not found");
  }
  double fx, fy, cx, cy;
  int w, h;
  if (!(in >> fx >> fy >> cx >> cy >> w >> h)) {
    throw FormatError(path.string() +
                      ": expected 'fx fy cx cy width height'");
  }
  try {
    return Intrinsics(fx, fy, cx, cy, w, h);
  } catch (const ConfigError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

void save_intrinsics(const fs::path& path, const Intrinsics& intr) {
  std::ofstream out(path);
  if (!out) throw IoError(path.string() + ": cannot write intrinsics");
  out << std::setprecision(17) << intr.fx() << ' ' << intr.fy() << ' '
      << intr.cx() << ' ' << intr.cy() << ' ' << intr.width() << ' '
      << intr.height() << '\n';
}

std::array<std::uint8_t, 3> class_color(ClassId id) {
  static constexpr std::array<std::array<std::uint8_t, 3>, 21> kPalette = {{
      {128, 128, 128},  // 0 unlabeled
      {174, 199, 232}, {152, 223, 138}, {31, 119, 180},  {255, 187, 120},
      {188, 189, 34},  {140, 86, 75},   {255, 152, 150}, {214, 39, 40},
      {197, 176, 213}, {148, 103, 189}, {196, 156, 148}, {23, 190, 207},
      {247, 182, 210}, {219, 219, 141}, {255, 127, 14},  {158, 218, 229},
      {44, 160, 44},   {112, 128, 144}, {227, 119, 194}, {82, 84, 163},
  }};
  if (id < kPalette.size()) return kPalette[id];
  // Deterministic spread for the remaining ids.
  const std::uint32_t h = std::uint32_t(id) * 2654435761u;
  return {static_cast<std::uint8_t>(64 + (h >> 24) % 192),
          static_cast<std::uint8_t>(64 + (h >> 16) % 192),
          static_cast<std::uint8_t>(64 + (h >> 8) % 192)};
}

void write_mesh_ply(const TriMesh& mesh, const fs::path& path) {
  if (auto err = mesh.validate()) {
    throw ConfigError(path.string() + ": invalid mesh: " + *err);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError(path.string() + ": cannot write mesh");
  out << "ply\nformat binary_little_endian 1.0\n"
      << "element vertex " << mesh.vertices.size() << "\n"
      << "property float x\nproperty float y\nproperty float z\n"
      << "property uchar red\nproperty uchar green\nproperty uchar blue\n"
      << "property uchar label\nproperty float score\n"
      << "element face " << mesh.triangles.size() << "\n"
      << "property list uchar int vertex_indices\nend_header\n";
  for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
    for (int a = 0; a < 3; ++a) put(out, static_cast<float>(mesh.vertices[i][a]));
    const auto rgb = class_color(mesh.vertex_labels[i]);
    put(out, rgb[0]);
    put(out, rgb[1]);
    put(out, rgb[2]);
    put(out, mesh.vertex_labels[i]);
    put(out, mesh.vertex_scores[i]);
  }
  for (const auto& t : mesh.triangles) {
    put(out, std::uint8_t{3});
    for (auto idx : t) put(out, static_cast<std::int32_t>(idx));
  }
  if (!out) throw IoError(path.string() + ": write failed");
}

namespace {

struct PlyProperty {
  std::string name;
  std::string type;
  bool is_list = false;
  std::string count_type;
};

struct PlyElement {
  std::string name;
  std::size_t count = 0;
  std::vector<PlyProperty> props;
};

std::size_t ply_type_size(const std::string& t, const fs::path& path) {
  static const std::map<std::string, std::size_t> sizes = {
      {"char", 1},   {"uchar", 1},  {"int8", 1},    {"uint8", 1},
      {"short", 2},  {"ushort", 2}, {"int16", 2},   {"uint16", 2},
      {"int", 4},    {"uint", 4},   {"int32", 4},   {"uint32", 4},
      {"float", 4},  {"float32", 4}, {"double", 8}, {"float64", 8}};
  const auto it = sizes.find(t);
  if (it == sizes.end()) {
    throw FormatError(path.string() + ": unsupported PLY type '" + t + "'");
  }
  return it->second;
}

double read_binary_value(std::istream& in, const std::string& t,
                         const fs::path& path) {
  if (t == "char" || t == "int8") return get<std::int8_t>(in, path);
  if (t == "uchar" || t == "uint8") return get<std::uint8_t>(in, path);
  if (t == "short" || t == "int16") return get<std::int16_t>(in, path);
  if (t == "ushort" || t == "uint16") return get<std::uint16_t>(in, path);
  if (t == "int" || t == "int32") return get<std::int32_t>(in, path);
  if (t == "uint" || t == "uint32") return get<std::uint32_t>(in, path);
  if (t == "float" || t == "float32") return get<float>(in, path);
  if (t == "double" || t == "float64") return get<double>(in, path);
  throw FormatError(path.string() + ": unsupported PLY type '" + t + "'");
}

}  // namespace

TriMesh read_mesh_ply(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    if (!fs::exists(path)) throw NotFoundError(path.string() + ": not found");
    throw IoError(path.string() + ": cannot open mesh");
  }
  std::string line;
  if (!std::getline(in, line) || line != "ply") {
    throw FormatError(path.string() + ": missing 'ply' magic");
  }
  bool binary = false;
  std::vector<PlyElement> elements;
  while (true) {
    if (!std::getline(in, line)) {
      throw FormatError(path.string() + ": unterminated PLY header");
    }
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream ss(line);
    std::string kw;
    ss >> kw;
    if (kw == "end_header") break;
    if (kw == "format") {
      std::string fmt;
      ss >> fmt;
      if (fmt == "binary_little_endian") {
        binary = true;
      } else if (fmt != "ascii") {
        throw FormatError(path.string() + ": unsupported PLY format " + fmt);
      }
    } else if (kw == "element") {
      PlyElement e;
      ss >> e.name >> e.count;
      elements.push_back(e);
    } else if (kw == "property") {
      if (elements.empty()) {
        throw FormatError(path.string() + ": property before element");
      }
      PlyProperty p;
      std::string t;
      ss >> t;
      if (t == "list") {
        p.is_list = true;
        ss >> p.count_type >> p.type >> p.name;
        ply_type_size(p.count_type, path);
      } else {
        p.type = t;
        ss >> p.name;
      }
      ply_type_size(p.type, path);
      elements.back().props.push_back(p);
    }
  }

  TriMesh mesh;
  for (const PlyElement& e : elements) {
    const bool is_vertex = e.name == "vertex";
    const bool is_face = e.name == "face";
    if (is_vertex) {
      int found = 0;
      for (const auto& p : e.props) {
        if (p.name == "x" || p.name == "y" || p.name == "z") ++found;
      }
      if (found != 3) {
        throw FormatError(path.string() + ": vertex element lacks x/y/z");
      }
      mesh.vertices.assign(e.count, Vec3::Zero());
      mesh.vertex_labels.assign(e.count, kUnlabeled);
      mesh.vertex_scores.assign(e.count, 0.0f);
    }
    for (std::size_t i = 0; i < e.count; ++i) {
      std::istringstream row;
      if (!binary) {
        if (!std::getline(in, line)) {
          throw FormatError(path.string() + ": truncated ASCII body");
        }
        row.str(line);
      }
      auto scalar = [&](const std::string& t) -> double {
        if (binary) return read_binary_value(in, t, path);
        double v;
        if (!(row >> v)) {
          throw FormatError(path.string() + ": malformed ASCII row");
        }
        return v;
      };
      for (const auto& p : e.props) {
        if (p.is_list) {
          const auto n = static_cast<std::size_t>(scalar(p.count_type));
          std::vector<std::uint32_t> idx(n);
          for (auto& v : idx) v = static_cast<std::uint32_t>(scalar(p.type));
          if (is_face && p.name == "vertex_indices") {
            for (std::size_t k = 1; k + 1 < n; ++k) {
              mesh.triangles.push_back({idx[0], idx[k], idx[k + 1]});
            }
          }
          continue;
        }
        const double v = scalar(p.type);
        if (!is_vertex) continue;
        if (p.name == "x") mesh.vertices[i].x() = v;
        else if (p.name == "y") mesh.vertices[i].y() = v;
        else if (p.name == "z") mesh.vertices[i].z() = v;
        else if (p.name == "label") mesh.vertex_labels[i] = static_cast<ClassId>(v);
        else if (p.name == "score") mesh.vertex_scores[i] = static_cast<float>(v);
      }
    }
  }
  if (auto err = mesh.validate()) {
    throw FormatError(path.string() + ": " + *err);
  }
  return mesh;
}

void save_checkpoint(const VoxelVolume& volume, const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError(path.string() + ": cannot write checkpoint");
  const VolumeConfig& cfg = volume.config();
  out.write("VXF1", 4);
  for (int d : cfg.dims) put(out, static_cast<std::uint32_t>(d));
  put(out, cfg.voxel_size);
  for (int a = 0; a < 3; ++a) put(out, cfg.origin[a]);
  put(out, cfg.truncation);
  put(out, static_cast<std::uint8_t>(cfg.precision));
  put(out, static_cast<std::uint16_t>(cfg.class_count));
  auto grid = [&](const ScalarGrid& g) {
    out.write(reinterpret_cast<const char*>(g.bytes()),
              static_cast<std::streamsize>(g.byte_size()));
  };
  grid(volume.tsdf_grid());
  grid(volume.weight_grid());
  out.write(reinterpret_cast<const char*>(volume.label_grid().data()),
            static_cast<std::streamsize>(volume.label_grid().size()));
  grid(volume.score_grid());
  if (!out) throw IoError(path.string() + ": write failed");
}

VoxelVolume load_checkpoint(const fs::path& path,
                            std::size_t memory_budget_bytes) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    if (!fs::exists(path)) throw NotFoundError(path.string() + ": not found");
    throw IoError(path.string() + ": cannot open checkpoint");
  }
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, "VXF1", 4) != 0) {
    throw FormatError(path.string() + ": not a VXF1 checkpoint");
  }
  VolumeConfig cfg;
  for (int& d : cfg.dims) d = static_cast<int>(get<std::uint32_t>(in, path));
  cfg.voxel_size = get<double>(in, path);
  for (int a = 0; a < 3; ++a) cfg.origin[a] = get<double>(in, path);
  cfg.truncation = get<double>(in, path);
  const auto precision = get<std::uint8_t>(in, path);
  if (precision > 1) {
    throw FormatError(path.string() + ": unknown precision flag " +
                      std::to_string(precision));
  }
  cfg.precision = static_cast<StoragePrecision>(precision);
  cfg.class_count = get<std::uint16_t>(in, path);
  cfg.memory_budget_bytes = memory_budget_bytes;
  std::optional<VoxelVolume> vol;
  try {
    vol.emplace(cfg);
  } catch (const ConfigError& e) {
    throw FormatError(path.string() + ": bad header: " + e.what());
  }
  auto grid = [&](ScalarGrid& g) {
    in.read(reinterpret_cast<char*>(g.mutable_bytes()),
            static_cast<std::streamsize>(g.byte_size()));
  };
  grid(vol->mutable_tsdf_grid());
  grid(vol->mutable_weight_grid());
  auto& labels = vol->mutable_label_grid();
  in.read(reinterpret_cast<char*>(labels.data()),
          static_cast<std::streamsize>(labels.size()));
  grid(vol->mutable_score_grid());
  if (!in) throw FormatError(path.string() + ": truncated checkpoint");
  if (in.peek() != std::char_traits<char>::eof()) {
    throw FormatError(path.string() + ": trailing bytes after grids");
  }
  return std::move(*vol);
}

std::string frame_name(int index) {
  std::ostringstream ss;
  ss << std::setw(6) << std::setfill('0') << index << ".png";
  return ss.str();
}

Dataset load_dataset(const fs::path& root, PoseConvention convention) {
  if (!fs::is_directory(root)) {
    throw NotFoundError(root.string() + ": dataset directory not found");
  }
  const Intrinsics intr = load_intrinsics(root / "intrinsics.txt");
  const std::vector<Pose> poses =
      load_trajectory(root / "trajectory.txt", convention);
  const fs::path depth_dir = root / "depth";
  if (!fs::is_directory(depth_dir)) {
    throw NotFoundError(depth_dir.string() + ": depth directory not found");
  }
  std::vector<fs::path> depth_files;
  for (const auto& entry : fs::directory_iterator(depth_dir)) {
    if (entry.path().extension() == ".png") depth_files.push_back(entry.path());
  }
  std::sort(depth_files.begin(), depth_files.end());
  if (depth_files.size() != poses.size()) {
    throw FormatError(root.string() + ": " +
                      std::to_string(depth_files.size()) +
                      " depth frames but " + std::to_string(poses.size()) +
                      " poses in trajectory.txt");
  }
  std::vector<FrameRecord> frames;
  for (std::size_t i = 0; i < depth_files.size(); ++i) {
    FrameRecord rec;
    rec.depth_path = depth_files[i];
    rec.index = static_cast<int>(i);
    rec.pose = poses[i];
    const fs::path name = depth_files[i].filename();
    if (fs::exists(root / "label" / name)) rec.label_path = root / "label" / name;
    if (fs::exists(root / "score" / name)) rec.score_path = root / "score" / name;
    frames.push_back(rec);
  }
  return Dataset{root, intr, std::move(frames)};
}

}  // namespace sfusion
