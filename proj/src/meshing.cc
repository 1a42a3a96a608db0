#include "sfusion/meshing.h"

#include <cmath>
#include <sstream>
#include <unordered_map>

#include "marching_cubes_tables.h"

namespace sfusion {
namespace {

constexpr int kCornerOffset[8][3] = {{0, 0, 0}, {1, 0, 0}, {1, 1, 0},
                                     {0, 1, 0}, {0, 0, 1}, {1, 0, 1},
                                     {1, 1, 1}, {0, 1, 1}};

}  // namespace

double TriMesh::area() const {
  double a = 0.0;
  for (const auto& t : triangles) {
    a += 0.5 * (vertices[t[1]] - vertices[t[0]])
                   .cross(vertices[t[2]] - vertices[t[0]])
                   .norm();
  }
  return a;
}

std::optional<std::string> TriMesh::validate() const {
  std::ostringstream msg;
  if (vertex_labels.size() != vertices.size() ||
      vertex_scores.size() != vertices.size()) {
    return "vertex attribute arrays do not match vertex count";
  }
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    if (!vertices[i].allFinite()) {
      msg << "vertex " << i << " is not finite";
      return msg.str();
    }
  }
  for (std::size_t i = 0; i < triangles.size(); ++i) {
    const auto& t = triangles[i];
    for (auto idx : t) {
      if (idx >= vertices.size()) {
        msg << "triangle " << i << " index " << idx << " out of range";
        return msg.str();
      }
    }
    if (t[0] == t[1] || t[1] == t[2] || t[0] == t[2]) {
      msg << "triangle " << i << " repeats a vertex";
      return msg.str();
    }
  }
  return std::nullopt;
}

TriMesh marching_cubes(const VoxelVolume& volume, double weight_threshold) {
  TriMesh mesh;
  const auto& dims = volume.dims();
  if (dims[0] < 2 || dims[1] < 2 || dims[2] < 2) return mesh;

  // Key: lower lattice index * 3 + axis.
  std::unordered_map<std::uint64_t, std::uint32_t> edge_vertex;

  auto corner_ok = [&](std::size_t i) {
    const float w = volume.weight(i);
    return w > 0.0f && w >= weight_threshold;
  };

  std::size_t idx[8];
  float val[8];
  for (int x = 0; x + 1 < dims[0]; ++x) {
    for (int y = 0; y + 1 < dims[1]; ++y) {
      for (int z = 0; z + 1 < dims[2]; ++z) {
        bool ok = true;
        int cube = 0;
        for (int c = 0; c < 8 && ok; ++c) {
          idx[c] = volume.index(x + kCornerOffset[c][0],
                                y + kCornerOffset[c][1],
                                z + kCornerOffset[c][2]);
          ok = corner_ok(idx[c]);
          val[c] = volume.tsdf(idx[c]);
          if (val[c] < 0.0f) cube |= 1 << c;
        }
        if (!ok || mc::kEdgeTable[cube] == 0) continue;

        std::uint32_t edge_ids[12];
        for (int e = 0; e < 12; ++e) {
          if (!(mc::kEdgeTable[cube] & (1 << e))) continue;
          const int a = mc::kEdgeCorners[e][0];
          const int b = mc::kEdgeCorners[e][1];
          const int lo = idx[a] < idx[b] ? a : b;
          int axis = 0;
          while (kCornerOffset[a][axis] == kCornerOffset[b][axis]) ++axis;
          const std::uint64_t key = std::uint64_t(idx[lo]) * 3 + axis;
          const auto [it, inserted] = edge_vertex.try_emplace(
              key, static_cast<std::uint32_t>(mesh.vertices.size()));
          edge_ids[e] = it->second;
          if (!inserted) continue;

          const double va = val[a];
          const double vb = val[b];
          const double t = va / (va - vb);
          const Vec3 pa = volume.voxel_center(x + kCornerOffset[a][0],
                                              y + kCornerOffset[a][1],
                                              z + kCornerOffset[a][2]);
          const Vec3 pb = volume.voxel_center(x + kCornerOffset[b][0],
                                              y + kCornerOffset[b][1],
                                              z + kCornerOffset[b][2]);
          mesh.vertices.push_back(pa + t * (pb - pa));
          const std::size_t src =
              std::abs(vb) < std::abs(va) ? idx[b] : idx[a];
          mesh.vertex_labels.push_back(volume.label(src));
          mesh.vertex_scores.push_back(volume.score(src));
        }
        for (int i = 0; mc::kTriTable[cube][i] != -1; i += 3) {
          // Table winding faces inward for "inside = negative"; swap to get
          // outward normals along the TSDF gradient.
          mesh.triangles.push_back({edge_ids[mc::kTriTable[cube][i]],
                                    edge_ids[mc::kTriTable[cube][i + 2]],
                                    edge_ids[mc::kTriTable[cube][i + 1]]});
        }
      }
    }
  }
  return mesh;
}

}  // namespace sfusion
