#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sfusion/geometry.h"
#include "sfusion/volume.h"

namespace sfusion {

struct TriMesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<std::uint32_t, 3>> triangles;
  std::vector<ClassId> vertex_labels;
  std::vector<float> vertex_scores;

  bool empty() const { return triangles.empty(); }
  double area() const;
  // Description of the first broken invariant (index range, repeated
  // indices, non-finite coordinates, attribute sizes), if any.
  std::optional<std::string> validate() const;
};

// Marching cubes over the TSDF zero crossing. A cell is polygonised only if
// all eight corners have weight > 0 and weight >= weight_threshold. Vertices
// sit on the crossing edge by linear interpolation and take label and score
// from the edge endpoint with the smaller |tsdf|. Shared edges produce shared
// vertices; cells are visited in z-fastest order.
TriMesh marching_cubes(const VoxelVolume& volume, double weight_threshold);

}  // namespace sfusion
