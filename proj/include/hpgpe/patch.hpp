#pragma once

#include <array>
#include <vector>

#include "hpgpe/mesh.hpp"

namespace hpgpe {

/// A triangle of a local patch. Vertex ids are mesh ids, except that
/// midpoints introduced by a virtual refinement get ids >= num_vertices().
struct PatchCell {
  std::array<int, 3> vid{};
  std::array<Point, 3> xy{};
  int degree = 1;
  int source = -1;  // mesh element that contains this cell
};

struct PatchMesh {
  enum class Kind { neighbor, refined };

  Kind kind = Kind::neighbor;
  int seed = -1;
  std::vector<int> elements;  // mesh elements covered; seed first
  std::vector<PatchCell> cells;
  std::vector<int> local_to_global;  // distinct vertex ids; -1 for virtual midpoints
  int n_kappa = 1;  // number of cells replacing the seed
};

/// The seed element and its face-wise neighbours, with their own degrees.
PatchMesh neighbor_patch(const Mesh& mesh, int kappa);

/// The seed red-refined into four children, each neighbour bisected at the
/// new midpoint of the shared edge. All cells get the seed's degree.
PatchMesh refined_patch(const Mesh& mesh, int kappa);

}  // namespace hpgpe
