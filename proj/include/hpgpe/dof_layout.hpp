#pragma once

#include <array>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "hpgpe/mesh.hpp"

namespace hpgpe {

/// Affine map x = x0 + J (xi, eta) from the reference triangle.
struct CellGeometry {
  Point x0;
  Eigen::Matrix2d J;
  Eigen::Matrix2d G;  // J^{-1}
  double det = 0.0;   // |det J|

  static CellGeometry from_vertices(const std::array<Point, 3>& xy);

  Point map(double xi, double eta) const {
    return {x0.x + J(0, 0) * xi + J(0, 1) * eta, x0.y + J(1, 0) * xi + J(1, 1) * eta};
  }
  std::array<double, 3> barycentric(Point p) const {
    const double dx = p.x - x0.x, dy = p.y - x0.y;
    const double xi = G(0, 0) * dx + G(0, 1) * dy;
    const double eta = G(1, 0) * dx + G(1, 1) * dy;
    return {1.0 - xi - eta, xi, eta};
  }
};

/// Input triangle for the dof builder. Vertex ids only need to be unique
/// within the cell soup; they fix edge orientation.
struct CellSpec {
  std::array<int, 3> vid{};
  std::array<Point, 3> xy{};
  int degree = 1;
};

/// One cell with its local frame (vertices sorted by id) and its local
/// shape index -> global dof map (-1: eliminated or not in the space).
struct CellDofs {
  std::array<int, 3> vid{};
  std::array<Point, 3> xy{};
  int degree = 1;
  std::array<int, 3> edge_degree{};  // minimum rule, per local edge
  CellGeometry geo;
  std::vector<int> dofs;
};

struct DofLayout {
  std::vector<CellDofs> cells;
  int ndofs = 0;
};

/// Builds an H1-conforming hierarchical dof numbering on a conforming cell
/// soup. Edges used by a single cell are Dirichlet: their modes and their
/// end vertices are eliminated. Edge degrees follow the minimum rule.
DofLayout build_dof_layout(std::span<const CellSpec> cells);

}  // namespace hpgpe
