#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "hpgpe/quadrature.hpp"

/// Hierarchical H1-conforming shape functions on the reference triangle.
///
/// Local vertices are numbered so that their global ids increase; every local
/// edge (a, b) therefore runs from the lower to the higher id and shared edges
/// agree on orientation without sign tables.
///
/// Functions are ordered by polynomial degree, so the degree-q set is a prefix
/// of the degree-(q+1) set:
///   index 0..2                vertex (barycentric) functions
///   block d >= 2, offset d(d+1)/2:
///     +0, +1, +2              edge modes of degree d on edges 0, 1, 2
///     +3 + (i - 2)            bubble (i, d - 1 - i), i = 2 .. d-1
namespace hpgpe::basis {

/// Largest degree for which tables may be requested.
inline constexpr int kMaxTabulatedDegree = 20;

enum class ShapeKind : std::uint8_t { vertex, edge, bubble };

struct ShapeId {
  ShapeKind kind;
  int entity;  // local vertex, local edge, or bubble index i
  int mode;    // edge degree k, bubble index j; 1 for vertices
  int degree;  // total polynomial degree
};

/// Local edge e joins local vertices kEdgeVertices[e][0] < kEdgeVertices[e][1].
inline constexpr std::array<std::array<int, 2>, 3> kEdgeVertices{{{0, 1}, {1, 2}, {0, 2}}};

constexpr int num_shapes(int p) { return (p + 1) * (p + 2) / 2; }
constexpr int num_edge_modes(int p) { return p - 1; }
constexpr int num_bubbles(int p) { return (p - 1) * (p - 2) / 2; }

constexpr int edge_shape_index(int edge, int k) { return k * (k + 1) / 2 + edge; }
constexpr int bubble_shape_index(int i, int j) {
  const int d = i + j + 1;
  return d * (d + 1) / 2 + 3 + (i - 2);
}

/// Shape identifiers for all functions of degree <= p, in table order.
const std::vector<ShapeId>& layout(int p);

/// Values and reference gradients (d/dxi, d/deta) of all degree-<=p shape
/// functions at barycentric point `lambda`. Output spans need num_shapes(p)
/// entries; gradient outputs may be null.
void evaluate(int p, const std::array<double, 3>& lambda, double* values, double* dxi,
              double* deta);

/// Shape functions tabulated at the points of quadrature_rule(qdeg).
/// Matrices are (number of points) x (number of shapes).
struct Table {
  int p = 0;
  int qdeg = 0;
  const Quadrature* rule = nullptr;
  Eigen::MatrixXd values;
  Eigen::MatrixXd dxi;
  Eigen::MatrixXd deta;
};

/// Cached table for degree p at quadrature degree qdeg.
const Table& table(int p, int qdeg);

/// Exact reference integrals used to form affine element matrices without
/// per-element quadrature:
///   stiff[a][b](i, j) = int d_a phi_i d_b phi_j
///   rot[m][b](i, j)   = int x_m phi_i d_b phi_j,  x_0 = 1, x_1 = xi, x_2 = eta
///   mass(i, j)        = int phi_i phi_j
struct ReferenceMatrices {
  std::array<std::array<Eigen::MatrixXd, 2>, 2> stiff;
  std::array<std::array<Eigen::MatrixXd, 2>, 3> rot;
  Eigen::MatrixXd mass;
};

const ReferenceMatrices& reference_matrices(int p);

}  // namespace hpgpe::basis
