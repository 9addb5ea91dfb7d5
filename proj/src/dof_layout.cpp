#include "hpgpe/dof_layout.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <unordered_map>

#include "hpgpe/basis.hpp"

namespace hpgpe {

CellGeometry CellGeometry::from_vertices(const std::array<Point, 3>& xy) {
  CellGeometry g;
  g.x0 = xy[0];
  g.J << xy[1].x - xy[0].x, xy[2].x - xy[0].x, xy[1].y - xy[0].y, xy[2].y - xy[0].y;
  const double d = g.J.determinant();
  if (d == 0.0) throw std::invalid_argument("degenerate cell");
  g.G = g.J.inverse();
  g.det = std::abs(d);
  return g;
}

namespace {

std::uint64_t key(int a, int b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) | static_cast<std::uint32_t>(b);
}

struct EdgeInfo {
  int users = 0;
  int degree = 1 << 30;
  int first_dof = -1;
};

}  // namespace

DofLayout build_dof_layout(std::span<const CellSpec> cells) {
  DofLayout out;
  out.cells.resize(cells.size());
  std::unordered_map<std::uint64_t, EdgeInfo> edges;
  edges.reserve(cells.size() * 2);

  for (std::size_t c = 0; c < cells.size(); ++c) {
    auto& cd = out.cells[c];
    std::array<int, 3> order{0, 1, 2};
    std::sort(order.begin(), order.end(), [&](int a, int b) { return cells[c].vid[a] < cells[c].vid[b]; });
    for (int i = 0; i < 3; ++i) {
      cd.vid[i] = cells[c].vid[order[i]];
      cd.xy[i] = cells[c].xy[order[i]];
    }
    cd.degree = cells[c].degree;
    if (cd.degree < 1) throw std::invalid_argument("dof layout: degree must be >= 1");
    cd.geo = CellGeometry::from_vertices(cd.xy);
    for (const auto& ev : basis::kEdgeVertices) {
      auto& info = edges[key(cd.vid[ev[0]], cd.vid[ev[1]])];
      if (++info.users > 2) throw std::invalid_argument("dof layout: edge shared by more than two cells");
      info.degree = std::min(info.degree, cd.degree);
    }
  }

  std::unordered_map<int, int> vertex_dof;  // -1 for Dirichlet vertices
  for (const auto& cd : out.cells)
    for (const auto& ev : basis::kEdgeVertices)
      if (edges[key(cd.vid[ev[0]], cd.vid[ev[1]])].users == 1) {
        vertex_dof[cd.vid[ev[0]]] = -1;
        vertex_dof[cd.vid[ev[1]]] = -1;
      }

  int next = 0;
  for (auto& cd : out.cells) {
    const int p = cd.degree;
    cd.dofs.assign(basis::num_shapes(p), -1);
    for (int i = 0; i < 3; ++i) {
      auto [it, fresh] = vertex_dof.try_emplace(cd.vid[i], 0);
      if (fresh) it->second = next++;
      cd.dofs[i] = it->second;
    }
    for (int e = 0; e < 3; ++e) {
      auto& info = edges[key(cd.vid[basis::kEdgeVertices[e][0]], cd.vid[basis::kEdgeVertices[e][1]])];
      cd.edge_degree[e] = info.degree;
      if (info.users == 1) continue;
      if (info.first_dof < 0 && info.degree >= 2) {
        info.first_dof = next;
        next += info.degree - 1;
      }
      for (int k = 2; k <= info.degree; ++k) cd.dofs[basis::edge_shape_index(e, k)] = info.first_dof + k - 2;
    }
    for (int d = 3; d <= p; ++d)
      for (int i = 2; i <= d - 1; ++i) cd.dofs[basis::bubble_shape_index(i, d - 1 - i)] = next++;
  }
  out.ndofs = next;
  return out;
}

}  // namespace hpgpe
