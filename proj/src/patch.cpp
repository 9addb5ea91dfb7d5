#include "hpgpe/patch.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace hpgpe {

namespace {

void check_seed(const Mesh& mesh, int kappa) {
  if (kappa < 0 || static_cast<std::size_t>(kappa) >= mesh.num_elements_total() ||
      !mesh.element(kappa).active)
    throw std::invalid_argument("patch: element " + std::to_string(kappa) + " is not active");
}

PatchCell make_cell(std::array<int, 3> vid, const std::array<Point, 3>& xy, int degree, int source) {
  return PatchCell{vid, xy, degree, source};
}

void collect_vertices(PatchMesh& patch, int nverts) {
  std::vector<int> ids;
  for (const auto& c : patch.cells) ids.insert(ids.end(), c.vid.begin(), c.vid.end());
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  patch.local_to_global.clear();
  for (int id : ids) patch.local_to_global.push_back(id < nverts ? id : -1);
}

}  // namespace

PatchMesh neighbor_patch(const Mesh& mesh, int kappa) {
  check_seed(mesh, kappa);
  PatchMesh patch;
  patch.kind = PatchMesh::Kind::neighbor;
  patch.seed = kappa;
  patch.elements.push_back(kappa);
  for (int n : mesh.face_neighbors(kappa)) patch.elements.push_back(n);
  for (int id : patch.elements) {
    const auto& el = mesh.element(id);
    patch.cells.push_back(make_cell(
        el.v, {mesh.vertex(el.v[0]), mesh.vertex(el.v[1]), mesh.vertex(el.v[2])}, el.degree, id));
  }
  collect_vertices(patch, static_cast<int>(mesh.num_vertices()));
  return patch;
}

PatchMesh refined_patch(const Mesh& mesh, int kappa) {
  check_seed(mesh, kappa);
  const auto& el = mesh.element(kappa);
  const int p = el.degree;
  const int nverts = static_cast<int>(mesh.num_vertices());
  PatchMesh patch;
  patch.kind = PatchMesh::Kind::refined;
  patch.seed = kappa;
  patch.n_kappa = 4;
  patch.elements.push_back(kappa);

  const auto& v = el.v;
  std::array<Point, 3> x{mesh.vertex(v[0]), mesh.vertex(v[1]), mesh.vertex(v[2])};
  std::array<int, 3> m{};
  std::array<Point, 3> mx{};
  for (int e = 0; e < 3; ++e) {
    m[e] = nverts + e;
    const Point& a = x[e];
    const Point& b = x[(e + 1) % 3];
    mx[e] = {0.5 * (a.x + b.x), 0.5 * (a.y + b.y)};
  }
  // m[0] on (v0, v1), m[1] on (v1, v2), m[2] on (v2, v0)
  patch.cells.push_back(make_cell({v[0], m[0], m[2]}, {x[0], mx[0], mx[2]}, p, kappa));
  patch.cells.push_back(make_cell({m[0], v[1], m[1]}, {mx[0], x[1], mx[1]}, p, kappa));
  patch.cells.push_back(make_cell({m[2], m[1], v[2]}, {mx[2], mx[1], x[2]}, p, kappa));
  patch.cells.push_back(make_cell({m[0], m[1], m[2]}, {mx[0], mx[1], mx[2]}, p, kappa));

  for (int e = 0; e < 3; ++e) {
    const int nb = mesh.neighbor_across(kappa, e);
    if (nb < 0) continue;
    patch.elements.push_back(nb);
    const auto& w = mesh.element(nb).v;
    int f = 0;
    while (f < 3 && !(w[f] == v[(e + 1) % 3] && w[(f + 1) % 3] == v[e])) ++f;
    if (f == 3) throw std::logic_error("refined_patch: neighbour does not share an edge");
    const int a = w[f], b = w[(f + 1) % 3], c = w[(f + 2) % 3];
    const Point xa = mesh.vertex(a), xb = mesh.vertex(b), xc = mesh.vertex(c);
    patch.cells.push_back(make_cell({a, m[e], c}, {xa, mx[e], xc}, p, nb));
    patch.cells.push_back(make_cell({m[e], b, c}, {mx[e], xb, xc}, p, nb));
  }
  collect_vertices(patch, nverts);
  return patch;
}

}  // namespace hpgpe
