#include "hpgpe/hp_space.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>

#include "hpgpe/basis.hpp"
#include "hpgpe/quadrature.hpp"

namespace hpgpe {

namespace {

std::uint64_t next_space_id() {
  static std::atomic<std::uint64_t> counter{1};
  return counter++;
}

double min3(const std::array<double, 3>& l) { return std::min({l[0], l[1], l[2]}); }

}  // namespace

HpSpace::HpSpace(Mesh mesh) : mesh_(std::move(mesh)), id_(next_space_id()) {
  const auto active = mesh_.active_elements();
  std::vector<CellSpec> specs;
  specs.reserve(active.size());
  for (int id : active) {
    const auto& el = mesh_.element(id);
    specs.push_back({el.v, {mesh_.vertex(el.v[0]), mesh_.vertex(el.v[1]), mesh_.vertex(el.v[2])}, el.degree});
    max_degree_ = std::max(max_degree_, el.degree);
  }
  DofLayout layout = build_dof_layout(specs);
  ndofs_ = layout.ndofs;
  cells_.resize(active.size());
  element_to_cell_.assign(mesh_.num_elements_total(), -1);
  for (std::size_t c = 0; c < active.size(); ++c) {
    static_cast<CellDofs&>(cells_[c]) = std::move(layout.cells[c]);
    cells_[c].element = active[c];
    element_to_cell_[active[c]] = static_cast<int>(c);
  }
  build_locator();
}

int HpSpace::cell_of_element(int element) const {
  if (element < 0 || static_cast<std::size_t>(element) >= element_to_cell_.size()) return -1;
  return element_to_cell_[element];
}

void HpSpace::build_locator() {
  const double L = mesh_.half_width();
  grid_n_ = std::max(1, static_cast<int>(std::ceil(std::sqrt(cells_.size() / 2.0))));
  buckets_.assign(static_cast<std::size_t>(grid_n_) * grid_n_, {});
  auto index = [&](double s) {
    const int i = static_cast<int>(std::floor((s + L) / (2.0 * L) * grid_n_));
    return std::clamp(i, 0, grid_n_ - 1);
  };
  for (std::size_t c = 0; c < cells_.size(); ++c) {
    const auto& xy = cells_[c].xy;
    const double eps = 1e-12 * L;
    const int i0 = index(std::min({xy[0].x, xy[1].x, xy[2].x}) - eps);
    const int i1 = index(std::max({xy[0].x, xy[1].x, xy[2].x}) + eps);
    const int j0 = index(std::min({xy[0].y, xy[1].y, xy[2].y}) - eps);
    const int j1 = index(std::max({xy[0].y, xy[1].y, xy[2].y}) + eps);
    for (int j = j0; j <= j1; ++j)
      for (int i = i0; i <= i1; ++i) buckets_[static_cast<std::size_t>(j) * grid_n_ + i].push_back(static_cast<int>(c));
  }
}

HpSpace::Location HpSpace::locate(Point p) const {
  const double L = mesh_.half_width();
  const double slack = 1e-12 * L;
  if (!(std::abs(p.x) <= L + slack && std::abs(p.y) <= L + slack))
    throw std::out_of_range("point (" + std::to_string(p.x) + ", " + std::to_string(p.y) + ") outside the domain");
  auto index = [&](double s) {
    return std::clamp(static_cast<int>(std::floor((s + L) / (2.0 * L) * grid_n_)), 0, grid_n_ - 1);
  };
  Location best;
  double best_min = -std::numeric_limits<double>::infinity();
  auto scan = [&](const std::vector<int>& candidates) {
    for (int c : candidates) {
      const auto lambda = cells_[c].geo.barycentric(p);
      const double m = min3(lambda);
      if (m > best_min) {
        best_min = m;
        best = {c, lambda};
        if (m >= 0.0) return true;
      }
    }
    return false;
  };
  if (scan(buckets_[static_cast<std::size_t>(index(p.y)) * grid_n_ + index(p.x)]) || best_min >= -1e-9)
    return best;
  std::vector<int> all(cells_.size());
  for (std::size_t c = 0; c < all.size(); ++c) all[c] = static_cast<int>(c);
  scan(all);
  if (best_min < -1e-8) throw std::logic_error("locate: no cell contains the point");
  return best;
}

void check_state(const HpSpace& space, const StateVector& u) {
  if (u.space_id != space.id() || u.coeffs.size() != space.ndofs())
    throw std::invalid_argument("state vector does not belong to this space");
}

Eigen::VectorXcd local_coefficients(const HpSpace& space, int c, const Eigen::VectorXcd& u) {
  const auto& dofs = space.cell(c).dofs;
  Eigen::VectorXcd out(static_cast<Eigen::Index>(dofs.size()));
  for (std::size_t i = 0; i < dofs.size(); ++i) out(i) = dofs[i] >= 0 ? u(dofs[i]) : cplx(0.0);
  return out;
}

PointValue evaluate_in_cell(const HpSpace& space, int c, const Eigen::VectorXcd& u,
                            const std::array<double, 3>& lambda) {
  const auto& cell = space.cell(c);
  const int nb = basis::num_shapes(cell.degree);
  double v[basis::num_shapes(basis::kMaxTabulatedDegree)];
  double dxi[basis::num_shapes(basis::kMaxTabulatedDegree)];
  double deta[basis::num_shapes(basis::kMaxTabulatedDegree)];
  basis::evaluate(cell.degree, lambda, v, dxi, deta);
  cplx val = 0.0, gx = 0.0, gy = 0.0;
  const auto& G = cell.geo.G;
  for (int i = 0; i < nb; ++i) {
    const int d = cell.dofs[i];
    if (d < 0) continue;
    const cplx ci = u(d);
    val += ci * v[i];
    gx += ci * (G(0, 0) * dxi[i] + G(1, 0) * deta[i]);
    gy += ci * (G(0, 1) * dxi[i] + G(1, 1) * deta[i]);
  }
  return {val, gx, gy};
}

std::vector<PointValue> evaluate(const HpSpace& space, const StateVector& u, std::span<const Point> pts) {
  check_state(space, u);
  std::vector<PointValue> out;
  out.reserve(pts.size());
  for (const Point& p : pts) {
    const auto loc = space.locate(p);
    out.push_back(evaluate_in_cell(space, loc.cell, u.coeffs, loc.lambda));
  }
  return out;
}

namespace {

Eigen::VectorXcd least_squares(const Eigen::MatrixXd& B, const Eigen::VectorXd& w, const Eigen::VectorXcd& r) {
  const Eigen::MatrixXd gram = B.transpose() * w.asDiagonal() * B;
  const Eigen::VectorXcd rhs = B.transpose().cast<cplx>() * (w.cast<cplx>().asDiagonal() * r);
  const auto ldlt = gram.ldlt();
  Eigen::VectorXcd c(rhs.size());
  c.real() = ldlt.solve(rhs.real());
  c.imag() = ldlt.solve(rhs.imag());
  return c;
}

StateVector project_interpolate(const std::function<cplx(Point)>& f, const HpSpace& space) {
  StateVector u = StateVector::zero(space);
  auto& x = u.coeffs;
  std::vector<char> done(space.ndofs(), 0);
  constexpr int kMax = basis::num_shapes(basis::kMaxTabulatedDegree);
  double vals[kMax];

  for (const auto& cell : space.cells())
    for (int i = 0; i < 3; ++i) {
      const int d = cell.dofs[i];
      if (d < 0 || done[d]) continue;
      x(d) = f(cell.xy[i]);
      done[d] = 1;
    }

  for (const auto& cell : space.cells()) {
    for (int e = 0; e < 3; ++e) {
      const int q = cell.edge_degree[e];
      if (q < 2) continue;
      const int d0 = cell.dofs[basis::edge_shape_index(e, 2)];
      if (d0 < 0 || done[d0]) continue;
      const int a = basis::kEdgeVertices[e][0], b = basis::kEdgeVertices[e][1];
      const cplx va = cell.dofs[a] >= 0 ? x(cell.dofs[a]) : cplx(0.0);
      const cplx vb = cell.dofs[b] >= 0 ? x(cell.dofs[b]) : cplx(0.0);
      const auto& g = gauss_legendre(q + 2);
      const int n = static_cast<int>(g.nodes.size());
      Eigen::MatrixXd B(n, q - 1);
      Eigen::VectorXd w(n);
      Eigen::VectorXcd r(n);
      for (int k = 0; k < n; ++k) {
        const double s = 0.5 * (g.nodes[k] + 1.0);
        std::array<double, 3> lambda{0.0, 0.0, 0.0};
        lambda[a] = 1.0 - s;
        lambda[b] = s;
        basis::evaluate(q, lambda, vals, nullptr, nullptr);
        for (int m = 2; m <= q; ++m) B(k, m - 2) = vals[basis::edge_shape_index(e, m)];
        w(k) = 0.5 * g.weights[k];
        const Point pa = cell.xy[a], pb = cell.xy[b];
        r(k) = f({pa.x + s * (pb.x - pa.x), pa.y + s * (pb.y - pa.y)}) - ((1.0 - s) * va + s * vb);
      }
      const Eigen::VectorXcd c = least_squares(B, w, r);
      for (int m = 2; m <= q; ++m) {
        const int d = cell.dofs[basis::edge_shape_index(e, m)];
        x(d) = c(m - 2);
        done[d] = 1;
      }
    }
  }

  for (const auto& cell : space.cells()) {
    const int p = cell.degree;
    if (p < 3) continue;
    const auto& layout = basis::layout(p);
    const auto& tab = basis::table(p, 2 * p + 2);
    const auto& rule = *tab.rule;
    const auto nq = static_cast<Eigen::Index>(rule.size());
    std::vector<int> bubbles, others;
    for (int i = 0; i < basis::num_shapes(p); ++i) {
      if (layout[i].kind == basis::ShapeKind::bubble)
        bubbles.push_back(i);
      else if (cell.dofs[i] >= 0)
        others.push_back(i);
    }
    Eigen::MatrixXd B(nq, static_cast<Eigen::Index>(bubbles.size()));
    Eigen::VectorXd w(nq);
    Eigen::VectorXcd r(nq);
    for (Eigen::Index q = 0; q < nq; ++q) {
      const Point pt = cell.geo.map(rule.points[q][0], rule.points[q][1]);
      cplx known = 0.0;
      for (int i : others) known += x(cell.dofs[i]) * tab.values(q, i);
      r(q) = f(pt) - known;
      w(q) = rule.weights[q];
      for (std::size_t k = 0; k < bubbles.size(); ++k) B(q, static_cast<Eigen::Index>(k)) = tab.values(q, bubbles[k]);
    }
    const Eigen::VectorXcd c = least_squares(B, w, r);
    for (std::size_t k = 0; k < bubbles.size(); ++k) x(cell.dofs[bubbles[k]]) = c(static_cast<Eigen::Index>(k));
  }
  return u;
}

}  // namespace

StateVector interpolate(const PointFunction& f, const HpSpace& space) {
  return project_interpolate([&](Point p) { return f(p.x, p.y); }, space);
}

StateVector transfer(const StateVector& u, const HpSpace& from, const HpSpace& to) {
  check_state(from, u);
  if (std::abs(from.mesh().half_width() - to.mesh().half_width()) > 1e-14 * from.mesh().half_width())
    throw std::invalid_argument("transfer: spaces live on different domains");
  return project_interpolate(
      [&](Point p) {
        const auto loc = from.locate(p);
        return evaluate_in_cell(from, loc.cell, u.coeffs, loc.lambda).value;
      },
      to);
}

void write_sample_csv(std::ostream& out, const HpSpace& space, const StateVector& u, int m) {
  check_state(space, u);
  if (m < 2) throw std::invalid_argument("sample grid needs at least 2 points per side");
  const double L = space.mesh().half_width();
  out << "x,y,re_u,im_u,abs_u2\n";
  out.precision(12);
  for (int j = 0; j < m; ++j) {
    for (int i = 0; i < m; ++i) {
      const Point p{-L + 2.0 * L * i / (m - 1), -L + 2.0 * L * j / (m - 1)};
      const auto loc = space.locate(p);
      const cplx v = evaluate_in_cell(space, loc.cell, u.coeffs, loc.lambda).value;
      out << p.x << ',' << p.y << ',' << v.real() << ',' << v.imag() << ',' << std::norm(v) << '\n';
    }
  }
}

}  // namespace hpgpe
