#include "hpgpe/local_gfi.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "hpgpe/basis.hpp"
#include "hpgpe/patch.hpp"

namespace hpgpe {

namespace {

int find_local_edge(const CellDofs& cell, int a, int b) {
  for (int e = 0; e < 3; ++e) {
    const int x = cell.vid[basis::kEdgeVertices[e][0]], y = cell.vid[basis::kEdgeVertices[e][1]];
    if ((x == a && y == b) || (x == b && y == a)) return e;
  }
  return -1;
}

LocalSpace p_space(const HpSpace& space, int seed) {
  const auto& kappa = space.cell(seed);
  const int P = kappa.degree + 1;
  if (P > basis::kMaxTabulatedDegree) throw std::out_of_range("p-enrichment beyond the tabulated degree");
  const PatchMesh patch = neighbor_patch(space.mesh(), kappa.element);
  LocalSpace W;
  W.kind = RefineKind::p;
  W.seed = seed;
  for (int id : patch.elements) {
    const int c = space.cell_of_element(id);
    LocalSpace::Cell cell;
    cell.source = c;
    cell.source_frame = true;
    cell.geo = space.cell(c).geo;
    cell.degree = std::max(space.cell(c).degree, P);
    cell.map.assign(basis::num_shapes(cell.degree), -1);
    W.cells.push_back(std::move(cell));
    W.sources.push_back(c);
  }
  int dofs = 0;
  for (int e = 0; e < 3; ++e) {
    const int a = kappa.vid[basis::kEdgeVertices[e][0]], b = kappa.vid[basis::kEdgeVertices[e][1]];
    for (std::size_t t = 1; t < W.cells.size(); ++t) {
      const int f = find_local_edge(space.cell(W.cells[t].source), a, b);
      if (f < 0) continue;
      for (int k = kappa.edge_degree[e] + 1; k <= P; ++k) {
        W.cells[0].map[basis::edge_shape_index(e, k)] = W.m;
        W.cells[t].map[basis::edge_shape_index(f, k)] = W.m;
        ++W.m;
        ++dofs;
      }
    }
  }
  for (std::size_t t = 0; t < W.cells.size(); ++t) {
    const int pt = space.cell(W.cells[t].source).degree;
    for (int d = pt + 1; d <= P; ++d)
      for (int i = 2; i <= d - 1; ++i) {
        W.cells[t].map[basis::bubble_shape_index(i, d - 1 - i)] = W.m++;
        if (t == 0) ++dofs;
      }
  }
  W.dofs = std::max(dofs, 1);
  return W;
}

LocalSpace h_space(const HpSpace& space, int seed) {
  const auto& kappa = space.cell(seed);
  const int p = kappa.degree;
  const PatchMesh patch = refined_patch(space.mesh(), kappa.element);
  std::vector<CellSpec> specs;
  for (const auto& pc : patch.cells) specs.push_back({pc.vid, pc.xy, p});
  DofLayout layout = build_dof_layout(specs);
  LocalSpace W;
  W.kind = RefineKind::h;
  W.seed = seed;
  W.m = layout.ndofs;
  std::set<int> on_children;
  for (std::size_t t = 0; t < layout.cells.size(); ++t) {
    LocalSpace::Cell cell;
    cell.source = space.cell_of_element(patch.cells[t].source);
    cell.geo = layout.cells[t].geo;
    cell.degree = p;
    cell.map = std::move(layout.cells[t].dofs);
    if (static_cast<int>(t) < patch.n_kappa)
      for (int d : cell.map)
        if (d >= 0) on_children.insert(d);
    W.cells.push_back(std::move(cell));
  }
  for (int id : patch.elements) W.sources.push_back(space.cell_of_element(id));
  // functions touching the children, minus those the seed already carries
  int existing = basis::num_bubbles(p);
  for (int e = 0; e < 3; ++e)
    if (kappa.dofs[basis::edge_shape_index(e, 2 <= p ? 2 : 1)] >= 0 || p == 1) {
      const int a = kappa.vid[basis::kEdgeVertices[e][0]], b = kappa.vid[basis::kEdgeVertices[e][1]];
      if (!space.mesh().is_boundary_segment(a, b)) existing += kappa.edge_degree[e] - 1;
    }
  W.dofs = std::max(1, static_cast<int>(on_children.size()) - existing);
  return W;
}

Eigen::VectorXcd mul_t(const Eigen::MatrixXd& B, const Eigen::VectorXcd& v) {
  Eigen::VectorXcd out(B.cols());
  out.real() = B.transpose() * v.real();
  out.imag() = B.transpose() * v.imag();
  return out;
}

Eigen::VectorXcd mul(const Eigen::MatrixXd& B, const Eigen::VectorXcd& v) {
  Eigen::VectorXcd out(B.rows());
  out.real() = B * v.real();
  out.imag() = B * v.imag();
  return out;
}

struct CellWork {
  std::vector<int> xi;  // xi index per selected column
  Eigen::MatrixXd phi, gx, gy;
  Eigen::VectorXd w, v, x, y;
  Eigen::VectorXcd u, ux, uy;
};

double patch_energy(const CellWork& cw, const Eigen::VectorXcd& val, const Eigen::VectorXcd& gx,
                    const Eigen::VectorXcd& gy, double beta, double omega) {
  double e = 0.0;
  for (Eigen::Index q = 0; q < cw.w.size(); ++q) {
    const double m2 = std::norm(val(q));
    const cplx z = std::conj(val(q)) * (cw.y(q) * gx(q) - cw.x(q) * gy(q));
    e += cw.w(q) * (0.5 * (std::norm(gx(q)) + std::norm(gy(q))) + cw.v(q) * m2 + 0.5 * beta * m2 * m2 +
                    omega * z.imag());
  }
  return e;
}

}  // namespace

LocalSpace local_enrichment_basis(const HpSpace& space, int seed_cell, RefineKind kind) {
  if (seed_cell < 0 || seed_cell >= space.num_cells()) throw std::out_of_range("local_enrichment_basis: bad cell");
  return kind == RefineKind::p ? p_space(space, seed_cell) : h_space(space, seed_cell);
}

LocalContext LocalContext::make(const Forms& forms, const StateVector& u) {
  LocalContext ctx;
  ctx.forms = &forms;
  ctx.u = &u;
  ctx.parts = forms.energy_parts(u);
  ctx.a_uu = 2.0 * ctx.parts.quadratic + 2.0 * forms.config().beta * ctx.parts.quartic;
  ctx.uu = forms.inner(u, u).real();
  return ctx;
}

LocalStep local_gfi_step(const LocalContext& ctx, const LocalSpace& W) {
  const Forms& forms = *ctx.forms;
  const HpSpace& space = forms.space();
  const StateVector& u = *ctx.u;
  const double beta = forms.config().beta;
  const double omega = forms.config().omega;
  const auto& V = forms.config().potential;
  const int m = W.m;
  const int n = m + 1;

  LocalStep out;
  if (m == 0) {
    out.coeffs = Eigen::VectorXcd::Ones(1);
    out.energy = ctx.parts.energy;
    return out;
  }

  Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(n, n);
  Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(n, n);
  std::vector<CellWork> work(W.cells.size());
  double e_patch_u = 0.0;

  for (std::size_t t = 0; t < W.cells.size(); ++t) {
    const auto& cell = W.cells[t];
    const auto& src = space.cell(cell.source);
    const int qdeg = 4 * std::max(cell.degree, src.degree) + ctx.quadrature_extra;
    const auto& tab = basis::table(cell.degree, qdeg);
    const auto& rule = *tab.rule;
    const auto nq = static_cast<Eigen::Index>(rule.size());
    auto& cw = work[t];
    std::vector<int> cols;
    for (std::size_t i = 0; i < cell.map.size(); ++i)
      if (cell.map[i] >= 0) {
        cols.push_back(static_cast<int>(i));
        cw.xi.push_back(cell.map[i]);
      }
    const auto ns = static_cast<Eigen::Index>(cols.size());
    const auto& G = cell.geo.G;
    cw.phi.resize(nq, ns);
    cw.gx.resize(nq, ns);
    cw.gy.resize(nq, ns);
    for (Eigen::Index s = 0; s < ns; ++s) {
      cw.phi.col(s) = tab.values.col(cols[s]);
      cw.gx.col(s) = G(0, 0) * tab.dxi.col(cols[s]) + G(1, 0) * tab.deta.col(cols[s]);
      cw.gy.col(s) = G(0, 1) * tab.dxi.col(cols[s]) + G(1, 1) * tab.deta.col(cols[s]);
    }
    cw.w.resize(nq);
    cw.v.resize(nq);
    cw.x.resize(nq);
    cw.y.resize(nq);
    for (Eigen::Index q = 0; q < nq; ++q) {
      const Point p = cell.geo.map(rule.points[q][0], rule.points[q][1]);
      cw.w(q) = rule.weights[q] * cell.geo.det;
      cw.v(q) = V(p.x, p.y);
      cw.x(q) = p.x;
      cw.y(q) = p.y;
    }
    if (cell.source_frame) {
      const auto& tu = basis::table(src.degree, qdeg);
      const Eigen::VectorXcd lc = local_coefficients(space, cell.source, u.coeffs);
      cw.u = mul(tu.values, lc);
      const Eigen::VectorXcd uxi = mul(tu.dxi, lc), ueta = mul(tu.deta, lc);
      cw.ux = G(0, 0) * uxi + G(1, 0) * ueta;
      cw.uy = G(0, 1) * uxi + G(1, 1) * ueta;
    } else {
      cw.u.resize(nq);
      cw.ux.resize(nq);
      cw.uy.resize(nq);
      for (Eigen::Index q = 0; q < nq; ++q) {
        const auto pv = evaluate_in_cell(space, cell.source, u.coeffs, src.geo.barycentric({cw.x(q), cw.y(q)}));
        cw.u(q) = pv.value;
        cw.ux(q) = pv.dx;
        cw.uy(q) = pv.dy;
      }
    }

    const Eigen::VectorXd w2 = cw.w.cwiseProduct(2.0 * cw.v + 2.0 * beta * cw.u.cwiseAbs2());
    const Eigen::MatrixXd agx = cw.y.asDiagonal() * cw.gx - cw.x.asDiagonal() * cw.gy;
    const Eigen::MatrixXd K =
        cw.gx.transpose() * cw.w.asDiagonal() * cw.gx + cw.gy.transpose() * cw.w.asDiagonal() * cw.gy;
    const Eigen::MatrixXd Mc = cw.phi.transpose() * cw.w.asDiagonal() * cw.phi;
    const Eigen::MatrixXd Mw = cw.phi.transpose() * w2.asDiagonal() * cw.phi;
    const Eigen::MatrixXd T = cw.phi.transpose() * cw.w.asDiagonal() * agx;
    const Eigen::MatrixXd R = T - T.transpose();

    const Eigen::VectorXcd wu = cw.w.cast<cplx>().cwiseProduct(cw.u);
    const Eigen::VectorXcd a_cross =
        mul_t(cw.gx, cw.w.cast<cplx>().cwiseProduct(cw.ux)) +
        mul_t(cw.gy, cw.w.cast<cplx>().cwiseProduct(cw.uy)) +
        mul_t(cw.phi, w2.cast<cplx>().cwiseProduct(cw.u)) -
        cplx(0.0, omega) * (mul_t(cw.phi, cw.w.cast<cplx>().cwiseProduct(
                                                         cw.y.cast<cplx>().cwiseProduct(cw.ux) -
                                                         cw.x.cast<cplx>().cwiseProduct(cw.uy))) -
                            mul_t(agx, wu));
    const Eigen::VectorXcd m_cross = mul_t(cw.phi, wu);

    for (Eigen::Index a = 0; a < ns; ++a) {
      const int ia = cw.xi[a];
      for (Eigen::Index b = 0; b < ns; ++b) {
        const int ib = cw.xi[b];
        A(ia, ib) += cplx(K(a, b) + Mw(a, b), -omega * R(a, b));
        M(ia, ib) += Mc(a, b);
      }
      A(ia, m) += a_cross(a);
      M(ia, m) += m_cross(a);
    }
    e_patch_u += patch_energy(cw, cw.u, cw.ux, cw.uy, beta, omega);
  }
  for (int i = 0; i < m; ++i) {
    A(m, i) = std::conj(A(i, m));
    M(m, i) = std::conj(M(i, m));
  }
  A(m, m) = ctx.a_uu;
  M(m, m) = ctx.uu;

  const Eigen::VectorXcd rhs = M.col(m);
  Eigen::VectorXcd g;
  Eigen::LLT<Eigen::MatrixXcd> llt(A);
  if (llt.info() == Eigen::Success) g = llt.solve(rhs);
  if (llt.info() != Eigen::Success || !g.allFinite()) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(A);
    const auto& ev = es.eigenvalues();
    const double cut = 1e-12 * ev.cwiseAbs().maxCoeff();
    g = Eigen::VectorXcd::Zero(n);
    for (int k = 0; k < n; ++k) {
      if (ev(k) <= cut) {
        ++out.dropped;
        continue;
      }
      const auto vk = es.eigenvectors().col(k);
      g += vk * (vk.dot(rhs) / ev(k));
    }
  }
  const cplx gu = (M.row(m) * g)(0);
  Eigen::VectorXcd c = g / gu;
  const double nrm = std::sqrt(std::max(0.0, c.dot(M * c).real()));
  if (!(nrm > 0.0)) throw std::logic_error("local gfi step produced a vanishing state");
  c /= nrm;

  double e_patch_new = 0.0;
  const cplx cu = c(m);
  for (auto& cw : work) {
    Eigen::VectorXcd cs(static_cast<Eigen::Index>(cw.xi.size()));
    for (std::size_t s = 0; s < cw.xi.size(); ++s) cs(static_cast<Eigen::Index>(s)) = c(cw.xi[s]);
    const Eigen::VectorXcd val = cu * cw.u + mul(cw.phi, cs);
    const Eigen::VectorXcd gx = cu * cw.ux + mul(cw.gx, cs);
    const Eigen::VectorXcd gy = cu * cw.uy + mul(cw.gy, cs);
    e_patch_new += patch_energy(cw, val, gx, gy, beta, omega);
  }

  double q_in = 0.0, f_in = 0.0;
  for (int s : W.sources) {
    q_in += ctx.parts.q_elem[s];
    f_in += ctx.parts.f_elem[s];
  }
  const double cu2 = std::norm(cu);
  out.decay = (ctx.parts.quadratic - q_in) * (1.0 - cu2) +
              0.5 * beta * (ctx.parts.quartic - f_in) * (1.0 - cu2 * cu2) + (e_patch_u - e_patch_new);
  out.energy = ctx.parts.energy - out.decay;
  out.coeffs = std::move(c);
  return out;
}

}  // namespace hpgpe
