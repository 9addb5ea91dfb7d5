#include <cmath>
#include <memory>

#include "doctest.h"
#include "hpgpe/basis.hpp"
#include "hpgpe/gflow.hpp"
#include "hpgpe/local_gfi.hpp"
#include "hpgpe/patch.hpp"

using namespace hpgpe;

namespace {

ProblemConfig harmonic(double beta, double omega) {
  ProblemConfig cfg;
  cfg.potential.kind = Potential::Kind::harmonic;
  cfg.beta = beta;
  cfg.omega = omega;
  cfg.half_width = 6.0;
  return cfg;
}

int interior_cell(const HpSpace& s) {
  int best = 0;
  double dmin = 1e300;
  for (int c = 0; c < s.num_cells(); ++c) {
    const auto& xy = s.cell(c).xy;
    const double cx = (xy[0].x + xy[1].x + xy[2].x) / 3.0 - 0.4, cy = (xy[0].y + xy[1].y + xy[2].y) / 3.0 - 0.2;
    if (cx * cx + cy * cy < dmin) {
      dmin = cx * cx + cy * cy;
      best = c;
    }
  }
  return best;
}

StateVector vortexish(const Forms& f) {
  auto u = interpolate(
      [](double x, double y) {
        const double g = std::exp(-0.25 * (x * x + y * y));
        return cplx(g * (1.0 + 0.3 * x), 0.4 * g * y);
      },
      f.space());
  f.normalize(u);
  return u;
}

// u~ = c_u u + sum c_i xi_i as a plain function of the plane
PointFunction local_state(const HpSpace& space, const StateVector& u, const LocalSpace& W,
                          const Eigen::VectorXcd& c) {
  return [&space, &u, &W, c](double x, double y) {
    const Point p{x, y};
    cplx val = c(W.m) * evaluate(space, u, std::span<const Point>(&p, 1))[0].value;
    for (const auto& cell : W.cells) {
      const auto lam = cell.geo.barycentric(p);
      if (std::min({lam[0], lam[1], lam[2]}) < -1e-12) continue;
      std::vector<double> v(basis::num_shapes(cell.degree)), dx(v.size()), dy(v.size());
      basis::evaluate(cell.degree, lam, v.data(), dx.data(), dy.data());
      for (std::size_t i = 0; i < v.size(); ++i)
        if (cell.map[i] >= 0) val += c(cell.map[i]) * v[i];
      break;
    }
    return val;
  };
}

}  // namespace

TEST_CASE("enrichment dimensions on a uniform interior patch") {
  const HpSpace s(Mesh::build_square(6.0, 8, 2));
  const int c = interior_cell(s);
  const auto Wp = local_enrichment_basis(s, c, RefineKind::p);
  CHECK(Wp.cells.size() == 4);
  CHECK(Wp.m == 3 + 4);  // one new mode per interior edge, one cubic bubble per cell
  CHECK(Wp.dofs == 3 + 1);

  const HpSpace s1(Mesh::build_square(6.0, 8, 1));
  const auto Wh = local_enrichment_basis(s1, interior_cell(s1), RefineKind::h);
  CHECK(Wh.cells.size() == 10);
  CHECK(Wh.m == 3);  // the three edge midpoints
  CHECK(Wh.dofs == 3);

  const auto Wh2 = local_enrichment_basis(s, c, RefineKind::h);
  // p = 2: 3 midpoints + 12 interior edges (9 in kappa, 3 green splits)
  CHECK(Wh2.m == 3 + 12);
  CHECK(Wh2.dofs >= 1);
}

TEST_CASE("empty enrichment leaves the state unchanged") {
  const auto sp = std::make_shared<const HpSpace>(Mesh::build_square(6.0, 4, 2));
  const Forms f(sp, harmonic(10.0, 0.0));
  const auto u = vortexish(f);
  const auto ctx = LocalContext::make(f, u);
  LocalSpace W;
  const auto st = local_gfi_step(ctx, W);
  CHECK(st.coeffs.size() == 1);
  CHECK(st.decay == 0.0);
  CHECK(st.energy == doctest::Approx(f.energy(u)));
}

TEST_CASE("local step energy matches a global evaluation: h") {
  Mesh mesh = Mesh::build_square(6.0, 8, 2);
  const auto sp = std::make_shared<const HpSpace>(mesh);
  const ProblemConfig cfg = harmonic(50.0, 0.5);
  const Forms f(sp, cfg);
  const auto u = vortexish(f);
  const int c = interior_cell(*sp);
  const auto W = local_enrichment_basis(*sp, c, RefineKind::h);
  const auto ctx = LocalContext::make(f, u);
  const auto st = local_gfi_step(ctx, W);
  CHECK(st.decay > 0.0);

  const int el = sp->cell(c).element;
  mesh.conformity_closure(std::span<const int>(&el, 1));
  const auto fine = std::make_shared<const HpSpace>(mesh);
  const Forms ff(fine, cfg);
  const auto ut = interpolate(local_state(*sp, u, W, st.coeffs), *fine);
  CHECK(ff.norm(ut) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(ff.energy(ut) == doctest::Approx(st.energy).epsilon(1e-10));
}

TEST_CASE("local step energy matches a global evaluation: p") {
  Mesh mesh = Mesh::build_square(6.0, 8, 2);
  const auto sp = std::make_shared<const HpSpace>(mesh);
  const ProblemConfig cfg = harmonic(50.0, 0.5);
  const Forms f(sp, cfg);
  const auto u = vortexish(f);
  const int c = interior_cell(*sp);
  const auto W = local_enrichment_basis(*sp, c, RefineKind::p);
  const auto ctx = LocalContext::make(f, u);
  const auto st = local_gfi_step(ctx, W);
  CHECK(st.decay > 0.0);

  for (int id : neighbor_patch(mesh, sp->cell(c).element).elements) mesh.set_degree(id, 3);
  const auto fine = std::make_shared<const HpSpace>(mesh);
  const Forms ff(fine, cfg);
  const auto ut = interpolate(local_state(*sp, u, W, st.coeffs), *fine);
  CHECK(ff.norm(ut) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(ff.energy(ut) == doctest::Approx(st.energy).epsilon(1e-10));
}

TEST_CASE("linear problem: local steps never increase the energy") {
  const auto sp = std::make_shared<const HpSpace>(Mesh::build_square(6.0, 6, 2));
  const Forms f(sp, harmonic(0.0, 0.0));
  FlowParams params;
  params.gamma = 0.0;
  params.max_iterations = 300;
  HpdSolver solver;
  const auto res = run_flow(f, vortexish(f), params, solver);
  const auto ctx = LocalContext::make(f, res.u);
  for (int c = 0; c < sp->num_cells(); ++c)
    for (auto kind : {RefineKind::h, RefineKind::p}) {
      const auto st = local_gfi_step(ctx, local_enrichment_basis(*sp, c, kind));
      CHECK(st.decay >= -1e-12);
    }
}
