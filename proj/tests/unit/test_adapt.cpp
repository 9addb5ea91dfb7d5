#include <algorithm>
#include <cmath>
#include <memory>

#include "doctest.h"
#include "hpgpe/adapt.hpp"
#include "hpgpe/presets.hpp"
#include "mesh_audit.hpp"

using namespace hpgpe;

namespace {

RefineIndicators from_decays(std::initializer_list<double> d) {
  RefineIndicators ind;
  int k = 0;
  for (double x : d) {
    ElementIndicator it;
    it.element = k++;
    it.dE_h = x;
    it.dE_p = x;
    it.dE_max = x;
    ind.items.push_back(it);
  }
  return ind;
}

ProblemConfig small(double beta, double omega) {
  ProblemConfig cfg;
  cfg.beta = beta;
  cfg.omega = omega;
  cfg.half_width = 6.0;
  return cfg;
}

}  // namespace

TEST_CASE("marking examples") {
  CHECK(mark(from_decays({9.0, 4.0, 1.0}), 1.0 / 3.0) == std::vector<int>{0, 1});
  CHECK(mark(from_decays({2.0, 2.0, 2.0}), 1.0 / 3.0) == std::vector<int>{0, 1, 2});
  CHECK(mark(from_decays({0.0, -1.0, -3.0}), 1.0 / 3.0).empty());
  CHECK(mark(from_decays({-1.0, -2.0}), 0.5).empty());
  // negative values are kept but never reach a positive threshold
  CHECK(mark(from_decays({-5.0, 1.0}), 0.1) == std::vector<int>{1});
}

TEST_CASE("marking is monotone in theta") {
  const auto ind = from_decays({0.3, 1.2, 0.05, 0.9, 0.6, -0.1, 1.0});
  std::size_t prev = ind.items.size() + 1;
  for (double theta : {0.01, 0.1, 0.3, 0.5, 0.7, 0.9, 0.99}) {
    const auto K = mark(ind, theta);
    CHECK(K.size() <= prev);
    prev = K.size();
    for (int k : mark(ind, std::min(0.999, theta + 0.05)))
      CHECK(std::find(K.begin(), K.end(), k) != K.end());
  }
}

TEST_CASE("indicator invariants and tie rule") {
  const auto sp = std::make_shared<const HpSpace>(Mesh::build_square(6.0, 6, 2));
  const Forms f(sp, small(100.0, 0.3));
  const auto u = initial_guess(f.config(), f);
  const auto ind = compute_indicators(f, u, false, 10);
  REQUIRE(ind.items.size() == static_cast<std::size_t>(sp->num_cells()));
  for (const auto& it : ind.items) {
    CHECK(it.dofs_h >= 1);
    CHECK(it.dofs_p >= 1);
    CHECK(it.dE_max == std::max(it.dE_h, it.dE_p));
    CHECK((it.kind == RefineKind::p) == (it.dE_p >= it.dE_h));
  }
  const auto ho = compute_indicators(f, u, true, 10);
  for (const auto& it : ho.items) {
    CHECK(std::isinf(it.dE_p));
    CHECK(it.kind == RefineKind::h);
  }
  const auto capped = compute_indicators(f, u, false, 2);
  for (const auto& it : capped.items) CHECK(it.kind == RefineKind::h);
}

TEST_CASE("an under-resolved spike owns the largest indicator") {
  ProblemConfig cfg = small(0.0, 0.0);
  const auto sp = std::make_shared<const HpSpace>(Mesh::build_square(6.0, 8, 3));
  const Forms f(sp, cfg);
  // centroid of an off-centre cell
  const int c0 = 37;
  const auto& xy = sp->cell(c0).xy;
  const double cx = (xy[0].x + xy[1].x + xy[2].x) / 3.0, cy = (xy[0].y + xy[1].y + xy[2].y) / 3.0;
  auto u = interpolate(
      [&](double x, double y) {
        const double r2 = (x - cx) * (x - cx) + (y - cy) * (y - cy);
        return cplx(std::exp(-0.5 * (x * x + y * y)) + 0.5 * std::exp(-r2 / 0.02), 0.0);
      },
      *sp);
  f.normalize(u);
  const auto ind = compute_indicators(f, u, false, 10);
  int best = 0;
  for (std::size_t k = 0; k < ind.items.size(); ++k)
    if (ind.items[k].dE_max > ind.items[best].dE_max) best = static_cast<int>(k);
  CHECK(best == c0);
}

TEST_CASE("refinement kinds") {
  SUBCASE("all p keeps the topology") {
    Mesh m = Mesh::build_square(6.0, 4, 2);
    const HpSpace s(m);
    RefineIndicators ind;
    std::vector<int> marked;
    for (int c = 0; c < s.num_cells(); ++c) {
      ElementIndicator it;
      it.element = s.cell(c).element;
      it.kind = RefineKind::p;
      ind.items.push_back(it);
      if (c % 3 == 0) marked.push_back(c);
    }
    const auto before = m.active_elements();
    const auto counts = refine(m, ind, marked, 10);
    CHECK(counts.p == static_cast<int>(marked.size()));
    CHECK(m.active_elements() == before);
    for (int k : marked) CHECK(m.element(ind.items[k].element).degree == 3);
    CHECK(m.max_degree_jump() <= 1);
  }
  SUBCASE("p is clamped at p_max") {
    Mesh m = Mesh::build_square(6.0, 2, 4);
    RefineIndicators ind;
    ElementIndicator it;
    it.element = m.active_elements()[0];
    it.kind = RefineKind::p;
    ind.items.push_back(it);
    refine(m, ind, {0}, 4);
    CHECK(m.element(it.element).degree == 4);
  }
  SUBCASE("mixed marks on neighbours") {
    Mesh m = Mesh::build_square(6.0, 4, 1);
    const HpSpace s(m);
    RefineIndicators ind;
    std::vector<int> marked;
    for (int c = 0; c < s.num_cells(); ++c) {
      ElementIndicator it;
      it.element = s.cell(c).element;
      it.kind = c % 2 ? RefineKind::h : RefineKind::p;
      ind.items.push_back(it);
      if (c % 5 < 2) marked.push_back(c);
    }
    const auto counts = refine(m, ind, marked, 10);
    CHECK(counts.h + counts.p == static_cast<int>(marked.size()));
    CHECK(audit::conforming(m));
    CHECK(m.max_degree_jump() <= 1);
    CHECK(audit::total_area(m) == doctest::Approx(144.0));
  }
}

TEST_CASE("pure p adaptation embeds the state exactly") {
  const ProblemConfig cfg = small(50.0, 0.4);
  auto sp = std::make_shared<const HpSpace>(Mesh::build_square(6.0, 6, 2));
  const Forms f(sp, cfg);
  StateVector u = initial_guess(cfg, f);
  auto ind = compute_indicators(f, u, false, 10);
  for (auto& it : ind.items) it.kind = RefineKind::p;
  std::vector<int> all(ind.items.size());
  for (std::size_t k = 0; k < all.size(); k += 2) all[k] = static_cast<int>(k);
  Mesh m = sp->mesh();
  refine(m, ind, all, 10);
  auto next = std::make_shared<const HpSpace>(std::move(m));
  const Forms g(next, cfg);
  StateVector v = transfer(u, *sp, *next);
  CHECK(g.norm(v) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(g.energy(v) == doctest::Approx(f.energy(u)).epsilon(1e-10));
}

TEST_CASE("initial guesses") {
  ProblemConfig cfg = small(10.0, 0.5);
  const Forms f(std::make_shared<const HpSpace>(Mesh::build_square(6.0, 8, 2)), cfg);
  const auto c = initial_guess(cfg, f);
  CHECK(f.norm(c) == doctest::Approx(1.0).epsilon(1e-13));
  StateVector one = interpolate([](double, double) { return cplx(1.0, 0.0); }, f.space());
  CHECK(f.inner(c, one).real() > 0.0);

  cfg.initial = ProblemConfig::InitialGuess::vortex;
  const auto v = initial_guess(cfg, f);
  CHECK(f.norm(v) == doctest::Approx(1.0).epsilon(1e-13));
  // the ansatz carries angular momentum: the rotation term lowers the energy
  const auto parts = f.energy_parts(v);
  CHECK(std::abs(parts.imag) < 1e-8 * parts.scale);
  ProblemConfig still = cfg;
  still.omega = 0.0;
  const Forms f0(f.space_ptr(), still);
  CHECK(f.energy(v) < f0.energy(v));
}

TEST_CASE("adaptive runs are deterministic and reach the linear oracle") {
  ProblemConfig cfg = preset("linear");
  cfg.adapt.max_dofs = 1500;
  const auto a = solve_adaptive(cfg);
  const auto b = solve_adaptive(cfg);
  REQUIRE(a.levels.size() == b.levels.size());
  for (std::size_t k = 0; k < a.levels.size(); ++k) {
    CHECK(a.levels[k].energy == b.levels[k].energy);
    CHECK(a.levels[k].dofs == b.levels[k].dofs);
  }
  CHECK(a.energy == doctest::Approx(1.0).epsilon(1e-6));
  for (std::size_t k = 1; k < a.levels.size(); ++k) CHECK(a.levels[k].energy <= a.levels[k - 1].energy + 1e-12);
}
