#include <cmath>
#include <memory>
#include <random>

#include "doctest.h"
#include "hpgpe/forms.hpp"

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

std::shared_ptr<const HpSpace> graded_space(unsigned seed, double L = 6.0) {
  std::mt19937 rng(seed);
  Mesh m = Mesh::build_square(L, 4, 2);
  std::vector<int> marked;
  for (int id : m.active_elements())
    if (rng() % 4 == 0) marked.push_back(id);
  m.conformity_closure(marked);
  for (int id : m.active_elements()) m.set_degree(id, 1 + static_cast<int>(rng() % 4));
  m.smooth_degrees(10);
  return std::make_shared<const HpSpace>(std::move(m));
}

StateVector random_state(const HpSpace& s, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> N;
  StateVector u = StateVector::zero(s);
  for (int i = 0; i < s.ndofs(); ++i) u.coeffs(i) = {N(rng), N(rng)};
  return u;
}

cplx form(const SparseC& A, const StateVector& u, const StateVector& v) { return v.coeffs.dot(A * u.coeffs); }

}  // namespace

TEST_CASE("single interior hat function: stiffness + 2 V mass") {
  ProblemConfig cfg;
  cfg.potential.kind = Potential::Kind::polynomial;
  cfg.potential.terms = {{1.0, 0, 0}};
  cfg.half_width = 1.0;
  const Forms f(std::make_shared<const HpSpace>(Mesh::build_square(1.0, 2, 1)), cfg);
  REQUIRE(f.space().ndofs() == 1);
  CHECK(f.mass().coeff(0, 0) == doctest::Approx(2.0 / 3.0));
  CHECK(f.stiffness().coeff(0, 0) == doctest::Approx(4.0));
  CHECK(f.weighted(nullptr).coeff(0, 0).real() == doctest::Approx(4.0 + 4.0 / 3.0));
}

TEST_CASE("Dirichlet form when V, beta and omega vanish") {
  ProblemConfig cfg;
  cfg.potential.kind = Potential::Kind::polynomial;
  const Forms f(graded_space(1), cfg);
  const auto u = random_state(f.space(), 2);
  const auto A = f.weighted(&u);
  const cplx a = form(A, u, u);
  CHECK(a.real() == doctest::Approx(u.coeffs.dot(f.stiffness().cast<cplx>() * u.coeffs).real()).epsilon(1e-13));
  CHECK(2.0 * f.energy(u) == doctest::Approx(a.real()).epsilon(1e-12));
}

TEST_CASE("weighted form is Hermitian and coercive") {
  const ProblemConfig cfg = harmonic(50.0, 0.7);
  const Forms f(graded_space(3), cfg);
  const auto z = random_state(f.space(), 4);
  const SparseC A = f.weighted(&z);
  const SparseC AH = SparseC(A.adjoint());
  const double norm = A.norm();
  CHECK((A - AH).norm() < 1e-12 * norm);
  for (int k = 0; k < A.outerSize(); ++k)
    for (SparseC::InnerIterator it(A, k); it; ++it)
      CHECK(std::abs(it.value() - std::conj(A.coeff(it.col(), it.row()))) <= 1e-12 * norm);

  const double c = f.v1().coercivity();
  CHECK(c > 0.0);
  CHECK(c < 1.0);
  const SparseC K = f.stiffness().cast<cplx>();
  for (unsigned s = 0; s < 100; ++s) {
    const auto x = random_state(f.space(), 100 + s);
    const double ax = x.coeffs.dot(A * x.coeffs).real();
    const double kx = x.coeffs.dot(K * x.coeffs).real();
    CHECK(ax >= c * kx);
  }
}

TEST_CASE("energy identities") {
  const ProblemConfig cfg = harmonic(30.0, 0.6);
  const Forms f(graded_space(5), cfg);
  for (unsigned s = 0; s < 5; ++s) {
    auto u = random_state(f.space(), 10 + s);
    f.normalize(u);
    CHECK(f.norm(u) == doctest::Approx(1.0).epsilon(1e-14));
    const auto parts = f.energy_parts(u);
    CHECK(std::abs(parts.imag) < 1e-10 * std::abs(parts.energy));
    const cplx au = form(f.weighted(&u), u, u);
    CHECK(std::abs(au.imag()) < 1e-10 * std::abs(au.real()));
    // E = a_u(u,u)/2 - beta/2 |u|_4^4
    CHECK(parts.energy == doctest::Approx(0.5 * au.real() - 0.5 * cfg.beta * parts.quartic).epsilon(1e-12));
    // lambda = 2E + beta |u|_4^4
    CHECK(f.rayleigh_lambda(u) == doctest::Approx(2.0 * parts.energy + cfg.beta * parts.quartic).epsilon(1e-12));
    // global phase
    const double theta = 0.3 + s;
    StateVector v = u;
    v.coeffs *= std::polar(1.0, theta);
    CHECK(f.energy(v) == doctest::Approx(parts.energy).epsilon(1e-12));
  }
}

TEST_CASE("real states carry no rotation energy") {
  const Forms rot(graded_space(6), harmonic(10.0, 0.8));
  const Forms still(rot.space_ptr(), harmonic(10.0, 0.0));
  auto u = random_state(rot.space(), 1);
  u.coeffs = u.coeffs.real().cast<cplx>();
  CHECK(rot.energy(u) == doctest::Approx(still.energy(u)).epsilon(1e-13));
  // the rotation term alone is real on complex states
  const auto v = random_state(rot.space(), 2);
  const auto parts = rot.energy_parts(v);
  CHECK(std::abs(parts.imag) < 1e-10 * parts.scale);
}

TEST_CASE("mass matrix is positive definite") {
  const Forms f(graded_space(7), harmonic(0.0, 0.0));
  const SparseC M = f.mass_complex();
  for (unsigned s = 0; s < 100; ++s) {
    const auto x = random_state(f.space(), 300 + s);
    CHECK(x.coeffs.dot(M * x.coeffs).real() > 0.0);
  }
}

TEST_CASE("potential condition is enforced") {
  ProblemConfig cfg = harmonic(1.0, 1.0);  // V - omega^2 r^2 / 2 = 0
  CHECK_THROWS_AS(Forms(graded_space(1), cfg), std::domain_error);
  cfg.omega = 0.9;
  const Forms f(graded_space(1), cfg);
  CHECK(f.v1().delta > 0.0);
}
