#include <cmath>

#include "doctest.h"
#include "hpgpe/quadrature.hpp"

using namespace hpgpe;

namespace {

double factorial(int n) { return std::tgamma(n + 1.0); }

double integrate_monomial(const Quadrature& q, int a, int b) {
  double s = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i)
    s += q.weights[i] * std::pow(q.points[i][0], a) * std::pow(q.points[i][1], b);
  return s;
}

}  // namespace

TEST_CASE("gauss-legendre integrates polynomials of degree 2n-1") {
  for (int n = 1; n <= 12; ++n) {
    const auto& g = gauss_legendre(n);
    for (int k = 0; k <= 2 * n - 1; ++k) {
      double s = 0.0;
      for (int i = 0; i < n; ++i) s += g.weights[i] * std::pow(g.nodes[i], k);
      const double exact = (k % 2 == 1) ? 0.0 : 2.0 / (k + 1);
      CHECK(s == doctest::Approx(exact).epsilon(1e-14));
    }
  }
}

TEST_CASE("triangle rule basics") {
  const auto& q = quadrature_rule(4);
  CHECK(integrate_monomial(q, 0, 0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(integrate_monomial(q, 1, 0) == doctest::Approx(1.0 / 6.0).epsilon(1e-15));
  CHECK(std::abs(integrate_monomial(q, 2, 2) - 1.0 / 180.0) < 1e-15);
}

TEST_CASE("triangle rules are exact up to their degree") {
  for (int deg = 1; deg <= 30; ++deg) {
    const auto& q = quadrature_rule(deg);
    CHECK(q.degree >= deg);
    for (int a = 0; a <= deg; ++a)
      for (int b = 0; a + b <= deg; ++b) {
        const double exact = factorial(a) * factorial(b) / factorial(a + b + 2);
        CHECK(std::abs(integrate_monomial(q, a, b) - exact) <= 1e-14);
      }
  }
}

TEST_CASE("triangle rule points lie inside the reference triangle") {
  const auto& q = quadrature_rule(20);
  for (std::size_t i = 0; i < q.size(); ++i) {
    const auto l = q.barycentric(i);
    CHECK(l[0] > 0.0);
    CHECK(l[1] > 0.0);
    CHECK(l[2] > 0.0);
    CHECK(q.weights[i] > 0.0);
  }
}
