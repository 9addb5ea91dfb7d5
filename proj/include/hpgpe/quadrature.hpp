#pragma once

#include <array>
#include <vector>

namespace hpgpe {

/// Gauss-Legendre rule on [-1, 1].
struct GaussRule1D {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Returns the n-point Gauss-Legendre rule (exact for degree 2n-1). Cached.
const GaussRule1D& gauss_legendre(int n);

/// Quadrature on the reference triangle with vertices (0,0), (1,0), (0,1).
///
/// Points are stored as reference coordinates (xi, eta); the matching
/// barycentric coordinates are (1 - xi - eta, xi, eta).
struct Quadrature {
  std::vector<std::array<double, 2>> points;
  std::vector<double> weights;
  int degree = 0;

  std::size_t size() const { return weights.size(); }
  std::array<double, 3> barycentric(std::size_t q) const {
    return {1.0 - points[q][0] - points[q][1], points[q][0], points[q][1]};
  }
};

/// Conical-product (collapsed square) Gauss rule exact for polynomials of
/// total degree <= `degree`. Cached; the returned reference stays valid.
const Quadrature& quadrature_rule(int degree);

}  // namespace hpgpe
