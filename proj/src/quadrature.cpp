#include "hpgpe/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <utility>

namespace hpgpe {

namespace {

// Legendre P_n and P_{n-1} at x by the three-term recurrence.
std::pair<double, double> legendre_pair(int n, double x) {
  double p0 = 1.0, p1 = x;
  for (int k = 2; k <= n; ++k) {
    const double pk = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
    p0 = p1;
    p1 = pk;
  }
  return {p1, p0};
}

GaussRule1D build_gauss_legendre(int n) {
  GaussRule1D rule;
  if (n == 1) {
    rule.nodes = {0.0};
    rule.weights = {2.0};
    return rule;
  }
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    for (int it = 0; it < 100; ++it) {
      const auto [pn, pm] = legendre_pair(n, x);
      const double dp = n * (x * pn - pm) / (x * x - 1.0);
      const double dx = pn / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const auto [pn, pm] = legendre_pair(n, x);
    const double dp = n * (x * pn - pm) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

Quadrature build_triangle_rule(int degree) {
  // Collapsed coordinates: xi = s (1 - t), eta = t with Jacobian (1 - t).
  const int ns = degree / 2 + 1;
  const int nt = (degree + 1) / 2 + 1;
  const auto& gs = gauss_legendre(ns);
  const auto& gt = gauss_legendre(nt);
  Quadrature q;
  q.degree = degree;
  q.points.reserve(ns * nt);
  q.weights.reserve(ns * nt);
  for (int j = 0; j < nt; ++j) {
    const double t = 0.5 * (gt.nodes[j] + 1.0);
    const double wt = 0.5 * gt.weights[j];
    for (int i = 0; i < ns; ++i) {
      const double s = 0.5 * (gs.nodes[i] + 1.0);
      const double ws = 0.5 * gs.weights[i];
      q.points.push_back({s * (1.0 - t), t});
      q.weights.push_back(ws * wt * (1.0 - t));
    }
  }
  return q;
}

}  // namespace

const GaussRule1D& gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n must be >= 1");
  static std::mutex mutex;
  static std::map<int, GaussRule1D> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, build_gauss_legendre(n)).first;
  return it->second;
}

const Quadrature& quadrature_rule(int degree) {
  if (degree < 1) degree = 1;
  static std::mutex mutex;
  static std::map<int, Quadrature> cache;
  {
    std::lock_guard lock(mutex);
    auto it = cache.find(degree);
    if (it != cache.end()) return it->second;
  }
  Quadrature rule = build_triangle_rule(degree);
  std::lock_guard lock(mutex);
  return cache.try_emplace(degree, std::move(rule)).first->second;
}

}  // namespace hpgpe
