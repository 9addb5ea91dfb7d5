#include "hpgpe/problem.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "hpgpe/hp_space.hpp"
#include "hpgpe/quadrature.hpp"

namespace hpgpe {

double Potential::operator()(double x, double y) const {
  const double r2 = x * x + y * y;
  switch (kind) {
    case Kind::harmonic:
      return 0.5 * r2;
    case Kind::lattice:
      return 0.5 * r2 + offset + amplitude * std::sin(wavenumber * x) * std::sin(wavenumber * y);
    case Kind::nonsymmetric:
      return 0.5 * (r2 + height * std::exp(-(x - shift) * (x - shift) - y * y));
    case Kind::polynomial: {
      double v = 0.0;
      for (const auto& t : terms) v += t.coeff * std::pow(x, t.px) * std::pow(y, t.py);
      return v;
    }
  }
  return 0.0;
}

std::string Potential::name() const {
  switch (kind) {
    case Kind::harmonic: return "harmonic";
    case Kind::lattice: return "lattice";
    case Kind::nonsymmetric: return "nonsymmetric";
    case Kind::polynomial: return "polynomial";
  }
  return "?";
}

void ProblemConfig::validate() const {
  auto fail = [](const std::string& what) { throw std::invalid_argument(what); };
  if (!(beta >= 0.0)) fail("beta must be >= 0");
  if (!(omega >= 0.0)) fail("omega must be >= 0");
  if (!(half_width > 0.0)) fail("L must be positive");
  if (n0 < 1) fail("n0 must be >= 1");
  if (p0 < 1 || p0 > adapt.p_max) fail("p0 must lie in [1, p_max]");
  if (adapt.p_max < 1 || adapt.p_max > 18) fail("p_max must lie in [1, 18]");
  if (!(adapt.theta > 0.0 && adapt.theta < 1.0)) fail("theta must lie in (0, 1)");
  if (!(adapt.tol > 0.0)) fail("tol must be positive");
  if (adapt.max_dofs < 1) fail("max_dofs must be positive");
  if (!(flow.gamma > 0.0 && flow.gamma < 1.0)) fail("gamma must lie in (0, 1)");
  if (!(flow.tau_min > 0.0 && flow.tau_min <= flow.tau_max && flow.tau_max < 2.0))
    fail("time steps must satisfy 0 < tau_min <= tau_max < 2");
  if (!(flow.solver_rtol > 0.0 && flow.solver_rtol < 1.0)) fail("solver rtol must lie in (0, 1)");
  if (flow.max_iterations < 1) fail("max flow iterations must be positive");
}

double V1Report::coercivity() const {
  return 2.0 * delta / (omega * omega * r_omega * r_omega + 2.0 * delta);
}

V1Report check_v1(const ProblemConfig& cfg, const HpSpace& space) {
  V1Report rep;
  rep.delta = std::numeric_limits<double>::infinity();
  rep.omega = cfg.omega;
  const double w2 = cfg.omega * cfg.omega;
  for (const auto& cell : space.cells()) {
    const auto& rule = quadrature_rule(assembly_degree(cell.degree));
    for (const auto& pt : rule.points) {
      const Point x = cell.geo.map(pt[0], pt[1]);
      const double r2 = x.x * x.x + x.y * x.y;
      rep.delta = std::min(rep.delta, cfg.potential(x.x, x.y) - 0.5 * w2 * r2);
      rep.r_omega = std::max(rep.r_omega, std::sqrt(r2));
    }
  }
  return rep;
}

V1Report check_v1(const ProblemConfig& cfg) {
  const HpSpace space(Mesh::build_square(cfg.half_width, cfg.n0, cfg.p0));
  return check_v1(cfg, space);
}

}  // namespace hpgpe
