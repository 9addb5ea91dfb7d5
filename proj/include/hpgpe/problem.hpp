#pragma once

#include <optional>
#include <string>
#include <vector>

namespace hpgpe {

class HpSpace;

/// External potential V(x, y).
struct Potential {
  enum class Kind { harmonic, lattice, nonsymmetric, polynomial };

  struct Term {
    double coeff = 0.0;
    int px = 0;
    int py = 0;
  };

  Kind kind = Kind::harmonic;
  // lattice: V = r^2/2 + offset + amplitude sin(k x) sin(k y)
  double offset = 20.0;
  double amplitude = 20.0;
  double wavenumber = 6.283185307179586;
  // nonsymmetric: V = (r^2 + height exp(-(x - shift)^2 - y^2)) / 2
  double height = 8.0;
  double shift = 1.0;
  // polynomial: V = sum coeff x^px y^py
  std::vector<Term> terms;

  double operator()(double x, double y) const;
  std::string name() const;
};

struct FlowParams {
  double tau_min = 0x1p-20;
  double tau_max = 1.0;
  double gamma = 1e-3;
  int max_iterations = 500;
  double solver_rtol = 1e-12;
};

struct AdaptParams {
  double theta = 1.0 / 3.0;
  double tol = 1e-10;
  long max_dofs = 30000;
  int max_levels = 200;
  bool h_only = false;
  int p_max = 10;
};

struct ProblemConfig {
  enum class InitialGuess { constant, vortex };

  std::string name = "custom";
  Potential potential;
  double beta = 0.0;
  double omega = 0.0;
  double half_width = 6.0;
  int n0 = 8;
  int p0 = 1;
  InitialGuess initial = InitialGuess::constant;
  std::optional<double> reference_energy;
  FlowParams flow;
  AdaptParams adapt;

  /// Throws std::invalid_argument on out-of-range values.
  void validate() const;
};

/// Quadrature-point estimates behind the coercivity of the weighted form.
struct V1Report {
  double delta = 0.0;    // min (V - omega^2 |x|^2 / 2)
  double r_omega = 0.0;  // max |x|
  double omega = 0.0;
  double coercivity() const;  // 2 delta / (omega^2 r^2 + 2 delta)
};

/// Scans the assembly quadrature points of `space`.
V1Report check_v1(const ProblemConfig& cfg, const HpSpace& space);

/// Same scan on the configured initial mesh.
V1Report check_v1(const ProblemConfig& cfg);

/// Quadrature degree used for assembly and energy on a degree-p element.
constexpr int assembly_degree(int p) { return 4 * p + 2; }

}  // namespace hpgpe
