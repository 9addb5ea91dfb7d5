#pragma once

#include <memory>
#include <vector>

#include <Eigen/Sparse>

#include "hpgpe/hp_space.hpp"
#include "hpgpe/problem.hpp"

namespace hpgpe {

using SparseC = Eigen::SparseMatrix<cplx>;
using SparseR = Eigen::SparseMatrix<double>;

/// Energy of a state split into its quadratic and quartic parts, with the
/// per-element contributions needed by the local refinement indicators.
struct EnergyParts {
  double energy = 0.0;
  double quadratic = 0.0;  // int |grad u|^2/2 + V|u|^2 + Re(-i omega conj(u) A.grad u)
  double quartic = 0.0;    // int |u|^4
  double imag = 0.0;       // imaginary part of the energy integral before discarding
  double scale = 0.0;      // sum of absolute contributions, for relative checks
  std::vector<double> q_elem;
  std::vector<double> f_elem;
};

/// Matrices and functionals of the Gross-Pitaevskii energy on one hp space.
///
/// Matrices use the convention A(i, j) = a(phi_j, phi_i) and are stored with
/// both triangles. The u-independent part of a_z (stiffness, potential and
/// rotation) is assembled once; a_z only adds the 2 beta |z|^2 mass.
class Forms {
 public:
  Forms(std::shared_ptr<const HpSpace> space, const ProblemConfig& cfg);

  const HpSpace& space() const { return *space_; }
  std::shared_ptr<const HpSpace> space_ptr() const { return space_; }
  const ProblemConfig& config() const { return cfg_; }
  const V1Report& v1() const { return v1_; }

  const SparseR& mass() const { return mass_; }
  const SparseC& mass_complex() const { return mass_c_; }
  const SparseR& stiffness() const { return stiffness_; }
  /// a_0: the form without the interaction weight.
  const SparseC& static_part() const { return static_; }

  /// a_z; z == nullptr means z = 0.
  SparseC weighted(const StateVector* z) const;

  EnergyParts energy_parts(const StateVector& u) const;
  double energy(const StateVector& u) const { return energy_parts(u).energy; }
  /// a_u(u, u) / (u, u).
  double rayleigh_lambda(const StateVector& u) const;
  /// int |u|^4.
  double l4_norm4(const StateVector& u) const { return energy_parts(u).quartic; }

  /// (u, v) = int u conj(v).
  cplx inner(const StateVector& u, const StateVector& v) const;
  double norm(const StateVector& u) const;
  /// Scales u to unit L2 norm; throws if u vanishes.
  void normalize(StateVector& u) const;

 private:
  void build_slots();

  std::shared_ptr<const HpSpace> space_;
  ProblemConfig cfg_;
  V1Report v1_;
  SparseR mass_;
  SparseC mass_c_;
  SparseR stiffness_;
  SparseC static_;
  // per cell: valid local shape indices and value offsets of their pairs
  std::vector<std::vector<int>> valid_;
  std::vector<std::vector<int>> slots_;
  // per cell, at the assembly quadrature points: weight * |det|, V, x, y
  std::vector<Eigen::VectorXd> wq_, vq_, xq_, yq_;
};

}  // namespace hpgpe
