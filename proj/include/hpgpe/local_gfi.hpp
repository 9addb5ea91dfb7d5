#pragma once

#include <vector>

#include <Eigen/Dense>

#include "hpgpe/forms.hpp"

namespace hpgpe {

enum class RefineKind { h, p };

/// Locally supported enrichment functions xi_1..xi_m around one element,
/// described cell by cell: `map[i]` sends local shape i of the cell to its
/// xi index (-1 if unused).
struct LocalSpace {
  struct Cell {
    int source = -1;  // cell of the global space containing this cell
    bool source_frame = false;  // same reference frame as the source cell
    CellGeometry geo;
    int degree = 1;  // tabulation degree
    std::vector<int> map;
  };

  RefineKind kind = RefineKind::p;
  int seed = -1;  // global cell index
  int m = 0;
  int dofs = 1;  // new dofs attributed to the seed element
  std::vector<Cell> cells;
  std::vector<int> sources;  // distinct global cells covered
};

/// p: the modes of degree p_kappa + 1 on the face-neighbour patch that the
///    current space lacks (edge modes on the seed's interior edges, bubbles).
/// h: the full basis of the red/green refined patch at degree p_kappa with
///    zero trace on the patch boundary.
LocalSpace local_enrichment_basis(const HpSpace& space, int seed_cell, RefineKind kind);

/// Global data of the current state shared by all local steps.
struct LocalContext {
  const Forms* forms = nullptr;
  const StateVector* u = nullptr;
  EnergyParts parts;
  double a_uu = 0.0;  // a_u(u, u)
  double uu = 1.0;    // (u, u)
  int quadrature_extra = 2;  // local rules are exact to degree 4 p + extra

  static LocalContext make(const Forms& forms, const StateVector& u);
};

struct LocalStep {
  Eigen::VectorXcd coeffs;  // in the basis (xi_1..xi_m, u)
  double energy = 0.0;      // E of the normalized local iterate
  double decay = 0.0;       // E(u) - energy
  int dropped = 0;          // directions dropped for near dependence
};

/// One GFI step with tau = 1 in span{xi, u}, normalized.
LocalStep local_gfi_step(const LocalContext& ctx, const LocalSpace& W);

}  // namespace hpgpe
