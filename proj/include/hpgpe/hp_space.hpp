#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "hpgpe/dof_layout.hpp"
#include "hpgpe/mesh.hpp"

namespace hpgpe {

using cplx = std::complex<double>;

/// One active element of the mesh seen as a cell of the space.
struct SpaceCell : CellDofs {
  int element = -1;
};

/// Conforming hp space over the active elements of a mesh snapshot, with
/// homogeneous Dirichlet conditions on the domain boundary.
class HpSpace {
 public:
  explicit HpSpace(Mesh mesh);

  const Mesh& mesh() const { return mesh_; }
  std::uint64_t id() const { return id_; }
  int ndofs() const { return ndofs_; }
  int num_cells() const { return static_cast<int>(cells_.size()); }
  const SpaceCell& cell(int c) const { return cells_[c]; }
  const std::vector<SpaceCell>& cells() const { return cells_; }
  /// Cell index of an active mesh element, or -1.
  int cell_of_element(int element) const;
  int max_degree() const { return max_degree_; }

  struct Location {
    int cell = -1;
    std::array<double, 3> lambda{};
  };
  /// Finds a cell containing p. Throws std::out_of_range outside the domain.
  Location locate(Point p) const;

 private:
  void build_locator();

  Mesh mesh_;
  std::uint64_t id_ = 0;
  int ndofs_ = 0;
  int max_degree_ = 1;
  std::vector<SpaceCell> cells_;
  std::vector<int> element_to_cell_;
  int grid_n_ = 1;
  std::vector<std::vector<int>> buckets_;
};

/// Coefficients of a discrete function together with the id of its space.
struct StateVector {
  Eigen::VectorXcd coeffs;
  std::uint64_t space_id = 0;

  StateVector() = default;
  StateVector(Eigen::VectorXcd c, std::uint64_t id) : coeffs(std::move(c)), space_id(id) {}
  static StateVector zero(const HpSpace& space) {
    return {Eigen::VectorXcd::Zero(space.ndofs()), space.id()};
  }
};

/// Throws std::invalid_argument if u does not belong to space.
void check_state(const HpSpace& space, const StateVector& u);

/// Local coefficients of u on cell c (zero for eliminated modes).
Eigen::VectorXcd local_coefficients(const HpSpace& space, int c, const Eigen::VectorXcd& u);

struct PointValue {
  cplx value;
  cplx dx;
  cplx dy;
};

/// Value and gradient of u at barycentric point lambda of cell c.
PointValue evaluate_in_cell(const HpSpace& space, int c, const Eigen::VectorXcd& u,
                            const std::array<double, 3>& lambda);

/// Values (and gradients) at physical points. Throws std::out_of_range for
/// points outside the closed domain.
std::vector<PointValue> evaluate(const HpSpace& space, const StateVector& u, std::span<const Point> pts);

using PointFunction = std::function<cplx(double, double)>;

/// Projection-based interpolation: vertex values, L2 projection of edge
/// traces, then L2 projection of the interior residual. Reproduces every
/// function of the space exactly. The result is not normalized.
StateVector interpolate(const PointFunction& f, const HpSpace& space);

/// Moves u from `from` into `to` by interpolation of the function itself.
/// Exact wherever `to` contains the function (p-raise, red children).
StateVector transfer(const StateVector& u, const HpSpace& from, const HpSpace& to);

/// Samples u on an m x m uniform grid of the closed domain and writes
/// x,y,re,im,abs2 rows.
void write_sample_csv(std::ostream& out, const HpSpace& space, const StateVector& u, int m);

}  // namespace hpgpe
