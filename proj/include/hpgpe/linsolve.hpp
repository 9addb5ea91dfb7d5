#pragma once

#include <memory>

#include <Eigen/Sparse>

#include "hpgpe/forms.hpp"

namespace hpgpe {

/// Raised when a Hermitian positive-definite solve cannot meet its
/// residual contract.
class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, double residual) : std::runtime_error(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

struct SolveResult {
  Eigen::VectorXcd x;
  int iterations = 0;
  double residual = 0.0;  // true relative residual |Ax - b| / |b|
};

enum class Preconditioner { jacobi, cholesky };

/// Preconditioned conjugate gradients on a Hermitian positive-definite A
/// (both triangles stored). The contract |Ax - b| <= rtol |b| is checked on
/// the true residual. max_iterations < 0 selects 20 sqrt(n) (at least 50).
SolveResult solve_hpd(const SparseC& A, const Eigen::VectorXcd& b, double rtol = 1e-12,
                      Preconditioner pc = Preconditioner::cholesky, int max_iterations = -1);

/// PCG with a lagged sparse Cholesky preconditioner. The factor is reused
/// across solves with slowly varying matrices and rebuilt when the
/// iteration count grows.
class HpdSolver {
 public:
  explicit HpdSolver(double rtol = 1e-12, int refactor_after = 12);
  ~HpdSolver();
  HpdSolver(HpdSolver&&) noexcept;
  HpdSolver& operator=(HpdSolver&&) noexcept;

  SolveResult solve(const SparseC& A, const Eigen::VectorXcd& b, const Eigen::VectorXcd* x0 = nullptr);
  int factorizations() const;
  void reset();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace hpgpe
