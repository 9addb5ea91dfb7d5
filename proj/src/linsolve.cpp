#include "hpgpe/linsolve.hpp"

#include <cmath>
#include <functional>
#include <string>

#include <Eigen/CholmodSupport>

namespace hpgpe {

namespace {

using Vec = Eigen::VectorXcd;
using Precond = std::function<Vec(const Vec&)>;

struct PcgOutcome {
  int iterations = 0;
  bool converged = false;
};

// Plain PCG from x; stops on the recursive residual.
PcgOutcome pcg(const SparseC& A, const Vec& b, Vec& x, const Precond& apply, double tol_abs, int max_it) {
  Vec r = b - A * x;
  PcgOutcome out;
  if (r.norm() <= tol_abs) {
    out.converged = true;
    return out;
  }
  Vec z = apply(r);
  Vec p = z;
  double rz = r.dot(z).real();
  if (!(rz > 0.0)) throw SolverError("pcg: preconditioner is not positive definite (r^H M r = " +
                                         std::to_string(rz) + ")", r.norm());
  for (int it = 1; it <= max_it; ++it) {
    const Vec Ap = A * p;
    const double pAp = p.dot(Ap).real();
    if (!(pAp > 0.0))
      throw SolverError("pcg: matrix is not positive definite (p^H A p = " + std::to_string(pAp) + ")", r.norm());
    const double alpha = rz / pAp;
    x += alpha * p;
    r -= alpha * Ap;
    out.iterations = it;
    if (r.norm() <= tol_abs) {
      out.converged = true;
      return out;
    }
    z = apply(r);
    const double rz_new = r.dot(z).real();
    p = z + (rz_new / rz) * p;
    rz = rz_new;
  }
  return out;
}

}  // namespace

struct HpdSolver::Impl {
  double rtol;
  int refactor_after;
  int factorizations = 0;
  bool have_factor = false;
  Eigen::Index n = -1;
  Eigen::CholmodSupernodalLLT<SparseC, Eigen::Lower> llt;

  void factor(const SparseC& A) {
    if (n != A.rows()) {
      llt.analyzePattern(A);
      n = A.rows();
    }
    llt.factorize(A);
    if (llt.info() != Eigen::Success)
      throw SolverError("cholesky factorization failed: matrix is not positive definite", 0.0);
    have_factor = true;
    ++factorizations;
  }
};

HpdSolver::HpdSolver(double rtol, int refactor_after) : impl_(std::make_unique<Impl>()) {
  impl_->llt.cholmod().print = 0;  // failures are reported through SolverError
  impl_->rtol = rtol;
  impl_->refactor_after = refactor_after;
}
HpdSolver::~HpdSolver() = default;
HpdSolver::HpdSolver(HpdSolver&&) noexcept = default;
HpdSolver& HpdSolver::operator=(HpdSolver&&) noexcept = default;

int HpdSolver::factorizations() const { return impl_->factorizations; }
void HpdSolver::reset() {
  impl_->have_factor = false;
  impl_->n = -1;
}

SolveResult HpdSolver::solve(const SparseC& A, const Vec& b, const Vec* x0) {
  auto& s = *impl_;
  SolveResult res;
  const double bn = b.norm();
  if (bn == 0.0) {
    res.x = Vec::Zero(A.rows());
    return res;
  }
  if (!s.have_factor || s.n != A.rows()) s.factor(A);
  Vec x = (x0 && x0->size() == b.size()) ? *x0 : Vec(s.llt.solve(b));
  const Precond apply = [&](const Vec& r) -> Vec { return s.llt.solve(r); };
  const double tol = s.rtol * bn;
  bool refreshed = false;
  for (int attempt = 0; attempt < 4; ++attempt) {
    const auto out = pcg(A, b, x, apply, 0.5 * tol, 200);
    res.iterations += out.iterations;
    res.residual = (A * x - b).norm() / bn;
    if (res.residual <= s.rtol && out.iterations <= s.refactor_after) break;
    if (res.residual <= s.rtol) {
      // converged but slowly: refresh the factor for the next solve
      s.factor(A);
      break;
    }
    if (!refreshed) {
      s.factor(A);
      refreshed = true;
    }
  }
  if (!(res.residual <= s.rtol))
    throw SolverError("hpd solve did not reach relative residual " + std::to_string(s.rtol) + " (got " +
                          std::to_string(res.residual) + ")",
                      res.residual);
  res.x = std::move(x);
  return res;
}

SolveResult solve_hpd(const SparseC& A, const Vec& b, double rtol, Preconditioner pc, int max_iterations) {
  if (!(rtol > 0.0 && rtol < 1.0)) throw std::invalid_argument("solve_hpd: rtol must lie in (0, 1)");
  if (A.rows() != A.cols() || A.rows() != b.size()) throw std::invalid_argument("solve_hpd: dimension mismatch");
  if (pc == Preconditioner::cholesky) {
    HpdSolver solver(rtol);
    return solver.solve(A, b);
  }
  SolveResult res;
  const double bn = b.norm();
  res.x = Vec::Zero(A.rows());
  if (bn == 0.0) return res;
  Eigen::VectorXd dinv(A.rows());
  const Eigen::VectorXcd diag = A.diagonal();
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    if (!(diag(i).real() > 0.0))
      throw SolverError("solve_hpd: non-positive diagonal entry at row " + std::to_string(i), 1.0);
    dinv(i) = 1.0 / diag(i).real();
  }
  const int cap = max_iterations > 0
                      ? max_iterations
                      : std::max(50, static_cast<int>(20.0 * std::sqrt(static_cast<double>(A.rows()))));
  const Precond apply = [&](const Vec& r) -> Vec { return dinv.cast<cplx>().cwiseProduct(r); };
  int remaining = cap;
  for (int attempt = 0; attempt < 4 && remaining > 0; ++attempt) {
    const auto out = pcg(A, b, res.x, apply, 0.5 * rtol * bn, remaining);
    res.iterations += out.iterations;
    remaining -= out.iterations;
    res.residual = (A * res.x - b).norm() / bn;
    if (res.residual <= rtol) return res;
    if (!out.converged) break;
  }
  throw SolverError("solve_hpd: no convergence within " + std::to_string(cap) +
                        " iterations (relative residual " + std::to_string(res.residual) + ")",
                    res.residual);
}

}  // namespace hpgpe
