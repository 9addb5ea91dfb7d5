#include "hpgpe/gflow.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>
#include <string>

namespace hpgpe {

Riesz riesz_G(const Forms& forms, HpdSolver& solver, const StateVector& u, const StateVector* warm) {
  check_state(forms.space(), u);
  const SparseC A = forms.weighted(&u);
  const Eigen::VectorXcd b = forms.mass_complex() * u.coeffs;
  const Eigen::VectorXcd* x0 = (warm && warm->space_id == u.space_id) ? &warm->coeffs : nullptr;
  auto res = solver.solve(A, b, x0);
  Riesz out;
  out.G = StateVector(std::move(res.x), u.space_id);
  out.iterations = res.iterations;
  out.g_dot_u = b.dot(out.G.coeffs);  // (G, u) = u^H M g, M real symmetric
  const double re = out.g_dot_u.real();
  if (!(re > 0.0) || std::abs(out.g_dot_u.imag()) > 1e-10 * re)
    throw std::logic_error("(G(u), u) is not real positive: (" + std::to_string(re) + ", " +
                           std::to_string(out.g_dot_u.imag()) + ")");
  return out;
}

StateVector gfi_step(const Forms& forms, const StateVector& u, const Riesz& g, double tau, double* unnormalized_norm) {
  StateVector next((1.0 - tau) * u.coeffs + (tau / g.g_dot_u.real()) * g.G.coeffs, u.space_id);
  const double n = forms.norm(next);
  if (unnormalized_norm) *unnormalized_norm = n;
  if (!(n > 0.0)) throw std::logic_error("gfi step produced a vanishing state");
  next.coeffs /= n;
  return next;
}

StateVector gfi_step(const Forms& forms, HpdSolver& solver, const StateVector& u, double tau) {
  return gfi_step(forms, u, riesz_G(forms, solver, u), tau);
}

StepResult backtracking_step(const Forms& forms, HpdSolver& solver, const StateVector& u, double energy_u,
                             const FlowParams& params, const StateVector* warm) {
  StepResult out;
  out.riesz = riesz_G(forms, solver, u, warm);
  for (double tau = params.tau_max; tau >= params.tau_min; tau *= 0.5) {
    StateVector trial = gfi_step(forms, u, out.riesz, tau);
    const double e = forms.energy(trial);
    if (e < energy_u) {
      out.u = std::move(trial);
      out.tau = tau;
      out.energy = e;
      out.accepted = true;
      return out;
    }
    ++out.halvings;
  }
  out.u = u;
  out.energy = energy_u;
  return out;
}

FlowResult run_flow(const Forms& forms, const StateVector& u0, const FlowParams& params, HpdSolver& solver,
                    const std::function<void(const FlowRecord&)>& on_step) {
  const auto t0 = std::chrono::steady_clock::now();
  FlowResult out;
  out.u = u0;
  out.energy = forms.energy(u0);
  out.stats.energy0 = out.energy;
  for (int n = 1;; ++n) {
    // the lagged factor applied to the new right-hand side beats the previous G as a start
    StepResult step = backtracking_step(forms, solver, out.u, out.energy, params);
    if (!step.accepted) {
      out.stats.stagnated = true;
      break;
    }
    out.stats.backtracks += step.halvings;
    FlowRecord rec;
    rec.n = n;
    rec.tau = step.tau;
    rec.inc = out.energy - step.energy;
    rec.diff = out.stats.energy0 - step.energy;
    rec.energy = step.energy;
    rec.g_dot_u = step.riesz.g_dot_u;
    out.u = std::move(step.u);
    out.energy = step.energy;
    rec.lambda = forms.rayleigh_lambda(out.u);
    out.stats.records.push_back(rec);
    if (on_step) on_step(rec);
    if (rec.inc <= params.gamma * rec.diff) break;
    if (n >= params.max_iterations) {
      out.stats.capped = true;
      break;
    }
  }
  out.stats.wall_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

}  // namespace hpgpe
