#pragma once

#include <functional>
#include <vector>

#include "hpgpe/forms.hpp"
#include "hpgpe/linsolve.hpp"

namespace hpgpe {

struct FlowRecord {
  int n = 0;
  double tau = 0.0;
  double energy = 0.0;
  double inc = 0.0;
  double diff = 0.0;
  double lambda = 0.0;
  cplx g_dot_u;  // (G(u), u) at the step's starting state
};

struct FlowStats {
  double energy0 = 0.0;
  std::vector<FlowRecord> records;
  int backtracks = 0;  // halvings beyond tau_max
  bool stagnated = false;  // no admissible time step found
  bool capped = false;     // iteration cap reached
  double wall_s = 0.0;
};

/// G(u): a_u(G, v) = (u, v) for all v in the space.
struct Riesz {
  StateVector G;
  cplx g_dot_u;  // (G, u); real and positive
  int iterations = 0;
};

Riesz riesz_G(const Forms& forms, HpdSolver& solver, const StateVector& u, const StateVector* warm = nullptr);

/// u+ = normalize((1 - tau) u + tau G / (G, u)).
StateVector gfi_step(const Forms& forms, const StateVector& u, const Riesz& g, double tau,
                     double* unnormalized_norm = nullptr);
StateVector gfi_step(const Forms& forms, HpdSolver& solver, const StateVector& u, double tau);

struct StepResult {
  StateVector u;
  double tau = 0.0;
  double energy = 0.0;
  bool accepted = false;
  int halvings = 0;
  Riesz riesz;
};

/// Tries tau = tau_max and halves until the energy decreases strictly.
/// When tau would drop below tau_min the step is rejected (stagnation).
StepResult backtracking_step(const Forms& forms, HpdSolver& solver, const StateVector& u, double energy_u,
                             const FlowParams& params, const StateVector* warm = nullptr);

struct FlowResult {
  StateVector u;
  double energy = 0.0;
  FlowStats stats;
};

/// Repeats backtracking steps until inc <= gamma * diff, stagnation or the
/// iteration cap.
FlowResult run_flow(const Forms& forms, const StateVector& u0, const FlowParams& params, HpdSolver& solver,
                    const std::function<void(const FlowRecord&)>& on_step = {});

}  // namespace hpgpe
