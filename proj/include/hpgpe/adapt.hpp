#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "hpgpe/gflow.hpp"
#include "hpgpe/local_gfi.hpp"

namespace hpgpe {

struct ElementIndicator {
  int element = -1;
  double dE_h = 0.0;  // energy decay per new dof
  double dE_p = 0.0;  // -inf when p-enrichment is unavailable
  int dofs_h = 1;
  int dofs_p = 1;
  double decay_h = 0.0;
  double decay_p = 0.0;
  double dE_max = 0.0;
  RefineKind kind = RefineKind::p;
};

struct RefineIndicators {
  std::vector<ElementIndicator> items;  // one per space cell, in cell order
  double wall_s = 0.0;
};

RefineIndicators compute_indicators(const Forms& forms, const StateVector& u, bool h_only, int p_max,
                                    int quadrature_extra = 2);

/// Positions into ind.items with dE_max >= theta * max. Empty when the
/// maximum is not positive.
std::vector<int> mark(const RefineIndicators& ind, double theta);

struct RefineCounts {
  int h = 0;
  int p = 0;
};

/// p-raises first (clamped at p_max), then red refinement with closure, then
/// degree smoothing.
RefineCounts refine(Mesh& mesh, const RefineIndicators& ind, const std::vector<int>& marked, int p_max);

StateVector initial_guess(const ProblemConfig& cfg, const Forms& forms);

struct LevelRecord {
  int level = 0;
  int dofs = 0;
  int cells = 0;
  int max_degree = 1;
  double energy = 0.0;
  double lambda = 0.0;
  double diff = 0.0;
  int flow_iterations = 0;
  bool stagnated = false;
  int marked_h = 0;
  int marked_p = 0;
  double wall_s = 0.0;  // cumulative
};

struct AdaptiveCallbacks {
  std::function<void(const LevelRecord&)> on_level;
  std::function<void(int, const FlowRecord&)> on_flow;
  std::function<void(int, const HpSpace&, const StateVector&)> on_space;
};

struct AdaptiveResult {
  std::shared_ptr<const HpSpace> space;
  StateVector u;
  double energy = 0.0;
  double lambda = 0.0;
  std::vector<LevelRecord> levels;
  bool converged = false;
  std::string stop_reason;
  double wall_s = 0.0;
};

AdaptiveResult solve_adaptive(const ProblemConfig& cfg, const AdaptiveCallbacks& cb = {});

}  // namespace hpgpe
