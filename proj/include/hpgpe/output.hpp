#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "hpgpe/adapt.hpp"

namespace hpgpe {

/// N,dofs,sqrt_dofs,E,E_minus_reference,lambda,n_flow_iters,marked_h,marked_p,wall_s
void write_convergence_csv(std::ostream& out, const std::vector<LevelRecord>& levels,
                           std::optional<double> reference);

struct LevelFlowRecord {
  int level = 0;
  FlowRecord record;
};

/// level,n,tau,E,inc,diff,lambda,g_dot_u
void write_flow_csv(std::ostream& out, const std::vector<LevelFlowRecord>& records);

/// Run summary: E, lambda, dofs, levels, wall_s plus identification fields.
void write_summary_json(std::ostream& out, const ProblemConfig& cfg, const AdaptiveResult& res, int exit_code);

/// printf("%.16g").
std::string format_energy(double x);

}  // namespace hpgpe
