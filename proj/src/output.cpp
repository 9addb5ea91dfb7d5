#include "hpgpe/output.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

#include <json.hpp>

namespace hpgpe {

std::string format_energy(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16g", x);
  return buf;
}

void write_convergence_csv(std::ostream& out, const std::vector<LevelRecord>& levels,
                           std::optional<double> reference) {
  out << "N,dofs,sqrt_dofs,E,E_minus_reference,lambda,n_flow_iters,marked_h,marked_p,wall_s\n";
  char buf[320];
  for (const auto& r : levels) {
    const std::string err = reference ? format_energy(r.energy - *reference) : std::string();
    std::snprintf(buf, sizeof buf, "%d,%d,%.10g,%s,%s,%s,%d,%d,%d,%.3f\n", r.level, r.dofs,
                  std::sqrt(static_cast<double>(r.dofs)), format_energy(r.energy).c_str(), err.c_str(),
                  format_energy(r.lambda).c_str(), r.flow_iterations, r.marked_h, r.marked_p, r.wall_s);
    out << buf;
  }
}

void write_flow_csv(std::ostream& out, const std::vector<LevelFlowRecord>& records) {
  out << "level,n,tau,E,inc,diff,lambda,g_dot_u\n";
  char buf[320];
  for (const auto& [level, r] : records) {
    std::snprintf(buf, sizeof buf, "%d,%d,%.6g,%s,%.6e,%.6e,%s,%.16g\n", level, r.n, r.tau,
                  format_energy(r.energy).c_str(), r.inc, r.diff, format_energy(r.lambda).c_str(), r.g_dot_u.real());
    out << buf;
  }
}

void write_summary_json(std::ostream& out, const ProblemConfig& cfg, const AdaptiveResult& res, int exit_code) {
  nlohmann::ordered_json j;
  j["name"] = cfg.name;
  j["E"] = res.energy;
  j["lambda"] = res.lambda;
  j["dofs"] = res.space ? res.space->ndofs() : 0;
  j["levels"] = static_cast<int>(res.levels.size());
  j["wall_s"] = res.wall_s;
  j["converged"] = res.converged;
  j["stop_reason"] = res.stop_reason;
  j["exit_code"] = exit_code;
  if (cfg.reference_energy) {
    j["reference_energy"] = *cfg.reference_energy;
    j["error"] = res.energy - *cfg.reference_energy;
  } else {
    j["reference_energy"] = nullptr;
    j["error"] = nullptr;
  }
  j["beta"] = cfg.beta;
  j["omega"] = cfg.omega;
  j["L"] = cfg.half_width;
  j["potential"] = cfg.potential.name();
  j["h_only"] = cfg.adapt.h_only;
  out << j.dump(2) << '\n';
}

}  // namespace hpgpe
