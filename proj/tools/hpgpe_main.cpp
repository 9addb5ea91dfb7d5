// Command-line driver: hp-adaptive ground states of the rotating
// Gross-Pitaevskii energy.
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "hpgpe/adapt.hpp"
#include "hpgpe/config.hpp"
#include "hpgpe/output.hpp"
#include "hpgpe/presets.hpp"

namespace fs = std::filesystem;
using namespace hpgpe;

namespace {

constexpr int kConfigError = 2;
constexpr int kNotConverged = 3;

template <class F>
void write_file(const fs::path& path, F&& body) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  body(out);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hp-adaptive finite element ground states of the rotating Gross-Pitaevskii energy"};
  std::string preset_name, config_path, out_dir = "hpgpe_out";
  std::optional<double> theta, gamma, tol;
  std::optional<long> max_dofs;
  std::optional<int> p_max;
  bool h_only = false, dump_levels = false, quiet = false, list = false;
  int sample_grid = 101, threads = 0;
  unsigned seed = 0;

  auto* src = app.add_option_group("problem");
  src->add_option("--preset", preset_name, "built-in benchmark");
  src->add_option("--config", config_path, "key = value configuration file");
  src->add_flag("--list-presets", list, "print the preset names and exit");
  src->require_option(1);
  app.add_option("--theta", theta, "marking fraction in (0,1) [1/3]");
  app.add_option("--gamma", gamma, "flow stopping ratio inc <= gamma diff [1e-3]");
  app.add_option("--tol", tol, "adaptive stopping tolerance, relative to E");
  app.add_option("--max-dofs", max_dofs, "degree-of-freedom budget");
  app.add_option("--p-max", p_max, "largest polynomial degree");
  app.add_flag("--h-only", h_only, "disable p-enrichment");
  app.add_option("--sample-grid", sample_grid, "points per side of the solution sample grid (0: skip)")
      ->check(CLI::Range(0, 5000));
  app.add_flag("--dump-levels", dump_levels, "write the mesh and degrees of every level");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--seed", seed, "accepted for reproducibility records; the solver is deterministic");
  app.add_flag("--quiet", quiet, "only print the final summary line");
  app.add_option("--threads", threads, "worker threads for the indicator loop (0: all)")->check(CLI::NonNegativeNumber);
  CLI11_PARSE(app, argc, argv);

  if (list) {
    for (const auto& n : preset_names()) std::cout << n << '\n';
    return 0;
  }
#ifdef _OPENMP
  if (threads > 0) omp_set_num_threads(threads);
#endif

  ProblemConfig cfg;
  try {
    cfg = config_path.empty() ? preset(preset_name) : load_config(config_path);
    if (theta) cfg.adapt.theta = *theta;
    if (gamma) cfg.flow.gamma = *gamma;
    if (tol) cfg.adapt.tol = *tol;
    if (max_dofs) cfg.adapt.max_dofs = *max_dofs;
    if (p_max) cfg.adapt.p_max = *p_max;
    if (h_only) cfg.adapt.h_only = true;
    cfg.validate();
    const V1Report v1 = check_v1(cfg);
    if (v1.delta < 0.0 || (cfg.omega > 0.0 && v1.delta <= 0.0)) {
      std::fprintf(stderr,
                   "error: min(V - omega^2 |x|^2 / 2) = %.6g over the domain; the energy is not coercive "
                   "(omega = %g, L = %g)\n",
                   v1.delta, cfg.omega, cfg.half_width);
      return kConfigError;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kConfigError;
  }

  try {
    fs::create_directories(out_dir);
    const fs::path out(out_dir);
    write_file(out / "config.txt", [&](std::ostream& f) { write_config(f, cfg); });

    std::vector<LevelFlowRecord> flow;
    AdaptiveCallbacks cb;
    cb.on_flow = [&](int level, const FlowRecord& r) { flow.push_back({level, r}); };
    cb.on_level = [&](const LevelRecord& r) {
      if (quiet) return;
      std::printf("level %3d  dofs %7d  cells %6d  p_max %2d  E %s", r.level, r.dofs, r.cells, r.max_degree,
                  format_energy(r.energy).c_str());
      if (cfg.reference_energy) std::printf("  err %10.3e", r.energy - *cfg.reference_energy);
      std::printf("  flow %3d  marked h/p %d/%d  %.1fs\n", r.flow_iterations, r.marked_h, r.marked_p, r.wall_s);
      std::fflush(stdout);
    };
    if (dump_levels)
      cb.on_space = [&](int level, const HpSpace& space, const StateVector&) {
        write_file(out / ("mesh_level_" + std::to_string(level) + ".txt"),
                   [&](std::ostream& f) { space.mesh().write_dump(f); });
      };

    const AdaptiveResult res = solve_adaptive(cfg, cb);
    const int code = res.converged ? 0 : kNotConverged;

    write_file(out / "convergence.csv",
               [&](std::ostream& f) { write_convergence_csv(f, res.levels, cfg.reference_energy); });
    write_file(out / "flow.csv", [&](std::ostream& f) { write_flow_csv(f, flow); });
    write_file(out / "mesh_final.txt", [&](std::ostream& f) { res.space->mesh().write_dump(f); });
    if (sample_grid > 1)
      write_file(out / "solution_sample.csv",
                 [&](std::ostream& f) { write_sample_csv(f, *res.space, res.u, sample_grid); });
    write_file(out / "summary.json", [&](std::ostream& f) { write_summary_json(f, cfg, res, code); });

    std::printf("%s: E = %s  lambda = %s  dofs = %d  levels = %zu  stop = %s  %.1fs\n", cfg.name.c_str(),
                format_energy(res.energy).c_str(), format_energy(res.lambda).c_str(), res.space->ndofs(),
                res.levels.size(), res.stop_reason.c_str(), res.wall_s);
    if (code != 0) std::fprintf(stderr, "warning: tolerance not reached (%s); best state written\n", res.stop_reason.c_str());
    return code;
  } catch (const std::domain_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kConfigError;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
