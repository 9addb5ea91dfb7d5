#include "hpgpe/adapt.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>

namespace hpgpe {

namespace {

using clock_type = std::chrono::steady_clock;

double seconds_since(clock_type::time_point t0) {
  return std::chrono::duration<double>(clock_type::now() - t0).count();
}

}  // namespace

RefineIndicators compute_indicators(const Forms& forms, const StateVector& u, bool h_only, int p_max,
                                    int quadrature_extra) {
  const auto t0 = clock_type::now();
  const HpSpace& space = forms.space();
  auto ctx = LocalContext::make(forms, u);
  ctx.quadrature_extra = quadrature_extra;
  const double ninf = -std::numeric_limits<double>::infinity();

  RefineIndicators ind;
  ind.items.resize(space.num_cells());
  const int n = space.num_cells();
#pragma omp parallel for schedule(dynamic, 4)
  for (int c = 0; c < n; ++c) {
    auto& it = ind.items[c];
    it.element = space.cell(c).element;
    const auto Wh = local_enrichment_basis(space, c, RefineKind::h);
    it.dofs_h = Wh.dofs;
    it.decay_h = local_gfi_step(ctx, Wh).decay;
    it.dE_h = it.decay_h / it.dofs_h;
    if (h_only || space.cell(c).degree >= p_max) {
      it.dE_p = ninf;
      it.decay_p = ninf;
    } else {
      const auto Wp = local_enrichment_basis(space, c, RefineKind::p);
      it.dofs_p = Wp.dofs;
      it.decay_p = local_gfi_step(ctx, Wp).decay;
      it.dE_p = it.decay_p / it.dofs_p;
    }
    it.kind = it.dE_p >= it.dE_h ? RefineKind::p : RefineKind::h;
    it.dE_max = std::max(it.dE_h, it.dE_p);
  }
  ind.wall_s = seconds_since(t0);
  return ind;
}

std::vector<int> mark(const RefineIndicators& ind, double theta) {
  double top = -std::numeric_limits<double>::infinity();
  for (const auto& it : ind.items) top = std::max(top, it.dE_max);
  std::vector<int> out;
  if (!(top > 0.0) || !std::isfinite(top)) return out;
  for (std::size_t k = 0; k < ind.items.size(); ++k)
    if (ind.items[k].dE_max >= theta * top) out.push_back(static_cast<int>(k));
  return out;
}

RefineCounts refine(Mesh& mesh, const RefineIndicators& ind, const std::vector<int>& marked, int p_max) {
  RefineCounts counts;
  std::vector<int> h_list;
  for (int k : marked) {
    const auto& it = ind.items[k];
    if (it.kind == RefineKind::p) {
      mesh.set_degree(it.element, std::min(mesh.element(it.element).degree + 1, p_max));
      ++counts.p;
    } else {
      h_list.push_back(it.element);
      ++counts.h;
    }
  }
  if (!h_list.empty()) mesh.conformity_closure(h_list);
  mesh.smooth_degrees(p_max);
  return counts;
}

StateVector initial_guess(const ProblemConfig& cfg, const Forms& forms) {
  const HpSpace& space = forms.space();
  StateVector u;
  if (cfg.initial == ProblemConfig::InitialGuess::vortex) {
    const double w = cfg.omega;
    u = interpolate(
        [w](double x, double y) {
          const double phi0 = std::exp(-0.5 * (x * x + y * y)) / std::sqrt(std::numbers::pi);
          return (1.0 - w) * phi0 + w * cplx(x, y) * phi0;
        },
        space);
  } else {
    // one at every interior vertex, zero on higher modes
    u = StateVector::zero(space);
    for (const auto& cell : space.cells())
      for (int a = 0; a < 3; ++a)
        if (cell.dofs[a] >= 0) u.coeffs(cell.dofs[a]) = 1.0;
  }
  forms.normalize(u);
  return u;
}

AdaptiveResult solve_adaptive(const ProblemConfig& cfg, const AdaptiveCallbacks& cb) {
  cfg.validate();
  const auto t0 = clock_type::now();
  const auto& ap = cfg.adapt;

  Mesh mesh = Mesh::build_square(cfg.half_width, cfg.n0, std::min(cfg.p0, ap.p_max));
  auto space = std::make_shared<const HpSpace>(mesh);
  auto forms = std::make_unique<Forms>(space, cfg);
  StateVector u = initial_guess(cfg, *forms);

  AdaptiveResult res;
  for (int level = 0;; ++level) {
    HpdSolver solver(cfg.flow.solver_rtol);
    std::function<void(const FlowRecord&)> on_step;
    if (cb.on_flow) on_step = [&](const FlowRecord& r) { cb.on_flow(level, r); };
    auto flow = run_flow(*forms, u, cfg.flow, solver, on_step);
    u = std::move(flow.u);

    LevelRecord rec;
    rec.level = level;
    rec.dofs = space->ndofs();
    rec.cells = space->num_cells();
    rec.max_degree = space->max_degree();
    rec.energy = flow.energy;
    rec.lambda = forms->rayleigh_lambda(u);
    rec.diff = flow.stats.energy0 - flow.energy;
    rec.flow_iterations = static_cast<int>(flow.stats.records.size());
    rec.stagnated = flow.stats.stagnated;

    res.space = space;
    res.u = u;
    res.energy = rec.energy;
    res.lambda = rec.lambda;

    auto finish = [&](std::string reason, bool converged) {
      rec.wall_s = seconds_since(t0);
      res.levels.push_back(rec);
      if (cb.on_level) cb.on_level(rec);
      if (cb.on_space) cb.on_space(level, *space, u);
      res.stop_reason = std::move(reason);
      res.converged = converged;
      res.wall_s = rec.wall_s;
      return res;
    };

    if (level > 0 && rec.diff <= ap.tol * std::abs(rec.energy)) return finish("tolerance", true);
    if (level + 1 >= ap.max_levels) return finish("max_levels", false);

    const auto ind = compute_indicators(*forms, u, ap.h_only, ap.p_max);
    const auto marked = mark(ind, ap.theta);
    if (marked.empty()) return finish("no_refinement", false);

    Mesh next = space->mesh();
    const auto counts = refine(next, ind, marked, ap.p_max);
    auto next_space = std::make_shared<const HpSpace>(std::move(next));
    if (next_space->ndofs() > ap.max_dofs) return finish("budget", false);

    rec.marked_h = counts.h;
    rec.marked_p = counts.p;
    rec.wall_s = seconds_since(t0);
    res.levels.push_back(rec);
    if (cb.on_level) cb.on_level(rec);
    if (cb.on_space) cb.on_space(level, *space, u);

    auto next_forms = std::make_unique<Forms>(next_space, cfg);
    StateVector v = transfer(u, *space, *next_space);
    next_forms->normalize(v);
    space = std::move(next_space);
    forms = std::move(next_forms);
    u = std::move(v);
  }
}

}  // namespace hpgpe
