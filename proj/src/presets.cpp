#include "hpgpe/presets.hpp"

#include <stdexcept>

namespace hpgpe {

namespace {

ProblemConfig base(const char* name, double beta, double omega, double L, double tol, double eref) {
  ProblemConfig cfg;
  cfg.name = name;
  cfg.potential.kind = Potential::Kind::harmonic;
  cfg.beta = beta;
  cfg.omega = omega;
  cfg.half_width = L;
  cfg.adapt.tol = tol;
  cfg.n0 = 8;
  cfg.p0 = 2;
  cfg.reference_energy = eref;
  cfg.initial = omega > 0.0 ? ProblemConfig::InitialGuess::vortex : ProblemConfig::InitialGuess::constant;
  return cfg;
}

}  // namespace

std::vector<std::string> preset_names() {
  return {"linear", "harmonic", "lattice", "nonsymmetric", "omega05", "omega075", "omega08", "omega09"};
}

ProblemConfig preset(const std::string& name) {
  // reference energies: published ground-state values for each benchmark;
  // "linear" is the exact 2D oscillator ground state (E = 1, lambda = 2)
  if (name == "linear") return base("linear", 0.0, 0.0, 6.0, 1e-10, 1.0);
  if (name == "harmonic") return base("harmonic", 1000.0, 0.0, 6.0, 1e-10, 11.98605114667);
  if (name == "lattice") {
    auto cfg = base("lattice", 1000.0, 0.0, 6.0, 1e-8, 30.3874145736);
    cfg.potential.kind = Potential::Kind::lattice;
    cfg.n0 = 16;  // twelve potential periods across the domain
    return cfg;
  }
  if (name == "nonsymmetric") {
    auto cfg = base("nonsymmetric", 200.0, 0.0, 8.0, 1e-10, 5.850587113515);
    cfg.potential.kind = Potential::Kind::nonsymmetric;
    return cfg;
  }
  if (name == "omega05") return base("omega05", 10.0, 0.5, 6.0, 1e-10, 1.5923190246813326);
  if (name == "omega075") return base("omega075", 100.0, 0.75, 6.0, 1e-8, 3.3810277420947901);
  if (name == "omega08") {
    auto cfg = base("omega08", 500.0, 0.8, 10.0, 1e-6, 6.0997439947822603);
    cfg.n0 = 10;
    return cfg;
  }
  if (name == "omega09") {
    auto cfg = base("omega09", 1000.0, 0.9, 12.0, 1e-6, 6.3609757543503642);
    cfg.n0 = 12;
    return cfg;
  }
  throw std::invalid_argument("unknown preset '" + name + "'");
}

}  // namespace hpgpe
