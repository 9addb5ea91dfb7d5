#include "hpgpe/config.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <sstream>

#include "hpgpe/presets.hpp"

namespace hpgpe {

ConfigError::ConfigError(const std::string& source, int line, const std::string& what)
    : std::runtime_error(line > 0 ? source + ":" + std::to_string(line) + ": " + what : source + ": " + what),
      line_(line) {}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& v) {
  double x = 0.0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || p != v.data() + v.size()) throw std::invalid_argument("expected a number, got '" + v + "'");
  return x;
}

long to_long(const std::string& v) {
  long x = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || p != v.data() + v.size()) throw std::invalid_argument("expected an integer, got '" + v + "'");
  return x;
}

int to_int(const std::string& v) {
  const long x = to_long(v);
  if (x < -1000000000L || x > 1000000000L) throw std::invalid_argument("integer out of range: " + v);
  return static_cast<int>(x);
}

bool to_bool(const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw std::invalid_argument("expected true or false, got '" + v + "'");
}

Potential::Kind to_kind(const std::string& v) {
  if (v == "harmonic") return Potential::Kind::harmonic;
  if (v == "lattice") return Potential::Kind::lattice;
  if (v == "nonsymmetric") return Potential::Kind::nonsymmetric;
  if (v == "polynomial") return Potential::Kind::polynomial;
  throw std::invalid_argument("unknown potential '" + v + "'");
}

Potential::Term to_term(const std::string& v) {
  std::istringstream in(v);
  std::string c, px, py, extra;
  if (!(in >> c >> px >> py) || (in >> extra)) throw std::invalid_argument("term expects 'coeff px py'");
  Potential::Term t{to_double(c), to_int(px), to_int(py)};
  if (t.px < 0 || t.py < 0) throw std::invalid_argument("term exponents must be >= 0");
  return t;
}

using Setter = std::function<void(ProblemConfig&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"name", [](ProblemConfig& c, const std::string& v) { c.name = v; }},
      {"potential", [](ProblemConfig& c, const std::string& v) { c.potential.kind = to_kind(v); }},
      {"potential.offset", [](ProblemConfig& c, const std::string& v) { c.potential.offset = to_double(v); }},
      {"potential.amplitude", [](ProblemConfig& c, const std::string& v) { c.potential.amplitude = to_double(v); }},
      {"potential.wavenumber", [](ProblemConfig& c, const std::string& v) { c.potential.wavenumber = to_double(v); }},
      {"potential.height", [](ProblemConfig& c, const std::string& v) { c.potential.height = to_double(v); }},
      {"potential.shift", [](ProblemConfig& c, const std::string& v) { c.potential.shift = to_double(v); }},
      {"potential.term", [](ProblemConfig& c, const std::string& v) { c.potential.terms.push_back(to_term(v)); }},
      {"beta", [](ProblemConfig& c, const std::string& v) { c.beta = to_double(v); }},
      {"omega", [](ProblemConfig& c, const std::string& v) { c.omega = to_double(v); }},
      {"L", [](ProblemConfig& c, const std::string& v) { c.half_width = to_double(v); }},
      {"n0", [](ProblemConfig& c, const std::string& v) { c.n0 = to_int(v); }},
      {"p0", [](ProblemConfig& c, const std::string& v) { c.p0 = to_int(v); }},
      {"initial",
       [](ProblemConfig& c, const std::string& v) {
         if (v == "constant")
           c.initial = ProblemConfig::InitialGuess::constant;
         else if (v == "vortex")
           c.initial = ProblemConfig::InitialGuess::vortex;
         else
           throw std::invalid_argument("initial must be constant or vortex");
       }},
      {"reference_energy",
       [](ProblemConfig& c, const std::string& v) {
         if (v == "none")
           c.reference_energy.reset();
         else
           c.reference_energy = to_double(v);
       }},
      {"tau_min", [](ProblemConfig& c, const std::string& v) { c.flow.tau_min = to_double(v); }},
      {"tau_max", [](ProblemConfig& c, const std::string& v) { c.flow.tau_max = to_double(v); }},
      {"gamma", [](ProblemConfig& c, const std::string& v) { c.flow.gamma = to_double(v); }},
      {"max_iterations", [](ProblemConfig& c, const std::string& v) { c.flow.max_iterations = to_int(v); }},
      {"solver_rtol", [](ProblemConfig& c, const std::string& v) { c.flow.solver_rtol = to_double(v); }},
      {"theta", [](ProblemConfig& c, const std::string& v) { c.adapt.theta = to_double(v); }},
      {"tol", [](ProblemConfig& c, const std::string& v) { c.adapt.tol = to_double(v); }},
      {"max_dofs", [](ProblemConfig& c, const std::string& v) { c.adapt.max_dofs = to_long(v); }},
      {"max_levels", [](ProblemConfig& c, const std::string& v) { c.adapt.max_levels = to_int(v); }},
      {"h_only", [](ProblemConfig& c, const std::string& v) { c.adapt.h_only = to_bool(v); }},
      {"p_max", [](ProblemConfig& c, const std::string& v) { c.adapt.p_max = to_int(v); }},
  };
  return table;
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

ProblemConfig parse_config(std::istream& in, const std::string& source) {
  ProblemConfig cfg;
  std::string raw;
  int line = 0;
  bool any = false;
  bool terms_reset = false;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string text = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (text.empty()) continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos) throw ConfigError(source, line, "expected 'key = value'");
    const std::string key = trim(text.substr(0, eq));
    const std::string value = trim(text.substr(eq + 1));
    if (key.empty() || value.empty()) throw ConfigError(source, line, "expected 'key = value'");
    try {
      if (key == "preset") {
        if (any) throw std::invalid_argument("preset must be the first setting");
        cfg = preset(value);
      } else {
        const auto it = setters().find(key);
        if (it == setters().end()) throw std::invalid_argument("unknown key '" + key + "'");
        // explicit terms replace the inherited list rather than extend it
        if (key == "potential.term" && !terms_reset) {
          cfg.potential.terms.clear();
          terms_reset = true;
        }
        it->second(cfg, value);
      }
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& e) {
      throw ConfigError(source, line, e.what());
    }
    any = true;
  }
  try {
    cfg.validate();
  } catch (const std::exception& e) {
    throw ConfigError(source, 0, e.what());
  }
  return cfg;
}

ProblemConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path, 0, "cannot open file");
  return parse_config(in, path);
}

void write_config(std::ostream& out, const ProblemConfig& cfg) {
  const auto& V = cfg.potential;
  out << "name = " << cfg.name << '\n';
  out << "potential = " << V.name() << '\n';
  switch (V.kind) {
    case Potential::Kind::lattice:
      out << "potential.offset = " << fmt(V.offset) << '\n'
          << "potential.amplitude = " << fmt(V.amplitude) << '\n'
          << "potential.wavenumber = " << fmt(V.wavenumber) << '\n';
      break;
    case Potential::Kind::nonsymmetric:
      out << "potential.height = " << fmt(V.height) << '\n' << "potential.shift = " << fmt(V.shift) << '\n';
      break;
    case Potential::Kind::polynomial:
      for (const auto& t : V.terms) out << "potential.term = " << fmt(t.coeff) << ' ' << t.px << ' ' << t.py << '\n';
      break;
    case Potential::Kind::harmonic:
      break;
  }
  out << "beta = " << fmt(cfg.beta) << '\n'
      << "omega = " << fmt(cfg.omega) << '\n'
      << "L = " << fmt(cfg.half_width) << '\n'
      << "n0 = " << cfg.n0 << '\n'
      << "p0 = " << cfg.p0 << '\n'
      << "initial = " << (cfg.initial == ProblemConfig::InitialGuess::vortex ? "vortex" : "constant") << '\n'
      << "reference_energy = " << (cfg.reference_energy ? fmt(*cfg.reference_energy) : std::string("none")) << '\n'
      << "tau_min = " << fmt(cfg.flow.tau_min) << '\n'
      << "tau_max = " << fmt(cfg.flow.tau_max) << '\n'
      << "gamma = " << fmt(cfg.flow.gamma) << '\n'
      << "max_iterations = " << cfg.flow.max_iterations << '\n'
      << "solver_rtol = " << fmt(cfg.flow.solver_rtol) << '\n'
      << "theta = " << fmt(cfg.adapt.theta) << '\n'
      << "tol = " << fmt(cfg.adapt.tol) << '\n'
      << "max_dofs = " << cfg.adapt.max_dofs << '\n'
      << "max_levels = " << cfg.adapt.max_levels << '\n'
      << "h_only = " << (cfg.adapt.h_only ? "true" : "false") << '\n'
      << "p_max = " << cfg.adapt.p_max << '\n';
}

}  // namespace hpgpe
