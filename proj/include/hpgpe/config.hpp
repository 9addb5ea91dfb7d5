#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>

#include "hpgpe/problem.hpp"

namespace hpgpe {

/// Parse failure; line is 1-based, 0 when not tied to a line.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& source, int line, const std::string& what);
  int line() const { return line_; }

 private:
  int line_;
};

/// Reads `key = value` lines; `#` starts a comment. A `preset = name` line,
/// if present, must come first and seeds every other field. The result is
/// validated.
ProblemConfig parse_config(std::istream& in, const std::string& source = "<config>");
ProblemConfig load_config(const std::string& path);

/// Writes every field so that parse_config reproduces the same configuration.
void write_config(std::ostream& out, const ProblemConfig& cfg);

}  // namespace hpgpe
