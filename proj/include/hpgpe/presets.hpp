#pragma once

#include <string>
#include <vector>

#include "hpgpe/problem.hpp"

namespace hpgpe {

/// Built-in benchmark configurations. Throws std::invalid_argument for an
/// unknown name.
ProblemConfig preset(const std::string& name);
std::vector<std::string> preset_names();

}  // namespace hpgpe
