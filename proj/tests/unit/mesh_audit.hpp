#pragma once

#include <cstdint>
#include <map>
#include <utility>

#include "hpgpe/mesh.hpp"

namespace audit {

// Independent conformity audit: every edge of an active element is used by
// exactly two active elements, or by one when it lies on the boundary.
inline bool conforming(const hpgpe::Mesh& m) {
  std::map<std::pair<int, int>, int> uses;
  for (int id : m.active_elements()) {
    const auto& v = m.element(id).v;
    if (m.signed_area(id) <= 0.0) return false;
    for (int e = 0; e < 3; ++e) {
      int a = v[e], b = v[(e + 1) % 3];
      if (a > b) std::swap(a, b);
      ++uses[{a, b}];
    }
  }
  for (const auto& [edge, n] : uses) {
    if (n > 2) return false;
    if (n == 1 && !m.is_boundary_segment(edge.first, edge.second)) return false;
  }
  return true;
}

inline double total_area(const hpgpe::Mesh& m) {
  double s = 0.0;
  for (int id : m.active_elements()) s += m.signed_area(id);
  return s;
}

}  // namespace audit
