#include <cmath>
#include <random>
#include <set>
#include <sstream>
#include <vector>

#include "doctest.h"
#include "hpgpe/mesh.hpp"
#include "hpgpe/patch.hpp"
#include "mesh_audit.hpp"

using namespace hpgpe;

namespace {

int count_edges(const Mesh& m, bool boundary_only) {
  std::set<std::pair<int, int>> edges;
  for (int id : m.active_elements()) {
    const auto& v = m.element(id).v;
    for (int e = 0; e < 3; ++e) {
      int a = v[e], b = v[(e + 1) % 3];
      if (a > b) std::swap(a, b);
      if (!boundary_only || m.is_boundary_segment(a, b)) edges.insert({a, b});
    }
  }
  return static_cast<int>(edges.size());
}

// An element with the largest number of face neighbours.
int interior_element(const Mesh& m) {
  int best = -1;
  std::size_t most = 0;
  for (int id : m.active_elements())
    if (m.face_neighbors(id).size() > most) {
      most = m.face_neighbors(id).size();
      best = id;
    }
  return best;
}

Mesh reference_triangle() {
  return Mesh::from_tables(1.0, {{0, 0}, {1, 0}, {0, 1}}, {{0, 1, 2}}, {1});
}

}  // namespace

TEST_CASE("build_square counts") {
  const Mesh m = Mesh::build_square(6.0, 2);
  CHECK(m.num_vertices() == 9);
  CHECK(m.num_active() == 8);
  CHECK(count_edges(m, false) == 16);
  CHECK(count_edges(m, true) == 8);
  CHECK(audit::conforming(m));
  CHECK(audit::total_area(m) == doctest::Approx(144.0));
}

TEST_CASE("build_square on (-1,1)^2 with one square") {
  const Mesh m = Mesh::build_square(1.0, 1);
  REQUIRE(m.num_active() == 2);
  for (int id : m.active_elements()) CHECK(m.signed_area(id) == doctest::Approx(2.0));
}

TEST_CASE("build_square diameters") {
  const Mesh m = Mesh::build_square(6.0, 64);
  for (int id : m.active_elements()) CHECK(m.diameter(id) == doctest::Approx(6.0 * std::sqrt(2.0) / 32.0));
}

TEST_CASE("red refinement quarters area and halves diameter") {
  Mesh m = reference_triangle();
  const double area = m.signed_area(0), h = m.diameter(0);
  const auto kids = m.red_refine(0);
  REQUIRE(kids.size() == 4);
  for (int k : kids) {
    CHECK(m.signed_area(k) == doctest::Approx(area / 4));
    CHECK(m.diameter(k) == doctest::Approx(h / 2));
    CHECK(m.element(k).parent == 0);
  }
  CHECK(m.num_active() == 4);
  CHECK(m.is_conforming() == false);  // the hypotenuse is not on the square's boundary
}

TEST_CASE("refining a green child refines its parent instead") {
  // three triangles in a fan; refining the middle one greens the others
  Mesh m = Mesh::from_tables(1.0, {{-1, -1}, {1, -1}, {1, 1}, {-1, 1}, {0, 0}},
                             {{0, 1, 4}, {1, 2, 4}, {2, 3, 4}, {3, 0, 4}}, {1, 1, 1, 1});
  const int marked[] = {1};
  m.conformity_closure(marked);
  CHECK(audit::conforming(m));
  int greens = 0;
  int green = -1;
  for (int id : m.active_elements())
    if (m.element(id).flag == Mesh::Flag::green) {
      ++greens;
      green = id;
    }
  CHECK(greens == 4);
  const int parent = m.element(green).parent;
  const int refine_green[] = {green};
  m.conformity_closure(refine_green);
  CHECK(audit::conforming(m));
  CHECK(m.element(parent).n_children == 4);
  for (int k : m.children(parent)) CHECK(m.element(k).flag == Mesh::Flag::regular);
  CHECK(audit::total_area(m) == doctest::Approx(4.0));
}

TEST_CASE("closure after marking one interior element") {
  Mesh m = Mesh::build_square(6.0, 2);
  const int k = interior_element(m);
  REQUIRE(k >= 0);
  const int marked[] = {k};
  m.conformity_closure(marked);
  CHECK(audit::conforming(m));
  CHECK(m.element(k).n_children == 4);
  int greens = 0;
  for (int id : m.active_elements()) greens += m.element(id).flag == Mesh::Flag::green;
  const int nb = static_cast<int>(Mesh::build_square(6.0, 2).face_neighbors(k).size());
  CHECK(greens == 2 * nb);
  CHECK(m.num_active() == static_cast<std::size_t>(8 - 1 - nb + 4 + 2 * nb));
}

TEST_CASE("marking every element gives a uniform refinement without greens") {
  Mesh m = Mesh::build_square(6.0, 2);
  const auto all = m.active_elements();
  m.conformity_closure(all);
  CHECK(m.num_active() == 32);
  for (int id : m.active_elements()) CHECK(m.element(id).flag == Mesh::Flag::regular);
  CHECK(audit::conforming(m));
}

TEST_CASE("two adjacent marked elements share their midpoint without a green") {
  Mesh m = Mesh::build_square(6.0, 4);
  const int a = interior_element(m);
  const int b = m.face_neighbors(a)[0];
  const int marked[] = {a, b};
  m.conformity_closure(marked);
  CHECK(audit::conforming(m));
  for (int id : m.active_elements()) {
    if (m.element(id).flag != Mesh::Flag::green) continue;
    const int parent = m.element(id).parent;
    CHECK(parent != a);
    CHECK(parent != b);
  }
}

TEST_CASE("randomized marking keeps the mesh conforming and degrees smooth") {
  std::mt19937 rng(11);
  Mesh m = Mesh::build_square(6.0, 4);
  for (int round = 0; round < 12; ++round) {
    auto active = m.active_elements();
    std::vector<int> marked;
    std::uniform_int_distribution<int> pick(0, static_cast<int>(active.size()) - 1);
    for (int i = 0; i < 4; ++i) marked.push_back(active[pick(rng)]);
    std::uniform_int_distribution<int> deg(1, 6);
    for (int id : m.active_elements())
      if (rng() % 7 == 0) m.set_degree(id, deg(rng));
    m.conformity_closure(marked);
    m.smooth_degrees(10);
    REQUIRE(audit::conforming(m));
    CHECK(m.is_conforming());
    CHECK(m.max_degree_jump() <= 1);
    CHECK(audit::total_area(m) == doctest::Approx(144.0));
    for (int id : m.active_elements()) {
      const int parent = m.element(id).parent;
      if (parent >= 0) CHECK(!m.element(parent).active);
    }
  }
}

TEST_CASE("repeated marking near a point keeps the mesh conforming") {
  // both halves of an edge can be split again before the coarse side is
  // touched; closure has to see through several levels
  std::mt19937 rng(5);
  for (const Point c : {Point{0.1, -4.1}, Point{-2.3, 0.7}, Point{0.0, 0.0}}) {
    Mesh m = Mesh::build_square(6.0, 8);
    for (int round = 0; round < 8; ++round) {
      std::vector<int> marked;
      for (int id : m.active_elements()) {
        const auto& v = m.element(id).v;
        const double x = (m.vertex(v[0]).x + m.vertex(v[1]).x + m.vertex(v[2]).x) / 3.0 - c.x;
        const double y = (m.vertex(v[0]).y + m.vertex(v[1]).y + m.vertex(v[2]).y) / 3.0 - c.y;
        if (std::hypot(x, y) < 1.5 && rng() % 2 == 0) marked.push_back(id);
      }
      m.conformity_closure(marked);
      REQUIRE(audit::conforming(m));
      CHECK(m.is_conforming());
      CHECK(audit::total_area(m) == doctest::Approx(144.0));
    }
  }
}

TEST_CASE("smooth_degrees examples") {
  SUBCASE("pair (1,3) -> (2,3)") {
    Mesh m = Mesh::from_tables(1.0, {{-1, -1}, {1, -1}, {1, 1}, {-1, 1}}, {{0, 1, 2}, {0, 2, 3}}, {1, 3});
    m.smooth_degrees(10);
    CHECK(m.element(0).degree == 2);
    CHECK(m.element(1).degree == 3);
  }
  SUBCASE("equal degrees are a fixed point") {
    Mesh m = Mesh::build_square(1.0, 3, 4);
    CHECK(m.smooth_degrees(10) == 0);
    for (int id : m.active_elements()) CHECK(m.element(id).degree == 4);
  }
  SUBCASE("chain 1-1-4 -> 2-3-4") {
    Mesh m = Mesh::from_tables(1.0, {{-1, -1}, {1, -1}, {1, 1}, {-1, 1}, {0, 1}},
                               {{0, 1, 2}, {0, 2, 4}, {0, 4, 3}}, {1, 1, 4});
    m.smooth_degrees(10);
    CHECK(m.element(0).degree == 2);
    CHECK(m.element(1).degree == 3);
    CHECK(m.element(2).degree == 4);
  }
}

TEST_CASE("patches") {
  const Mesh m = Mesh::build_square(6.0, 4);
  const int k = interior_element(m);
  REQUIRE(m.face_neighbors(k).size() == 3);
  const auto np = neighbor_patch(m, k);
  CHECK(np.cells.size() == 4);
  CHECK(np.elements.front() == k);

  const Mesh coarse = Mesh::build_square(1.0, 1);
  CHECK(neighbor_patch(coarse, 0).cells.size() == 2);

  const auto rp = refined_patch(m, k);
  CHECK(rp.n_kappa == 4);
  CHECK(rp.cells.size() == 10);
  double area = 0.0;
  for (const auto& c : rp.cells) {
    const double a = 0.5 * ((c.xy[1].x - c.xy[0].x) * (c.xy[2].y - c.xy[0].y) -
                            (c.xy[2].x - c.xy[0].x) * (c.xy[1].y - c.xy[0].y));
    CHECK(a > 0.0);
    area += a;
  }
  double patch_area = 0.0;
  for (int id : np.elements) patch_area += m.signed_area(id);
  CHECK(area == doctest::Approx(patch_area));
}

TEST_CASE("mesh dump round trip") {
  Mesh m = Mesh::build_square(6.0, 2, 2);
  const int marked[] = {interior_element(m)};
  m.conformity_closure(marked);
  std::stringstream ss;
  m.write_dump(ss);
  const Mesh r = Mesh::read_dump(ss);
  CHECK(r.num_active() == m.num_active());
  CHECK(audit::conforming(r));
  CHECK(audit::total_area(r) == doctest::Approx(144.0));
  std::stringstream bad("# not a mesh\n");
  CHECK_THROWS(Mesh::read_dump(bad));
}
