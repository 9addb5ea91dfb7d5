#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <unordered_map>
#include <vector>

namespace hpgpe {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

/// Conforming triangulation of the square (-L, L)^2 with red/green refinement.
///
/// Elements are never deleted: refinement deactivates a parent and appends
/// its children, so element ids are stable and the genealogy is a forest.
/// Green (bisection) elements are temporary; any refinement that touches a
/// green element first reverts the pair to its parent.
class Mesh {
 public:
  enum class Flag : std::uint8_t { regular, green };

  struct Element {
    std::array<int, 3> v{};  // counter-clockwise
    int degree = 1;
    int parent = -1;
    std::array<int, 4> children{-1, -1, -1, -1};
    int n_children = 0;
    Flag flag = Flag::regular;
    bool active = false;
  };

  Mesh() = default;

  /// n0 x n0 squares, each split into two triangles along alternating
  /// diagonals. All elements get degree p0.
  static Mesh build_square(double half_width, int n0, int p0 = 1);

  /// Builds a mesh from raw tables (no genealogy). Triangles must be CCW.
  static Mesh from_tables(double half_width, std::vector<Point> vertices,
                          const std::vector<std::array<int, 3>>& triangles,
                          const std::vector<int>& degrees);

  double half_width() const { return half_width_; }
  std::uint64_t family() const { return family_; }

  const std::vector<Point>& vertices() const { return vertices_; }
  const Point& vertex(int id) const { return vertices_[id]; }
  std::size_t num_vertices() const { return vertices_.size(); }

  const Element& element(int id) const { return elements_[id]; }
  std::size_t num_elements_total() const { return elements_.size(); }
  std::size_t num_active() const { return num_active_; }

  /// Ids of active elements in increasing order.
  std::vector<int> active_elements() const;

  bool is_boundary_vertex(int v) const;
  /// True if segment (a, b) lies on the domain boundary.
  bool is_boundary_segment(int a, int b) const;

  double signed_area(int id) const;
  double diameter(int id) const;

  /// Active elements sharing a full edge with `id` (at most three).
  std::vector<int> face_neighbors(int id) const;
  /// Active element across local edge e = (v[e], v[(e+1)%3]) of `id`, or -1.
  int neighbor_across(int id, int e) const;

  /// Number of edges of active element `id` carrying a hanging node.
  int hanging_node_count(int id) const;
  bool is_conforming() const;

  /// Red-refines an active element into four similar children. A green
  /// element is reverted first and its parent refined instead. Returns the
  /// ids of the new children. Hanging nodes may remain on neighbours.
  std::vector<int> red_refine(int id);

  /// Removes hanging nodes: greens touched by hanging nodes are reverted,
  /// elements with two or more hanging nodes are red-refined until every
  /// element has at most one, and the rest are closed by green bisection.
  void close();

  /// Red-refines `marked` and closes the mesh.
  void conformity_closure(std::span<const int> marked);

  void set_degree(int id, int p);

  /// Raises the lower degree of any edge-adjacent pair differing by two or
  /// more until stable. Degrees never decrease. Returns number of raises.
  int smooth_degrees(int p_max);

  /// Maximum degree jump across any shared edge.
  int max_degree_jump() const;

  /// Children created by the last refinement call of `id`, if any.
  std::span<const int> children(int id) const {
    return {elements_[id].children.data(), static_cast<std::size_t>(elements_[id].n_children)};
  }

  /// Writes the versioned text dump (vertices and active triangles).
  void write_dump(std::ostream& out) const;
  /// Reads a dump written by write_dump.
  static Mesh read_dump(std::istream& in);

 private:
  static std::uint64_t edge_key(int a, int b) {
    if (a > b) std::swap(a, b);
    return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint32_t>(b);
  }

  int add_vertex(Point p);
  int midpoint(int a, int b);
  int find_midpoint(int a, int b) const;
  bool segment_used(int a, int b) const;
  bool edge_hanging(int a, int b) const;
  bool edge_deep_hanging(int a, int b) const;

  int add_element(std::array<int, 3> v, int degree, int parent, Flag flag);
  void activate(int id);
  void deactivate(int id);
  std::vector<int> split_red(int id);
  void split_green(int id, int edge);
  void revert_green(int parent);

  double half_width_ = 1.0;
  std::uint64_t family_ = 0;
  std::vector<Point> vertices_;
  std::vector<Element> elements_;
  std::size_t num_active_ = 0;
  std::unordered_map<std::uint64_t, std::array<int, 2>> edge_users_;
  std::unordered_map<std::uint64_t, int> midpoints_;
};

}  // namespace hpgpe
