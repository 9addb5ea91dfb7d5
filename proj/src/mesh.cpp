#include "hpgpe/mesh.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace hpgpe {

namespace {

std::uint64_t next_family() {
  static std::atomic<std::uint64_t> counter{1};
  return counter++;
}

constexpr const char* kDumpHeader = "# hpgpe-mesh v1";

}  // namespace

Mesh Mesh::build_square(double half_width, int n0, int p0) {
  if (!(half_width > 0.0)) throw std::invalid_argument("build_square: half width must be positive");
  if (n0 < 1) throw std::invalid_argument("build_square: n0 must be >= 1");
  Mesh mesh;
  mesh.half_width_ = half_width;
  mesh.family_ = next_family();
  const int n = n0 + 1;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i)
      mesh.add_vertex({-half_width + 2.0 * half_width * i / n0, -half_width + 2.0 * half_width * j / n0});
  for (int j = 0; j < n0; ++j) {
    for (int i = 0; i < n0; ++i) {
      const int a = i + j * n, b = a + 1, c = b + n, d = a + n;
      if ((i + j) % 2 == 0) {
        mesh.activate(mesh.add_element({a, b, c}, p0, -1, Flag::regular));
        mesh.activate(mesh.add_element({a, c, d}, p0, -1, Flag::regular));
      } else {
        mesh.activate(mesh.add_element({a, b, d}, p0, -1, Flag::regular));
        mesh.activate(mesh.add_element({b, c, d}, p0, -1, Flag::regular));
      }
    }
  }
  return mesh;
}

Mesh Mesh::from_tables(double half_width, std::vector<Point> vertices,
                       const std::vector<std::array<int, 3>>& triangles,
                       const std::vector<int>& degrees) {
  Mesh mesh;
  mesh.half_width_ = half_width;
  mesh.family_ = next_family();
  mesh.vertices_ = std::move(vertices);
  for (std::size_t t = 0; t < triangles.size(); ++t) {
    const int p = t < degrees.size() ? degrees[t] : 1;
    const int id = mesh.add_element(triangles[t], p, -1, Flag::regular);
    if (mesh.signed_area(id) <= 0.0)
      throw std::invalid_argument("from_tables: triangle " + std::to_string(t) + " is not counter-clockwise");
    mesh.activate(id);
  }
  return mesh;
}

std::vector<int> Mesh::active_elements() const {
  std::vector<int> out;
  out.reserve(num_active_);
  for (std::size_t i = 0; i < elements_.size(); ++i)
    if (elements_[i].active) out.push_back(static_cast<int>(i));
  return out;
}

bool Mesh::is_boundary_vertex(int v) const {
  const double tol = 1e-12 * half_width_;
  const Point& p = vertices_[v];
  return std::abs(std::abs(p.x) - half_width_) <= tol || std::abs(std::abs(p.y) - half_width_) <= tol;
}

bool Mesh::is_boundary_segment(int a, int b) const {
  const double tol = 1e-12 * half_width_;
  const Point& p = vertices_[a];
  const Point& q = vertices_[b];
  for (double s : {-half_width_, half_width_}) {
    if (std::abs(p.x - s) <= tol && std::abs(q.x - s) <= tol) return true;
    if (std::abs(p.y - s) <= tol && std::abs(q.y - s) <= tol) return true;
  }
  return false;
}

double Mesh::signed_area(int id) const {
  const auto& v = elements_[id].v;
  const Point& a = vertices_[v[0]];
  const Point& b = vertices_[v[1]];
  const Point& c = vertices_[v[2]];
  return 0.5 * ((b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y));
}

double Mesh::diameter(int id) const {
  const auto& v = elements_[id].v;
  double h = 0.0;
  for (int e = 0; e < 3; ++e) {
    const Point& a = vertices_[v[e]];
    const Point& b = vertices_[v[(e + 1) % 3]];
    h = std::max(h, std::hypot(b.x - a.x, b.y - a.y));
  }
  return h;
}

int Mesh::neighbor_across(int id, int e) const {
  const auto& v = elements_[id].v;
  auto it = edge_users_.find(edge_key(v[e], v[(e + 1) % 3]));
  if (it == edge_users_.end()) return -1;
  for (int u : it->second)
    if (u >= 0 && u != id) return u;
  return -1;
}

std::vector<int> Mesh::face_neighbors(int id) const {
  std::vector<int> out;
  for (int e = 0; e < 3; ++e) {
    const int n = neighbor_across(id, e);
    if (n >= 0) out.push_back(n);
  }
  return out;
}

int Mesh::add_vertex(Point p) {
  vertices_.push_back(p);
  return static_cast<int>(vertices_.size()) - 1;
}

int Mesh::find_midpoint(int a, int b) const {
  auto it = midpoints_.find(edge_key(a, b));
  return it == midpoints_.end() ? -1 : it->second;
}

int Mesh::midpoint(int a, int b) {
  const auto key = edge_key(a, b);
  auto it = midpoints_.find(key);
  if (it != midpoints_.end()) return it->second;
  const Point& p = vertices_[a];
  const Point& q = vertices_[b];
  const int m = add_vertex({0.5 * (p.x + q.x), 0.5 * (p.y + q.y)});
  midpoints_.emplace(key, m);
  return m;
}

bool Mesh::segment_used(int a, int b) const {
  auto it = edge_users_.find(edge_key(a, b));
  return it != edge_users_.end() && (it->second[0] >= 0 || it->second[1] >= 0);
}

// True if any part of (a, b) is used at a finer level, however deep.
bool Mesh::edge_hanging(int a, int b) const {
  const int m = find_midpoint(a, b);
  if (m < 0) return false;
  return segment_used(a, m) || segment_used(m, b) || edge_hanging(a, m) || edge_hanging(m, b);
}

bool Mesh::edge_deep_hanging(int a, int b) const {
  const int m = find_midpoint(a, b);
  return m >= 0 && (edge_hanging(a, m) || edge_hanging(m, b));
}

int Mesh::hanging_node_count(int id) const {
  const auto& v = elements_[id].v;
  int count = 0;
  for (int e = 0; e < 3; ++e)
    if (edge_hanging(v[e], v[(e + 1) % 3])) ++count;
  return count;
}

bool Mesh::is_conforming() const {
  for (std::size_t i = 0; i < elements_.size(); ++i)
    if (elements_[i].active && hanging_node_count(static_cast<int>(i)) > 0) return false;
  for (const auto& [key, users] : edge_users_) {
    if (users[0] < 0 && users[1] < 0) continue;
    const bool single = users[0] < 0 || users[1] < 0;
    const int a = static_cast<int>(key >> 32);
    const int b = static_cast<int>(key & 0xffffffffu);
    if (single && !is_boundary_segment(a, b)) return false;
  }
  return true;
}

int Mesh::add_element(std::array<int, 3> v, int degree, int parent, Flag flag) {
  Element e;
  e.v = v;
  e.degree = degree;
  e.parent = parent;
  e.flag = flag;
  elements_.push_back(e);
  return static_cast<int>(elements_.size()) - 1;
}

void Mesh::activate(int id) {
  Element& el = elements_[id];
  if (el.active) return;
  el.active = true;
  ++num_active_;
  for (int e = 0; e < 3; ++e) {
    auto& users = edge_users_.try_emplace(edge_key(el.v[e], el.v[(e + 1) % 3]), std::array<int, 2>{-1, -1})
                      .first->second;
    if (users[0] < 0)
      users[0] = id;
    else if (users[1] < 0)
      users[1] = id;
    else
      throw std::logic_error("mesh: edge shared by more than two active elements");
  }
}

void Mesh::deactivate(int id) {
  Element& el = elements_[id];
  if (!el.active) return;
  el.active = false;
  --num_active_;
  for (int e = 0; e < 3; ++e) {
    auto it = edge_users_.find(edge_key(el.v[e], el.v[(e + 1) % 3]));
    if (it == edge_users_.end()) continue;
    for (int& u : it->second)
      if (u == id) u = -1;
    if (it->second[0] < 0 && it->second[1] < 0) edge_users_.erase(it);
  }
}

std::vector<int> Mesh::split_red(int id) {
  const auto v = elements_[id].v;
  const int p = elements_[id].degree;
  const int m01 = midpoint(v[0], v[1]);
  const int m12 = midpoint(v[1], v[2]);
  const int m20 = midpoint(v[2], v[0]);
  deactivate(id);
  const std::array<std::array<int, 3>, 4> kids{{{v[0], m01, m20}, {m01, v[1], m12}, {m20, m12, v[2]}, {m01, m12, m20}}};
  std::vector<int> out;
  for (int c = 0; c < 4; ++c) {
    const int child = add_element(kids[c], p, id, Flag::regular);
    activate(child);
    elements_[id].children[c] = child;
    out.push_back(child);
  }
  elements_[id].n_children = 4;
  return out;
}

void Mesh::split_green(int id, int e) {
  const auto v = elements_[id].v;
  const int p = elements_[id].degree;
  const int a = v[e], b = v[(e + 1) % 3], c = v[(e + 2) % 3];
  const int m = find_midpoint(a, b);
  deactivate(id);
  const int g0 = add_element({a, m, c}, p, id, Flag::green);
  const int g1 = add_element({m, b, c}, p, id, Flag::green);
  activate(g0);
  activate(g1);
  Element& parent = elements_[id];
  parent.children = {g0, g1, -1, -1};
  parent.n_children = 2;
}

void Mesh::revert_green(int parent) {
  Element& P = elements_[parent];
  int p = P.degree;
  for (int c = 0; c < P.n_children; ++c) {
    const int kid = P.children[c];
    p = std::max(p, elements_[kid].degree);
    deactivate(kid);
  }
  P.children = {-1, -1, -1, -1};
  P.n_children = 0;
  P.degree = p;
  activate(parent);
}

std::vector<int> Mesh::red_refine(int id) {
  if (id < 0 || static_cast<std::size_t>(id) >= elements_.size() || !elements_[id].active)
    throw std::invalid_argument("red_refine: element " + std::to_string(id) + " is not active");
  if (elements_[id].flag == Flag::green) {
    const int parent = elements_[id].parent;
    revert_green(parent);
    return split_red(parent);
  }
  return split_red(id);
}

void Mesh::close() {
  bool changed = true;
  while (changed) {
    changed = false;
    for (int id : active_elements()) {
      if (!elements_[id].active) continue;
      const Element& el = elements_[id];
      if (el.flag == Flag::green) {
        if (hanging_node_count(id) > 0) {
          revert_green(el.parent);
          changed = true;
        }
        continue;
      }
      int hanging = 0;
      bool deep = false;
      for (int e = 0; e < 3; ++e) {
        const int a = el.v[e], b = el.v[(e + 1) % 3];
        if (edge_hanging(a, b)) {
          ++hanging;
          deep = deep || edge_deep_hanging(a, b);
        }
      }
      if (hanging >= 2 || deep) {
        split_red(id);
        changed = true;
      }
    }
  }
  for (int id : active_elements()) {
    const Element& el = elements_[id];
    if (el.flag == Flag::green) continue;
    for (int e = 0; e < 3; ++e) {
      if (edge_hanging(el.v[e], el.v[(e + 1) % 3])) {
        split_green(id, e);
        break;
      }
    }
  }
}

void Mesh::conformity_closure(std::span<const int> marked) {
  for (int id : marked) {
    if (id < 0 || static_cast<std::size_t>(id) >= elements_.size() || !elements_[id].active) continue;
    red_refine(id);
  }
  close();
}

void Mesh::set_degree(int id, int p) {
  if (p < 1) throw std::invalid_argument("set_degree: degree must be >= 1");
  elements_[id].degree = p;
}

int Mesh::smooth_degrees(int p_max) {
  int raises = 0;
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& [key, users] : edge_users_) {
      if (users[0] < 0 || users[1] < 0) continue;
      Element& a = elements_[users[0]];
      Element& b = elements_[users[1]];
      Element& lo = a.degree < b.degree ? a : b;
      const Element& hi = a.degree < b.degree ? b : a;
      if (hi.degree - lo.degree >= 2) {
        const int target = std::min(hi.degree - 1, p_max);
        if (target > lo.degree) {
          lo.degree = target;
          ++raises;
          changed = true;
        }
      }
    }
  }
  return raises;
}

int Mesh::max_degree_jump() const {
  int jump = 0;
  for (const auto& [key, users] : edge_users_) {
    if (users[0] < 0 || users[1] < 0) continue;
    jump = std::max(jump, std::abs(elements_[users[0]].degree - elements_[users[1]].degree));
  }
  return jump;
}

void Mesh::write_dump(std::ostream& out) const {
  const auto active = active_elements();
  std::vector<char> used(vertices_.size(), 0);
  for (int id : active)
    for (int v : elements_[id].v) used[v] = 1;
  out << kDumpHeader << '\n';
  out << "half_width " << half_width_ << '\n';
  out.precision(17);
  out << "vertices " << std::count(used.begin(), used.end(), 1) << '\n';
  for (std::size_t v = 0; v < vertices_.size(); ++v)
    if (used[v]) out << v << ' ' << vertices_[v].x << ' ' << vertices_[v].y << '\n';
  out << "triangles " << active.size() << '\n';
  for (int id : active) {
    const Element& el = elements_[id];
    out << id << ' ' << el.v[0] << ' ' << el.v[1] << ' ' << el.v[2] << ' ' << el.degree << ' '
        << (el.flag == Flag::green ? "green" : "regular") << '\n';
  }
}

Mesh Mesh::read_dump(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kDumpHeader)
    throw std::runtime_error("mesh dump: missing or unsupported header");
  std::string word;
  double half_width = 0.0;
  std::size_t nv = 0, nt = 0;
  in >> word >> half_width;
  if (word != "half_width") throw std::runtime_error("mesh dump: expected half_width");
  in >> word >> nv;
  if (word != "vertices") throw std::runtime_error("mesh dump: expected vertices");
  std::vector<std::pair<long, Point>> raw(nv);
  long max_id = -1;
  for (auto& [id, p] : raw) {
    in >> id >> p.x >> p.y;
    max_id = std::max(max_id, id);
  }
  in >> word >> nt;
  if (word != "triangles") throw std::runtime_error("mesh dump: expected triangles");
  std::vector<Point> vertices(static_cast<std::size_t>(max_id + 1));
  for (const auto& [id, p] : raw) vertices[id] = p;
  std::vector<std::array<int, 3>> tris(nt);
  std::vector<int> degrees(nt);
  for (std::size_t t = 0; t < nt; ++t) {
    long id;
    std::string flag;
    in >> id >> tris[t][0] >> tris[t][1] >> tris[t][2] >> degrees[t] >> flag;
  }
  if (!in) throw std::runtime_error("mesh dump: truncated file");
  return from_tables(half_width, std::move(vertices), tris, degrees);
}

}  // namespace hpgpe
