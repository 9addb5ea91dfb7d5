#include "hpgpe/basis.hpp"

#include <map>
#include <mutex>
#include <stdexcept>
#include <string>
#include <utility>

namespace hpgpe::basis {

namespace {

void check_degree(int p) {
  if (p < 1 || p > kMaxTabulatedDegree)
    throw std::out_of_range("shape function degree " + std::to_string(p) + " out of range [1, " +
                            std::to_string(kMaxTabulatedDegree) + "]");
}

// Scaled Legendre polynomials P_n(x, t) = t^n P_n(x / t) with partial
// derivatives, n = 0..nmax.
struct ScaledLegendre {
  std::array<double, kMaxTabulatedDegree + 2> p{}, px{}, pt{};

  void compute(int nmax, double x, double t) {
    p[0] = 1.0;
    px[0] = pt[0] = 0.0;
    if (nmax == 0) return;
    p[1] = x;
    px[1] = 1.0;
    pt[1] = 0.0;
    for (int n = 1; n < nmax; ++n) {
      const double a = 2 * n + 1;
      p[n + 1] = (a * x * p[n] - n * t * t * p[n - 1]) / (n + 1);
      px[n + 1] = (a * (p[n] + x * px[n]) - n * t * t * px[n - 1]) / (n + 1);
      pt[n + 1] = (a * x * pt[n] - n * (2.0 * t * p[n - 1] + t * t * pt[n - 1])) / (n + 1);
    }
  }

  // Scaled integrated Legendre L_k = (P_k - t^2 P_{k-2}) / (2k - 1), k >= 2.
  void integrated(int k, double t, double& l, double& lx, double& lt) const {
    const double s = 1.0 / (2 * k - 1);
    l = (p[k] - t * t * p[k - 2]) * s;
    lx = (px[k] - t * t * px[k - 2]) * s;
    lt = (pt[k] - 2.0 * t * p[k - 2] - t * t * pt[k - 2]) * s;
  }
};

// Jacobi P^{(alpha,0)}_n(y) and derivative for n = 0..nmax.
void jacobi(int nmax, double alpha, double y, double* v, double* dv) {
  v[0] = 1.0;
  dv[0] = 0.0;
  if (nmax == 0) return;
  v[1] = (alpha + 1.0) + (alpha + 2.0) * (y - 1.0) / 2.0;
  dv[1] = (alpha + 2.0) / 2.0;
  for (int n = 2; n <= nmax; ++n) {
    const double a1 = 2.0 * n * (n + alpha) * (2.0 * n + alpha - 2.0);
    const double a2 = (2.0 * n + alpha - 1.0) * alpha * alpha;
    const double a3 = (2.0 * n + alpha - 2.0) * (2.0 * n + alpha - 1.0) * (2.0 * n + alpha);
    const double a4 = 2.0 * (n + alpha - 1.0) * (n - 1.0) * (2.0 * n + alpha);
    v[n] = ((a2 + a3 * y) * v[n - 1] - a4 * v[n - 2]) / a1;
    dv[n] = ((a2 + a3 * y) * dv[n - 1] + a3 * v[n - 1] - a4 * dv[n - 2]) / a1;
  }
}

constexpr std::array<std::array<double, 2>, 3> kLambdaGrad{{{-1.0, -1.0}, {1.0, 0.0}, {0.0, 1.0}}};

std::vector<ShapeId> build_layout(int p) {
  std::vector<ShapeId> out;
  out.reserve(num_shapes(p));
  for (int v = 0; v < 3; ++v) out.push_back({ShapeKind::vertex, v, 1, 1});
  for (int d = 2; d <= p; ++d) {
    for (int e = 0; e < 3; ++e) out.push_back({ShapeKind::edge, e, d, d});
    for (int i = 2; i <= d - 1; ++i) out.push_back({ShapeKind::bubble, i, d - 1 - i, d});
  }
  return out;
}

Table build_table(int p, int qdeg) {
  Table t;
  t.p = p;
  t.qdeg = qdeg;
  t.rule = &quadrature_rule(qdeg);
  const auto nq = static_cast<Eigen::Index>(t.rule->size());
  const int nb = num_shapes(p);
  t.values.resize(nq, nb);
  t.dxi.resize(nq, nb);
  t.deta.resize(nq, nb);
  std::vector<double> v(nb), dx(nb), dy(nb);
  for (Eigen::Index q = 0; q < nq; ++q) {
    evaluate(p, t.rule->barycentric(q), v.data(), dx.data(), dy.data());
    for (int i = 0; i < nb; ++i) {
      t.values(q, i) = v[i];
      t.dxi(q, i) = dx[i];
      t.deta(q, i) = dy[i];
    }
  }
  return t;
}

ReferenceMatrices build_reference_matrices(int p) {
  const Table& t = table(p, 2 * p + 1);
  const auto& rule = *t.rule;
  const auto nq = static_cast<Eigen::Index>(rule.size());
  Eigen::VectorXd w(nq), wx(nq), wy(nq);
  for (Eigen::Index q = 0; q < nq; ++q) {
    w(q) = rule.weights[q];
    wx(q) = rule.weights[q] * rule.points[q][0];
    wy(q) = rule.weights[q] * rule.points[q][1];
  }
  const std::array<const Eigen::MatrixXd*, 2> grad{&t.dxi, &t.deta};
  ReferenceMatrices m;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      m.stiff[a][b] = grad[a]->transpose() * w.asDiagonal() * (*grad[b]);
  const std::array<const Eigen::VectorXd*, 3> weight{&w, &wx, &wy};
  for (int k = 0; k < 3; ++k)
    for (int b = 0; b < 2; ++b)
      m.rot[k][b] = t.values.transpose() * weight[k]->asDiagonal() * (*grad[b]);
  m.mass = t.values.transpose() * w.asDiagonal() * t.values;
  return m;
}

}  // namespace

const std::vector<ShapeId>& layout(int p) {
  check_degree(p);
  static std::mutex mutex;
  static std::map<int, std::vector<ShapeId>> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(p);
  if (it == cache.end()) it = cache.emplace(p, build_layout(p)).first;
  return it->second;
}

void evaluate(int p, const std::array<double, 3>& lambda, double* values, double* dxi,
              double* deta) {
  check_degree(p);
  const bool grads = dxi != nullptr && deta != nullptr;
  for (int v = 0; v < 3; ++v) {
    values[v] = lambda[v];
    if (grads) {
      dxi[v] = kLambdaGrad[v][0];
      deta[v] = kLambdaGrad[v][1];
    }
  }
  if (p < 2) return;

  ScaledLegendre leg;
  for (int e = 0; e < 3; ++e) {
    const int a = kEdgeVertices[e][0];
    const int b = kEdgeVertices[e][1];
    const double x = lambda[b] - lambda[a];
    const double t = lambda[a] + lambda[b];
    const double gx[2] = {kLambdaGrad[b][0] - kLambdaGrad[a][0], kLambdaGrad[b][1] - kLambdaGrad[a][1]};
    const double gt[2] = {kLambdaGrad[b][0] + kLambdaGrad[a][0], kLambdaGrad[b][1] + kLambdaGrad[a][1]};
    leg.compute(p, x, t);
    for (int k = 2; k <= p; ++k) {
      double l, lx, lt;
      leg.integrated(k, t, l, lx, lt);
      const int idx = edge_shape_index(e, k);
      values[idx] = l;
      if (grads) {
        dxi[idx] = lx * gx[0] + lt * gt[0];
        deta[idx] = lx * gx[1] + lt * gt[1];
      }
    }
  }
  if (p < 3) return;

  // Bubbles: L_i(l1 - l0, l0 + l1) * l2 * P^{(2i-1,0)}_j(2 l2 - 1).
  const double x = lambda[1] - lambda[0];
  const double t = lambda[0] + lambda[1];
  const double gx[2] = {kLambdaGrad[1][0] - kLambdaGrad[0][0], kLambdaGrad[1][1] - kLambdaGrad[0][1]};
  const double gt[2] = {kLambdaGrad[1][0] + kLambdaGrad[0][0], kLambdaGrad[1][1] + kLambdaGrad[0][1]};
  leg.compute(p, x, t);
  const double l2 = lambda[2];
  const double y = 2.0 * l2 - 1.0;
  std::array<double, kMaxTabulatedDegree + 1> jv{}, jd{};
  for (int i = 2; i <= p - 1; ++i) {
    double li, lix, lit;
    leg.integrated(i, t, li, lix, lit);
    const double gli[2] = {lix * gx[0] + lit * gt[0], lix * gx[1] + lit * gt[1]};
    const int jmax = p - 1 - i;
    jacobi(jmax, 2.0 * i - 1.0, y, jv.data(), jd.data());
    for (int j = 0; j <= jmax; ++j) {
      const int idx = bubble_shape_index(i, j);
      const double v = l2 * jv[j];
      values[idx] = li * v;
      if (grads) {
        // d/dl2 of l2 * P_j(2 l2 - 1); grad l2 = (0, 1).
        const double dv = jv[j] + 2.0 * l2 * jd[j];
        dxi[idx] = gli[0] * v;
        deta[idx] = gli[1] * v + li * dv;
      }
    }
  }
}

const Table& table(int p, int qdeg) {
  check_degree(p);
  static std::mutex mutex;
  static std::map<std::pair<int, int>, Table> cache;
  const auto key = std::make_pair(p, qdeg);
  {
    std::lock_guard lock(mutex);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
  }
  Table t = build_table(p, qdeg);
  std::lock_guard lock(mutex);
  return cache.try_emplace(key, std::move(t)).first->second;
}

const ReferenceMatrices& reference_matrices(int p) {
  check_degree(p);
  static std::mutex mutex;
  static std::map<int, ReferenceMatrices> cache;
  {
    std::lock_guard lock(mutex);
    auto it = cache.find(p);
    if (it != cache.end()) return it->second;
  }
  ReferenceMatrices m = build_reference_matrices(p);
  std::lock_guard lock(mutex);
  return cache.try_emplace(p, std::move(m)).first->second;
}

}  // namespace hpgpe::basis
