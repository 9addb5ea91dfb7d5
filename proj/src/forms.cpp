#include "hpgpe/forms.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "hpgpe/basis.hpp"

namespace hpgpe {

namespace {

// Neumaier compensated sum.
struct CompensatedSum {
  double sum = 0.0;
  double c = 0.0;
  void add(double x) {
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x))
      c += (sum - t) + x;
    else
      c += (x - t) + sum;
    sum = t;
  }
  double value() const { return sum + c; }
};

}  // namespace

Forms::Forms(std::shared_ptr<const HpSpace> space, const ProblemConfig& cfg)
    : space_(std::move(space)), cfg_(cfg) {
  v1_ = check_v1(cfg_, *space_);
  // with omega = 0 a nonnegative potential keeps the form definite
  if (v1_.delta < 0.0 || (cfg_.omega > 0.0 && v1_.delta <= 0.0))
    throw std::domain_error("potential condition violated: min(V - omega^2 |x|^2 / 2) = " +
                            std::to_string(v1_.delta));

  const auto& sp = *space_;
  const int ncells = sp.num_cells();
  wq_.resize(ncells);
  vq_.resize(ncells);
  xq_.resize(ncells);
  yq_.resize(ncells);
  valid_.resize(ncells);

  std::vector<Eigen::Triplet<double>> tm, tk;
  std::vector<Eigen::Triplet<cplx>> ts;
  const double omega = cfg_.omega;
  for (int c = 0; c < ncells; ++c) {
    const auto& cell = sp.cell(c);
    const int p = cell.degree;
    const int nb = basis::num_shapes(p);
    const auto& geo = cell.geo;
    const auto& rm = basis::reference_matrices(p);
    const auto& tab = basis::table(p, assembly_degree(p));
    const auto& rule = *tab.rule;
    const auto nq = static_cast<Eigen::Index>(rule.size());

    auto& w = wq_[c];
    auto& v = vq_[c];
    auto& xs = xq_[c];
    auto& ys = yq_[c];
    w.resize(nq);
    v.resize(nq);
    xs.resize(nq);
    ys.resize(nq);
    for (Eigen::Index q = 0; q < nq; ++q) {
      const Point x = geo.map(rule.points[q][0], rule.points[q][1]);
      w(q) = rule.weights[q] * geo.det;
      v(q) = cfg_.potential(x.x, x.y);
      xs(q) = x.x;
      ys(q) = x.y;
    }

    const Eigen::Matrix2d GG = geo.G * geo.G.transpose();
    Eigen::MatrixXd K = Eigen::MatrixXd::Zero(nb, nb);
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) K += GG(a, b) * rm.stiff[a][b];
    K *= geo.det;

    const auto& G = geo.G;
    const auto& J = geo.J;
    const double x0 = geo.x0.x, y0 = geo.x0.y;
    const double coef[3][2] = {{y0 * G(0, 0) - x0 * G(0, 1), y0 * G(1, 0) - x0 * G(1, 1)},
                               {J(1, 0) * G(0, 0) - J(0, 0) * G(0, 1), J(1, 0) * G(1, 0) - J(0, 0) * G(1, 1)},
                               {J(1, 1) * G(0, 0) - J(0, 1) * G(0, 1), J(1, 1) * G(1, 0) - J(0, 1) * G(1, 1)}};
    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(nb, nb);
    for (int m = 0; m < 3; ++m)
      for (int b = 0; b < 2; ++b) T += coef[m][b] * rm.rot[m][b];
    T *= geo.det;

    const Eigen::VectorXd w2v = 2.0 * w.cwiseProduct(v);
    const Eigen::MatrixXd MV = tab.values.transpose() * w2v.asDiagonal() * tab.values;
    const Eigen::MatrixXd M = geo.det * rm.mass;
    const Eigen::MatrixXd R = T - T.transpose();

    auto& valid = valid_[c];
    for (int i = 0; i < nb; ++i)
      if (cell.dofs[i] >= 0) valid.push_back(i);
    for (int a : valid)
      for (int b : valid) {
        const int r = cell.dofs[a], col = cell.dofs[b];
        tm.emplace_back(r, col, M(a, b));
        tk.emplace_back(r, col, K(a, b));
        ts.emplace_back(r, col, cplx(K(a, b) + MV(a, b), -omega * R(a, b)));
      }
  }
  const int n = sp.ndofs();
  mass_.resize(n, n);
  mass_.setFromTriplets(tm.begin(), tm.end());
  stiffness_.resize(n, n);
  stiffness_.setFromTriplets(tk.begin(), tk.end());
  static_.resize(n, n);
  static_.setFromTriplets(ts.begin(), ts.end());
  mass_.makeCompressed();
  stiffness_.makeCompressed();
  static_.makeCompressed();
  mass_c_ = mass_.cast<cplx>();
  build_slots();
}

void Forms::build_slots() {
  const auto& sp = *space_;
  slots_.resize(sp.num_cells());
  const int* outer = static_.outerIndexPtr();
  const int* inner = static_.innerIndexPtr();
  for (int c = 0; c < sp.num_cells(); ++c) {
    const auto& cell = sp.cell(c);
    const auto& valid = valid_[c];
    auto& slots = slots_[c];
    slots.resize(valid.size() * valid.size());
    for (std::size_t b = 0; b < valid.size(); ++b) {
      const int col = cell.dofs[valid[b]];
      for (std::size_t a = 0; a < valid.size(); ++a) {
        const int row = cell.dofs[valid[a]];
        const int* it = std::lower_bound(inner + outer[col], inner + outer[col + 1], row);
        slots[b * valid.size() + a] = static_cast<int>(it - inner);
      }
    }
  }
}

SparseC Forms::weighted(const StateVector* z) const {
  SparseC A = static_;
  if (z == nullptr || cfg_.beta == 0.0) return A;
  check_state(*space_, *z);
  const auto& sp = *space_;
  cplx* values = A.valuePtr();
  for (int c = 0; c < sp.num_cells(); ++c) {
    const auto& cell = sp.cell(c);
    const auto& tab = basis::table(cell.degree, assembly_degree(cell.degree));
    const Eigen::VectorXcd lc = local_coefficients(sp, c, z->coeffs);
    const Eigen::VectorXd ur = tab.values * lc.real();
    const Eigen::VectorXd ui = tab.values * lc.imag();
    const Eigen::VectorXd wt = 2.0 * cfg_.beta * wq_[c].cwiseProduct(ur.cwiseAbs2() + ui.cwiseAbs2());
    const Eigen::MatrixXd local = tab.values.transpose() * wt.asDiagonal() * tab.values;
    const auto& valid = valid_[c];
    const auto& slots = slots_[c];
    const std::size_t nv = valid.size();
    for (std::size_t b = 0; b < nv; ++b)
      for (std::size_t a = 0; a < nv; ++a) values[slots[b * nv + a]] += local(valid[a], valid[b]);
  }
  return A;
}

EnergyParts Forms::energy_parts(const StateVector& u) const {
  check_state(*space_, u);
  const auto& sp = *space_;
  const int ncells = sp.num_cells();
  EnergyParts out;
  out.q_elem.resize(ncells);
  out.f_elem.resize(ncells);
  std::vector<double> imag(ncells), scale(ncells);
  const double omega = cfg_.omega;

#pragma omp parallel for schedule(dynamic, 16)
  for (int c = 0; c < ncells; ++c) {
    const auto& cell = sp.cell(c);
    const auto& tab = basis::table(cell.degree, assembly_degree(cell.degree));
    const auto& G = cell.geo.G;
    const Eigen::VectorXcd lc = local_coefficients(sp, c, u.coeffs);
    const Eigen::VectorXd cr = lc.real(), ci = lc.imag();
    const Eigen::VectorXd ur = tab.values * cr, ui = tab.values * ci;
    const Eigen::VectorXd rxi = tab.dxi * cr, ixi = tab.dxi * ci;
    const Eigen::VectorXd reta = tab.deta * cr, ieta = tab.deta * ci;
    const auto& w = wq_[c];
    const auto& v = vq_[c];
    double qs = 0.0, fs = 0.0, is = 0.0, ss = 0.0;
    for (Eigen::Index q = 0; q < w.size(); ++q) {
      const cplx val(ur(q), ui(q));
      const cplx gx = G(0, 0) * cplx(rxi(q), ixi(q)) + G(1, 0) * cplx(reta(q), ieta(q));
      const cplx gy = G(0, 1) * cplx(rxi(q), ixi(q)) + G(1, 1) * cplx(reta(q), ieta(q));
      const double m2 = std::norm(val);
      const double g2 = std::norm(gx) + std::norm(gy);
      const cplx z = std::conj(val) * (yq_[c](q) * gx - xq_[c](q) * gy);
      // -i omega z = omega Im z - i omega Re z
      qs += w(q) * (0.5 * g2 + v(q) * m2 + omega * z.imag());
      fs += w(q) * m2 * m2;
      is += w(q) * (-omega * z.real());
      ss += w(q) * (0.5 * g2 + std::abs(v(q)) * m2 + omega * std::abs(z));
    }
    out.q_elem[c] = qs;
    out.f_elem[c] = fs;
    imag[c] = is;
    scale[c] = ss;
  }

  CompensatedSum q, f, im, sc;
  for (int c = 0; c < ncells; ++c) {
    q.add(out.q_elem[c]);
    f.add(out.f_elem[c]);
    im.add(imag[c]);
    sc.add(scale[c]);
  }
  out.quadratic = q.value();
  out.quartic = f.value();
  out.imag = im.value();
  out.energy = out.quadratic + 0.5 * cfg_.beta * out.quartic;
  out.scale = sc.value() + 0.5 * cfg_.beta * out.quartic;
  if (std::abs(out.imag) > 1e-8 * std::max(out.scale, 1e-300))
    throw std::logic_error("energy has a non-negligible imaginary part: " + std::to_string(out.imag));
  return out;
}

double Forms::rayleigh_lambda(const StateVector& u) const {
  const auto parts = energy_parts(u);
  const double n2 = inner(u, u).real();
  if (!(n2 > 0.0)) throw std::invalid_argument("rayleigh_lambda: zero state");
  return (2.0 * parts.quadratic + 2.0 * cfg_.beta * parts.quartic) / n2;
}

cplx Forms::inner(const StateVector& u, const StateVector& v) const {
  check_state(*space_, u);
  check_state(*space_, v);
  return v.coeffs.dot(mass_c_ * u.coeffs);
}

double Forms::norm(const StateVector& u) const { return std::sqrt(std::max(0.0, inner(u, u).real())); }

void Forms::normalize(StateVector& u) const {
  const double n = norm(u);
  if (!(n > 0.0)) throw std::logic_error("cannot normalize a vanishing state");
  u.coeffs /= n;
}

}  // namespace hpgpe
