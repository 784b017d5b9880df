#include "hybridwave/coupling.hpp"

#include <cmath>
#include <sstream>
#include <iomanip>

#include "hybridwave/error.hpp"
#include "hybridwave/sbp1d.hpp"

namespace hybridwave {

namespace {

struct Entry {
  int offset;  // column relative to the element index e
  double value;
};

using PointStencil = std::vector<Entry>;

// Builds an (3 n) x n matrix from per-element stencils for the 3 points.
SparseRowMatrix assemble(int n, const std::array<PointStencil, 3>& st) {
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(static_cast<std::size_t>(n) * 12);
  for (int e = 0; e < n; ++e) {
    for (int q = 0; q < 3; ++q) {
      for (const Entry& en : st[q]) {
        const int c = ((e + en.offset) % n + n) % n;
        t.emplace_back(3 * e + q, c, en.value);
      }
    }
  }
  SparseRowMatrix m(3 * n, n);
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

std::vector<double> points(int n, double dx, double x0, std::array<double, 3> frac) {
  std::vector<double> x(3 * static_cast<std::size_t>(n));
  for (int e = 0; e < n; ++e)
    for (int q = 0; q < 3; ++q) x[3 * e + q] = x0 + (e + frac[q]) * dx;
  return x;
}

std::vector<double> weights(int n, double dx, std::array<double, 3> w) {
  std::vector<double> out(3 * static_cast<std::size_t>(n));
  for (int e = 0; e < n; ++e)
    for (int q = 0; q < 3; ++q) out[3 * e + q] = w[q] * dx;
  return out;
}

void check_elements(int n, double dx) {
  if (n < 4) throw Error(ErrorKind::stencil_does_not_fit, "interface needs at least 4 elements");
  if (!(dx > 0.0)) throw Error(ErrorKind::construction, "interface spacing must be positive");
}

// 4-point midpoint interpolation between grid points e-1+o .. e+2+o.
PointStencil midpoint(int o) {
  return {{o - 1, -1.0 / 16}, {o, 9.0 / 16}, {o + 1, 9.0 / 16}, {o + 2, -1.0 / 16}};
}

void check_vec(std::span<const double> v, std::size_t n, const char* what) {
  if (v.size() != n) {
    throw Error(ErrorKind::size_mismatch, std::string(what) + " has length " + std::to_string(v.size()) +
                                              ", expected " + std::to_string(n));
  }
}

}  // namespace

Interpolants gauss3_interpolants(int n, double dx, double x0) {
  check_elements(n, dx);
  const double r = std::sqrt(15.0);
  // Gauss points at e + 1/2 -+ sqrt(15)/10 in cell units.
  const double a = -1.0 / 20, b = 3.0 / 5 + r / 10, c = 9.0 / 20 - r / 10;
  const double ma = 3.0 / 40 + r / 20, mb = 17.0 / 20, mc = 3.0 / 40 - r / 20;
  Interpolants out;
  out.t_dn_eq = assemble(n, {PointStencil{{-1, a}, {0, b}, {1, c}}, midpoint(0),
                             PointStencil{{0, c}, {1, b}, {2, a}}});
  out.t_dm_eq = assemble(n, {PointStencil{{-1, ma}, {0, mb}, {1, mc}}, PointStencil{{0, 1.0}},
                             PointStencil{{-1, mc}, {0, mb}, {1, ma}}});
  out.w_q = weights(n, dx, {5.0 / 18, 8.0 / 18, 5.0 / 18});
  out.x_q = points(n, dx, x0, {0.5 - r / 10, 0.5, 0.5 + r / 10});
  return out;
}

Interpolants gll3_interpolants(int n, double dx, double x0) {
  check_elements(n, dx);
  Interpolants out;
  // Element vertices coincide with N-points and the midpoint with an M-point.
  out.t_dn_eq = assemble(n, {PointStencil{{0, 1.0}}, midpoint(0), PointStencil{{1, 1.0}}});
  // M-point e sits at e + 1/2, so vertex e is the midpoint of M e-1 and M e.
  out.t_dm_eq = assemble(n, {midpoint(-1), PointStencil{{0, 1.0}}, midpoint(0)});
  out.w_q = weights(n, dx, {1.0 / 6, 2.0 / 3, 1.0 / 6});
  out.x_q = points(n, dx, x0, {0.0, 0.5, 1.0});
  return out;
}

std::pair<SparseRowMatrix, SparseRowMatrix> derive_duals(const SparseRowMatrix& t_dn_eq,
                                                         const SparseRowMatrix& t_dm_eq,
                                                         std::span<const double> w_q, std::span<const double> a_n,
                                                         std::span<const double> a_m) {
  auto dual = [&](const SparseRowMatrix& t, std::span<const double> a, const char* name) {
    check_vec(w_q, static_cast<std::size_t>(t.rows()), "w_q");
    check_vec(a, static_cast<std::size_t>(t.cols()), name);
    Eigen::VectorXd inv_a(a.size());
    for (std::size_t k = 0; k < a.size(); ++k) {
      if (!(std::abs(a[k]) > 0.0) || !std::isfinite(a[k])) {
        throw Error(ErrorKind::singular_norm, std::string(name) + " has a zero entry at " + std::to_string(k));
      }
      inv_a[static_cast<Eigen::Index>(k)] = 1.0 / a[k];
    }
    Eigen::Map<const Eigen::VectorXd> w(w_q.data(), static_cast<Eigen::Index>(w_q.size()));
    SparseRowMatrix d = inv_a.asDiagonal() * SparseRowMatrix(t.transpose()) * w.asDiagonal();
    d.makeCompressed();
    return d;
  };
  return {dual(t_dn_eq, a_n, "a_n"), dual(t_dm_eq, a_m, "a_m")};
}

InterfaceOperators build_interface_operators(Quadrature family, int n_elements, double dx, double x0) {
  const Interpolants ip =
      family == Quadrature::gauss3 ? gauss3_interpolants(n_elements, dx, x0) : gll3_interpolants(n_elements, dx, x0);
  const StaggeredPair1D px = periodic_staggered_pair(n_elements, dx, x0);
  InterfaceOperators ops;
  ops.family = family;
  ops.n_elements = n_elements;
  ops.dx = dx;
  ops.t_dn_eq = ip.t_dn_eq;
  ops.t_dm_eq = ip.t_dm_eq;
  ops.w_q = ip.w_q;
  ops.x_q = ip.x_q;
  ops.a_n = px.a_n;
  ops.a_m = px.a_m;
  ops.x_n = px.axis.n_coords();
  ops.x_m = px.axis.m_coords();
  auto [dn, dm] = derive_duals(ops.t_dn_eq, ops.t_dm_eq, ops.w_q, ops.a_n, ops.a_m);
  ops.t_eq_dn = std::move(dn);
  ops.t_eq_dm = std::move(dm);
  return ops;
}

void apply(const SparseRowMatrix& t, std::span<const double> x, std::span<double> y) {
  check_vec(x, static_cast<std::size_t>(t.cols()), "operator input");
  check_vec(y, static_cast<std::size_t>(t.rows()), "operator output");
  Eigen::Map<const Eigen::VectorXd> xv(x.data(), t.cols());
  Eigen::Map<Eigen::VectorXd> yv(y.data(), t.rows());
  yv.noalias() = t * xv;
}

std::pair<std::vector<double>, std::vector<double>> fdm_to_fem(const InterfaceOperators& ops,
                                                               std::span<const double> sxy_at_n,
                                                               std::span<const double> syy_at_m) {
  std::vector<double> a(ops.n_points()), b(ops.n_points());
  apply(ops.t_dn_eq, sxy_at_n, a);
  apply(ops.t_dm_eq, syy_at_m, b);
  return {std::move(a), std::move(b)};
}

std::pair<std::vector<double>, std::vector<double>> fem_to_fdm(const InterfaceOperators& ops,
                                                               std::span<const double> vx_at_q,
                                                               std::span<const double> vy_at_q) {
  std::vector<double> a(ops.t_eq_dn.rows()), b(ops.t_eq_dm.rows());
  apply(ops.t_eq_dn, vx_at_q, a);
  apply(ops.t_eq_dm, vy_at_q, b);
  return {std::move(a), std::move(b)};
}

double compatibility_residual(const InterfaceOperators& ops) {
  auto residual = [&](const SparseRowMatrix& t, const SparseRowMatrix& d, const std::vector<double>& a) {
    const Eigen::MatrixXd lhs = Eigen::Map<const Eigen::VectorXd>(ops.w_q.data(), ops.n_points()).asDiagonal() *
                                Eigen::MatrixXd(t);
    const Eigen::MatrixXd rhs = Eigen::MatrixXd(d).transpose() *
                                Eigen::Map<const Eigen::VectorXd>(a.data(), static_cast<Eigen::Index>(a.size()))
                                    .asDiagonal();
    return (lhs - rhs).cwiseAbs().maxCoeff();
  };
  return std::max(residual(ops.t_dn_eq, ops.t_eq_dn, ops.a_n), residual(ops.t_dm_eq, ops.t_eq_dm, ops.a_m));
}

std::string dump_interface_text(const InterfaceOperators& ops) {
  std::ostringstream os;
  os << std::setprecision(17);
  os << "family " << (ops.family == Quadrature::gauss3 ? "gauss3" : "gll3") << "\n";
  os << "n_elements " << ops.n_elements << "\ndx " << ops.dx << "\n";
  auto dump = [&](const char* name, const SparseRowMatrix& m) {
    os << name << " " << m.rows() << " " << m.cols() << "\n";
    for (int r = 0; r < m.outerSize(); ++r) {
      os << r << ":";
      for (SparseRowMatrix::InnerIterator it(m, r); it; ++it) os << " " << it.col() << "=" << it.value();
      os << "\n";
    }
  };
  dump("t_dn_eq", ops.t_dn_eq);
  dump("t_dm_eq", ops.t_dm_eq);
  dump("t_eq_dn", ops.t_eq_dn);
  dump("t_eq_dm", ops.t_eq_dm);
  os << "w_q";
  for (double w : ops.w_q) os << " " << w;
  os << "\n";
  return os.str();
}

}  // namespace hybridwave
