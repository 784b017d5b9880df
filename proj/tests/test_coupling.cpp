#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "hybridwave/coupling.hpp"
#include "hybridwave/error.hpp"

using namespace hybridwave;
using Catch::Approx;

namespace {

std::vector<double> times(const SparseRowMatrix& t, const std::vector<double>& x) {
  std::vector<double> y(static_cast<std::size_t>(t.rows()));
  apply(t, x, y);
  return y;
}

std::vector<double> sample(const std::vector<double>& xs, auto&& f) {
  std::vector<double> v;
  for (double x : xs) v.push_back(f(x));
  return v;
}

ErrorKind kind_of(auto fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::io;
}

}  // namespace

TEST_CASE("Gauss points and weights", "[coupling]") {
  const Interpolants in = gauss3_interpolants(5, 2.0, 1.0);
  REQUIRE(in.x_q.size() == 15);
  CHECK(in.x_q[1] == Approx(2.0));
  CHECK(in.x_q[3] == Approx(3.0 + 2.0 * (0.5 - std::sqrt(15.0) / 10)));
  CHECK(in.w_q[0] == Approx(2.0 * 5 / 18));
  CHECK(in.w_q[1] == Approx(2.0 * 8 / 18));
}

TEST_CASE("first Gauss point of a linear", "[coupling]") {
  // N-points at x = i, first point of element 1 at 3/2 - sqrt(15)/10
  const Interpolants in = gauss3_interpolants(8, 1.0);
  std::vector<double> xn(8);
  for (int i = 0; i < 8; ++i) xn[i] = i;
  const std::vector<double> v = times(in.t_dn_eq, xn);
  CHECK(v[3] == Approx(1.5 - std::sqrt(15.0) / 10).epsilon(1e-14));
}

TEST_CASE("interpolants reproduce low-order polynomials away from the wrap", "[coupling]") {
  const int n = 12;
  const double dx = 0.5;
  for (Quadrature q : {Quadrature::gauss3, Quadrature::gll3}) {
    const InterfaceOperators ops = build_interface_operators(q, n, dx);
    for (auto f : {+[](double) { return 1.0; }, +[](double x) { return 2.0 * x - 1.0; },
                   +[](double x) { return x * x; }}) {
      const std::vector<double> vn = times(ops.t_dn_eq, sample(ops.x_n, f));
      const std::vector<double> vm = times(ops.t_dm_eq, sample(ops.x_m, f));
      // elements 3..8 draw only on unwrapped grid points
      for (int k = 9; k < 27; ++k) {
        CHECK(vn[k] == Approx(f(ops.x_q[k])).margin(1e-13));
        CHECK(vm[k] == Approx(f(ops.x_q[k])).margin(1e-13));
      }
    }
  }
}

TEST_CASE("interpolant rows sum to one", "[coupling]") {
  for (Quadrature q : {Quadrature::gauss3, Quadrature::gll3}) {
    const InterfaceOperators ops = build_interface_operators(q, 7, 0.3);
    for (const SparseRowMatrix* t : {&ops.t_dn_eq, &ops.t_dm_eq}) {
      const std::vector<double> r = times(*t, std::vector<double>(7, 1.0));
      for (double v : r) CHECK(v == Approx(1.0).epsilon(1e-14));
    }
    for (const SparseRowMatrix* t : {&ops.t_eq_dn, &ops.t_eq_dm}) {
      const std::vector<double> r = times(*t, std::vector<double>(21, 1.0));
      for (double v : r) CHECK(v == Approx(1.0).epsilon(1e-14));
    }
  }
}

TEST_CASE("GLL dual gathers both vertex weights", "[coupling]") {
  const double dx = 0.25;
  const InterfaceOperators ops = build_interface_operators(Quadrature::gll3, 6, dx);
  // N-point 2 is the right vertex of element 1 and the left vertex of element 2
  CHECK(ops.t_eq_dn.coeff(2, 3 * 1 + 2) == Approx(1.0 / 6));
  CHECK(ops.t_eq_dn.coeff(2, 3 * 2 + 0) == Approx(1.0 / 6));
  CHECK(ops.t_eq_dn.coeff(2, 3 * 2 + 1) == Approx(2.0 / 3 * 9 / 16));
}

TEST_CASE("periodic wrap", "[coupling]") {
  const InterfaceOperators ops = build_interface_operators(Quadrature::gauss3, 5, 1.0);
  // the first point of element 0 reaches back to N-point n-1
  CHECK(ops.t_dn_eq.coeff(0, 4) != 0.0);
  const InterfaceOperators gll = build_interface_operators(Quadrature::gll3, 5, 1.0);
  // the last vertex of the last element is N-point 0
  CHECK(gll.t_dn_eq.coeff(14, 0) == 1.0);
}

TEST_CASE("compatibility holds to round-off", "[coupling]") {
  for (Quadrature q : {Quadrature::gauss3, Quadrature::gll3}) {
    for (int n : {4, 7, 200}) CHECK(compatibility_residual(build_interface_operators(q, n, 0.005)) <= 1e-14);
  }
}

TEST_CASE("transfers are adjoint in the weighted inner products", "[coupling]") {
  std::mt19937 rng(13);
  std::uniform_real_distribution<double> u(-1, 1);
  for (Quadrature q : {Quadrature::gauss3, Quadrature::gll3}) {
    const InterfaceOperators ops = build_interface_operators(q, 9, 0.4);
    std::vector<double> sn(9), sm(9), vx(27), vy(27);
    for (auto* v : {&sn, &sm, &vx, &vy})
      for (double& x : *v) x = u(rng);
    const auto [sq_xy, sq_yy] = fdm_to_fem(ops, sn, sm);
    const auto [vn, vm] = fem_to_fdm(ops, vx, vy);
    double fem = 0.0, fdm = 0.0;
    for (int k = 0; k < 27; ++k) fem += ops.w_q[k] * (vx[k] * sq_xy[k] + vy[k] * sq_yy[k]);
    for (int i = 0; i < 9; ++i) fdm += ops.a_n[i] * vn[i] * sn[i] + ops.a_m[i] * vm[i] * sm[i];
    CHECK(std::abs(fem - fdm) <= 1e-14 * std::max(1.0, std::abs(fem)));
  }
}

TEST_CASE("construction errors", "[coupling]") {
  CHECK(kind_of([] { gauss3_interpolants(3, 1.0); }) == ErrorKind::stencil_does_not_fit);
  CHECK(kind_of([] { gll3_interpolants(3, 1.0); }) == ErrorKind::stencil_does_not_fit);
  const Interpolants in = gll3_interpolants(4, 1.0);
  std::vector<double> a(4, 1.0), bad = a;
  bad[2] = 0.0;
  CHECK(kind_of([&] { derive_duals(in.t_dn_eq, in.t_dm_eq, in.w_q, bad, a); }) == ErrorKind::singular_norm);
  CHECK(kind_of([&] { derive_duals(in.t_dn_eq, in.t_dm_eq, in.w_q, std::vector<double>(3, 1.0), a); }) ==
        ErrorKind::size_mismatch);
}

TEST_CASE("interface dump", "[coupling]") {
  const std::string s = dump_interface_text(build_interface_operators(Quadrature::gll3, 4, 1.0));
  CHECK_FALSE(s.empty());
}
