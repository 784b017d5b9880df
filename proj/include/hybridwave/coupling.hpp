#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hybridwave/fem.hpp"

namespace hybridwave {

/// Primal interpolants from the FDM interface grids to the interface
/// quadrature points (3 per element, left to right, shared GLL endpoints
/// repeated per element), with the quadrature weights.
struct Interpolants {
  SparseRowMatrix t_dn_eq;  // N-grid -> quadrature points
  SparseRowMatrix t_dm_eq;  // M-grid -> quadrature points
  std::vector<double> w_q;
  std::vector<double> x_q;
};

Interpolants gauss3_interpolants(int n_elements, double dx, double x0 = 0.0);
Interpolants gll3_interpolants(int n_elements, double dx, double x0 = 0.0);

/// Energy-compatible duals: t_eq_dn = a_n^{-1} t_dn_eq^T w_q, same for M.
std::pair<SparseRowMatrix, SparseRowMatrix> derive_duals(const SparseRowMatrix& t_dn_eq,
                                                         const SparseRowMatrix& t_dm_eq,
                                                         std::span<const double> w_q, std::span<const double> a_n,
                                                         std::span<const double> a_m);

struct InterfaceOperators {
  // Penalty parameters of both sides; fixed, not configurable.
  static constexpr double eta_e = -1.0;
  static constexpr double eta_d_sxy = -1.0;
  static constexpr double eta_d_syy = -1.0;

  Quadrature family = Quadrature::gauss3;
  int n_elements = 0;
  double dx = 0.0;
  SparseRowMatrix t_dn_eq, t_dm_eq, t_eq_dn, t_eq_dm;
  std::vector<double> w_q, a_n, a_m;
  std::vector<double> x_q, x_n, x_m;

  int n_points() const noexcept { return static_cast<int>(w_q.size()); }
};

InterfaceOperators build_interface_operators(Quadrature family, int n_elements, double dx, double x0 = 0.0);

/// FDM tractions on the N/M interface grids -> quadrature points.
std::pair<std::vector<double>, std::vector<double>> fdm_to_fem(const InterfaceOperators& ops,
                                                               std::span<const double> sxy_at_n,
                                                               std::span<const double> syy_at_m);
/// FEM velocities at the quadrature points -> N/M interface grids.
std::pair<std::vector<double>, std::vector<double>> fem_to_fdm(const InterfaceOperators& ops,
                                                               std::span<const double> vx_at_q,
                                                               std::span<const double> vy_at_q);

/// y = T x for a sparse operator and contiguous vectors.
void apply(const SparseRowMatrix& t, std::span<const double> x, std::span<double> y);

/// Max-norm of w_q t_dn_eq - t_eq_dn^T a_n and of the M counterpart.
double compatibility_residual(const InterfaceOperators& ops);

std::string dump_interface_text(const InterfaceOperators& ops);

}  // namespace hybridwave
