#pragma once

#include <filesystem>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "hybridwave/geometry.hpp"
#include "hybridwave/medium.hpp"
#include "hybridwave/sbp1d.hpp"

namespace hybridwave {

/// Column-major shape of one subgrid: `cols` x-positions, `rows` y-positions,
/// entry (i, j) stored at i * rows + j.
struct SubgridShape {
  int cols = 0;
  int rows = 0;
  int size() const noexcept { return cols * rows; }
  int index(int i, int j) const noexcept { return i * rows + j; }
};

enum class Subgrid { vx, vy, sxx, sxy, syy };

/// Four staggered subgrids on a rectangle periodic in x. The y-axis is bounded
/// (bottom = B, top = I) or, for verification runs, periodic.
///   vx: N_x by M_y    vy: M_x by N_y    sxy: N_x by N_y    sxx, syy: M_x by M_y
struct StaggeredLayout2D {
  GridAxis1D x_axis;
  GridAxis1D y_axis;

  static StaggeredLayout2D make(int nx, int ny, double dx, Point2 origin, bool periodic_y = false);

  SubgridShape shape(Subgrid g) const;
  Point2 point(Subgrid g, int i, int j) const;
  double dx() const noexcept { return x_axis.dx; }
  Point2 origin() const noexcept { return {x_axis.origin, y_axis.origin}; }
  double width() const noexcept { return x_axis.n_cells * x_axis.dx; }
  double height() const noexcept { return y_axis.n_cells * y_axis.dx; }
};

struct FdmState {
  std::vector<double> vx, vy, sxx, sxy, syy;

  static FdmState zeros(const StaggeredLayout2D& layout);
};

/// Medium coefficients sampled at the points of each subgrid.
struct SubgridCoefficients {
  std::vector<double> rho_vx, rho_vy;
  std::vector<double> lambda_m, mu_m;  // sxx/syy subgrid
  std::vector<double> mu_n;            // sxy subgrid
};

SubgridCoefficients sample_on_subgrids(const IsotropicMedium& medium, const StaggeredLayout2D& layout);

/// What closes the top (I) end of a bounded y-axis. `interface` applies the
/// coupling-modified derivatives; `free_surface` mirrors the bottom SATs.
/// `periodic` requires a periodic y-axis and adds no boundary terms at all.
enum class TopBoundary { interface, free_surface, periodic };

struct InterfaceTractions {
  std::vector<double> sxy_at_n;  // length N_x
  std::vector<double> syy_at_m;  // length M_x
};

struct EnergyParts {
  double kinetic = 0.0;
  double potential = 0.0;
  double total() const noexcept { return kinetic + potential; }
};

class FdmOperators {
 public:
  FdmOperators(const StaggeredLayout2D& layout, const IsotropicMedium& medium, TopBoundary top);

  const StaggeredLayout2D& layout() const noexcept { return layout_; }
  const StaggeredPair1D& x_pair() const noexcept { return px_; }
  const StaggeredPair1D& y_pair() const noexcept { return py_; }
  TopBoundary top() const noexcept { return top_; }
  const SubgridCoefficients& coefficients() const noexcept { return coef_; }

  /// Rates of V_x and V_y, bottom free-surface SATs included (and top ones
  /// when the top is a free surface).
  void velocity_rhs(const FdmState& s, std::span<double> dvx, std::span<double> dvy) const;

  /// Stress rates. `vx_if` (length N_x) and `vy_if` (length M_x) are the
  /// interface velocities; they are ignored unless the top is an interface.
  void stress_rhs(const FdmState& s, std::span<const double> vx_if, std::span<const double> vy_if,
                  std::span<double> dsxx, std::span<double> dsxy, std::span<double> dsyy) const;

  InterfaceTractions interface_tractions(const FdmState& s) const;

  /// Kinetic energy in the staggered-product form v_minus . A rho v_plus.
  EnergyParts energy(const FdmState& v_minus, const FdmState& v_plus_and_stress) const;
  double kinetic_energy(std::span<const double> vx_a, std::span<const double> vy_a,
                        std::span<const double> vx_b, std::span<const double> vy_b) const;
  double potential_energy(const FdmState& s) const;

  /// vx_if . A_x^N sxy_at_n + vy_if . A_x^M syy_at_m
  double interface_energy_rate(const FdmState& s, std::span<const double> vx_if,
                               std::span<const double> vy_if) const;

  /// Diagonal of the 2D norm matrix of a subgrid (tensor product of 1D norms).
  std::vector<double> norm(Subgrid g) const;

  /// Nearest sxx/syy point to p, or throws a placement error when p lies
  /// outside the region.
  int nearest_stress_index(Point2 p) const;
  /// Nearest vy point to p.
  int nearest_vy_index(Point2 p) const;

 private:
  StaggeredLayout2D layout_;
  StaggeredPair1D px_, py_;
  TopBoundary top_;
  SubgridCoefficients coef_;
  std::vector<double> inv_rho_vx_, inv_rho_vy_, lp2m_m_;
  std::vector<double> s_nn_, s_nt_, s_shear_;
};

/// Dense 2D operators for verification on small layouts.
enum class FdmOperatorId {
  dx_vx, dy_vx, dx_vy, dy_vy, dx_sxy, dy_sxy, dx_sxx, dy_syy,
};
Eigen::MatrixXd materialize(const FdmOperators& ops, FdmOperatorId id);
Eigen::MatrixXd kron(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

/// Snapshot of all five fields: a text header terminated by a line
/// "end_header", then each field as little-endian float64 in header order.
void write_fdm_snapshot(const std::filesystem::path& path, const FdmState& s,
                        const StaggeredLayout2D& layout, double time, long step);

}  // namespace hybridwave
