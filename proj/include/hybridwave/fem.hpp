#pragma once

#include <array>
#include <memory>
#include <span>
#include <vector>

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include "hybridwave/fdm.hpp"
#include "hybridwave/geometry.hpp"
#include "hybridwave/medium.hpp"
#include "hybridwave/mesh.hpp"

namespace hybridwave {

/// 3x3 tensor rules on [-1, 1]^2. Both families use basis nodes {-1, 0, 1}
/// per direction (equidistant and 3-point Gauss-Lobatto nodes coincide), so
/// the biquadratic basis is the same and only the quadrature differs.
enum class Quadrature { gauss3, gll3 };

struct Rule1D {
  std::array<double, 3> points;
  std::array<double, 3> weights;
};
Rule1D rule_1d(Quadrature q);

/// 1D quadratic Lagrange basis on nodes {-1, 0, 1} and its derivative.
std::array<double, 3> lagrange3(double s);
std::array<double, 3> lagrange3_deriv(double s);

/// Local node k = b * 3 + a sits at reference point (a - 1, b - 1).
struct FemSpace {
  int n_dofs = 0;  // scalar dofs per displacement component
  std::vector<std::array<int, 9>> element_dofs;
  std::vector<Point2> dof_points;
};

/// Global numbering with shared vertex/edge nodes; nodes on the right
/// boundary are identified with their periodic partners on the left.
FemSpace build_space(const QuadMesh& mesh);

using SparseRowMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

class FemSystem {
 public:
  FemSystem(const QuadMesh& mesh, Quadrature quadrature, const IsotropicMedium& medium);

  const QuadMesh& mesh() const noexcept { return mesh_; }
  const FemSpace& space() const noexcept { return space_; }
  Quadrature quadrature() const noexcept { return quad_; }
  int n_dofs() const noexcept { return space_.n_dofs; }
  /// Length of b and xi: both displacement components stacked.
  int system_size() const noexcept { return 2 * space_.n_dofs; }

  /// Density-weighted scalar mass matrix (one block of the block-diagonal M).
  const Eigen::SparseMatrix<double>& scalar_mass() const noexcept { return mass_; }
  /// Full 2n x 2n stiffness in [b1; b2] ordering.
  const SparseRowMatrix& stiffness() const noexcept { return stiffness_; }
  bool diagonal_mass() const noexcept { return !mass_diag_.empty(); }

  /// out = K b
  void apply_stiffness(std::span<const double> b, std::span<double> out) const;
  /// x <- M^{-1} x, in place, for a stacked [x1; x2] vector.
  void solve_mass(std::span<double> x) const;
  /// u . M v for stacked vectors.
  double mass_product(std::span<const double> u, std::span<const double> v) const;

  EnergyParts energy(std::span<const double> b, std::span<const double> xi_minus,
                     std::span<const double> xi_plus) const;

 private:
  QuadMesh mesh_;
  Quadrature quad_;
  FemSpace space_;
  Eigen::SparseMatrix<double> mass_;
  SparseRowMatrix stiffness_;
  std::vector<double> mass_diag_;
  std::unique_ptr<Eigen::SimplicialLLT<Eigen::SparseMatrix<double>>> mass_llt_;
};

/// Traces of the basis on the interface edges at the per-element interface
/// quadrature points (3 per edge, left to right, shared endpoints repeated).
class FemInterface {
 public:
  FemInterface(const FemSystem& system, Quadrature quadrature);

  int n_points() const noexcept { return 3 * static_cast<int>(edges_.size()); }
  std::vector<Point2> points() const;

  /// p^1_a = sum_q w_q phi_a(x_q) sxy_q, p^2 analogous with syy. Adds into p.
  void add_penalty(std::span<const double> sxy_q, std::span<const double> syy_q, std::span<const double> w_q,
                   std::span<double> p) const;
  void velocity_trace(std::span<const double> xi, std::span<double> vx_q, std::span<double> vy_q) const;

 private:
  struct EdgeTrace {
    std::array<int, 3> dofs;           // edge nodes, left to right
    std::array<std::array<double, 3>, 3> phi;  // phi[q][m]
    std::array<Point2, 3> points;
  };
  int n_dofs_ = 0;
  std::vector<EdgeTrace> edges_;
};

std::vector<double> interface_penalty(const FemInterface& iface, std::span<const double> sxy_q,
                                      std::span<const double> syy_q, std::span<const double> w_q, int system_size);

/// Element and reference coordinates of a physical point.
struct PointLocation {
  int element = -1;
  double xi = 0.0;
  double eta = 0.0;
};

/// Inverse bilinear map by Newton iteration (tolerance 1e-12 in reference
/// coordinates, at most 25 iterations).
PointLocation locate_point(const QuadMesh& mesh, Point2 p);

/// Value of a scalar field given by nodal coefficients (length n_dofs).
double evaluate_at_point(const FemSystem& system, std::span<const double> coeffs, const PointLocation& loc);
double evaluate_at_point(const FemSystem& system, std::span<const double> coeffs, Point2 p);

/// Physical gradients of the 9 local basis functions at a located point.
std::array<Point2, 9> basis_gradients(const QuadMesh& mesh, const PointLocation& loc);

}  // namespace hybridwave
