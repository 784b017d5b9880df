#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace hybridwave {

enum class AxisKind { periodic, bounded };

/// One coordinate direction of the staggered grid. N-points are cell edges,
/// M-points cell centres. A periodic axis stores n_cells unique N-points (the
/// right edge is the left edge); a bounded axis stores n_cells + 1.
struct GridAxis1D {
  AxisKind kind = AxisKind::bounded;
  int n_cells = 0;
  double dx = 0.0;
  double origin = 0.0;

  int n_count() const noexcept { return kind == AxisKind::periodic ? n_cells : n_cells + 1; }
  int m_count() const noexcept { return n_cells; }
  double n_coord(int i) const noexcept { return origin + i * dx; }
  double m_coord(int j) const noexcept { return origin + (j + 0.5) * dx; }
  std::vector<double> n_coords() const;
  std::vector<double> m_coords() const;
};

/// Row-banded difference operator. Each row holds a contiguous run of
/// coefficients starting at `first`; on a wrapping operator column indices are
/// taken modulo the column count.
class StencilOperator {
 public:
  struct Row {
    int first = 0;
    std::vector<double> coeffs;
  };

  StencilOperator() = default;
  StencilOperator(int rows, int cols, bool wrap);

  int rows() const noexcept { return static_cast<int>(rows_.size()); }
  int cols() const noexcept { return cols_; }
  bool wraps() const noexcept { return wrap_; }

  void set_row(int r, int first, std::vector<double> coeffs);
  const Row& row(int r) const { return rows_[r]; }

  /// out = D * in (strided access allowed so columns of 2D fields can be
  /// processed in place).
  void apply(const double* in, double* out, int in_stride = 1, int out_stride = 1) const;
  std::vector<double> apply(std::span<const double> in) const;

  Eigen::MatrixXd to_dense() const;

 private:
  int cols_ = 0;
  bool wrap_ = false;
  std::vector<Row> rows_;
};

struct StaggeredPair1D {
  GridAxis1D axis;
  StencilOperator d_n;  // N-grid -> M-grid
  StencilOperator d_m;  // M-grid -> N-grid
  std::vector<double> a_n;
  std::vector<double> a_m;
  // Bounded axes only. Index 0 is the B end, the last index the I end.
  std::vector<double> e_b, e_i;  // length n_count
  std::vector<double> p_b, p_i;  // length m_count

  AxisKind kind() const noexcept { return axis.kind; }
};

/// Closure coefficients of the bounded operators at unit spacing, as exact
/// rationals {numerator, denominator}. Rows are listed from the B boundary;
/// the I boundary uses the mirrored, sign-flipped rows.
namespace closure {
struct Rational {
  long num;
  long den;
  double value() const noexcept { return static_cast<double>(num) / static_cast<double>(den); }
};
inline constexpr int width = 4;
inline constexpr std::array<Rational, 4> norm_n{{{5, 12}, {25, 24}, {13, 12}, {23, 24}}};
inline constexpr std::array<Rational, 4> norm_m{{{19, 18}, {23, 24}, {23, 24}, {37, 36}}};
// D_M rows 0..3 over M columns 0..4.
inline constexpr std::array<std::array<Rational, 5>, 4> d_m{{
    {{{-59, 30}, {29, 10}, {-9, 10}, {-1, 30}, {0, 1}}},
    {{{-76, 75}, {26, 25}, {-1, 25}, {1, 75}, {0, 1}}},
    {{{0, 1}, {-1, 1}, {1, 1}, {0, 1}, {0, 1}}},
    {{{0, 1}, {1, 23}, {-26, 23}, {26, 23}, {-1, 23}}},
}};
// D_N rows 0..3 over N columns 0..5.
inline constexpr std::array<std::array<Rational, 6>, 4> d_n{{
    {{{-1, 1}, {1, 1}, {0, 1}, {0, 1}, {0, 1}, {0, 1}}},
    {{{1, 23}, {-26, 23}, {26, 23}, {-1, 23}, {0, 1}, {0, 1}}},
    {{{0, 1}, {1, 23}, {-26, 23}, {26, 23}, {-1, 23}, {0, 1}}},
    {{{1, 74}, {-1, 74}, {0, 1}, {-39, 37}, {81, 74}, {-3, 74}}},
}};
inline constexpr std::array<Rational, 3> p_b{{{15, 8}, {-5, 4}, {3, 8}}};
inline constexpr std::array<Rational, 4> interior{{{1, 24}, {-9, 8}, {9, 8}, {-1, 24}}};
}  // namespace closure

StaggeredPair1D periodic_staggered_pair(int n_cells, double dx, double origin = 0.0);
StaggeredPair1D bounded_staggered_pair(int n_cells, double dx, double origin = 0.0);

/// Max-norm of A_N D_M + (A_M D_N)^T minus its expected right-hand side.
double sbp_identity_residual(const StaggeredPair1D& pair);

/// Plain-text listing of every nonzero operator entry, norm and boundary
/// vector, one per line.
std::string dump_operator_text(const StaggeredPair1D& pair);

}  // namespace hybridwave
