#include "hybridwave/sbp1d.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

#include "hybridwave/error.hpp"

namespace hybridwave {

std::vector<double> GridAxis1D::n_coords() const {
  std::vector<double> out(n_count());
  for (int i = 0; i < n_count(); ++i) out[i] = n_coord(i);
  return out;
}

std::vector<double> GridAxis1D::m_coords() const {
  std::vector<double> out(m_count());
  for (int j = 0; j < m_count(); ++j) out[j] = m_coord(j);
  return out;
}

StencilOperator::StencilOperator(int rows, int cols, bool wrap)
    : cols_(cols), wrap_(wrap), rows_(rows) {}

void StencilOperator::set_row(int r, int first, std::vector<double> coeffs) {
  // Trim structural zeros so application touches only the band.
  std::size_t lo = 0, hi = coeffs.size();
  while (lo < hi && coeffs[lo] == 0.0) ++lo;
  while (hi > lo && coeffs[hi - 1] == 0.0) --hi;
  Row row;
  row.first = first + static_cast<int>(lo);
  row.coeffs.assign(coeffs.begin() + lo, coeffs.begin() + hi);
  if (wrap_) {
    row.first = ((row.first % cols_) + cols_) % cols_;
  } else if (!row.coeffs.empty() &&
             (row.first < 0 || row.first + static_cast<int>(row.coeffs.size()) > cols_)) {
    throw Error(ErrorKind::construction, "stencil row extends past the operator columns");
  }
  rows_[r] = std::move(row);
}

void StencilOperator::apply(const double* in, double* out, int in_stride, int out_stride) const {
  const int nr = rows();
  for (int r = 0; r < nr; ++r) {
    const Row& row = rows_[r];
    double acc = 0.0;
    int c = row.first;
    for (double w : row.coeffs) {
      acc += w * in[static_cast<std::ptrdiff_t>(c) * in_stride];
      if (++c == cols_) c = 0;
    }
    out[static_cast<std::ptrdiff_t>(r) * out_stride] = acc;
  }
}

std::vector<double> StencilOperator::apply(std::span<const double> in) const {
  if (static_cast<int>(in.size()) != cols_) {
    throw Error(ErrorKind::size_mismatch, "operator input has wrong length");
  }
  std::vector<double> out(rows());
  apply(in.data(), out.data());
  return out;
}

Eigen::MatrixXd StencilOperator::to_dense() const {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(rows(), cols_);
  for (int r = 0; r < rows(); ++r) {
    int c = rows_[r].first;
    for (double w : rows_[r].coeffs) {
      m(r, c) += w;
      if (++c == cols_) c = 0;
    }
  }
  return m;
}

StaggeredPair1D periodic_staggered_pair(int n_cells, double dx, double origin) {
  if (n_cells < 4) {
    throw Error(ErrorKind::stencil_does_not_fit, "periodic axis needs at least 4 cells");
  }
  StaggeredPair1D p;
  p.axis = {AxisKind::periodic, n_cells, dx, origin};
  std::vector<double> st;
  for (const auto& q : closure::interior) st.push_back(q.value() / dx);

  p.d_n = StencilOperator(n_cells, n_cells, true);
  p.d_m = StencilOperator(n_cells, n_cells, true);
  for (int j = 0; j < n_cells; ++j) p.d_n.set_row(j, j - 1, st);
  for (int i = 0; i < n_cells; ++i) p.d_m.set_row(i, i - 2, st);
  p.a_n.assign(n_cells, dx);
  p.a_m.assign(n_cells, dx);
  return p;
}

StaggeredPair1D bounded_staggered_pair(int n_cells, double dx, double origin) {
  if (n_cells < 8) {
    throw Error(ErrorKind::closure_overlap, "bounded axis needs at least 8 cells, got " +
                                                std::to_string(n_cells));
  }
  const int n = n_cells;
  const int w = closure::width;
  StaggeredPair1D p;
  p.axis = {AxisKind::bounded, n, dx, origin};
  std::vector<double> st;
  for (const auto& q : closure::interior) st.push_back(q.value() / dx);

  // D_M: (n+1) x n.
  p.d_m = StencilOperator(n + 1, n, false);
  for (int k = 0; k < w; ++k) {
    std::vector<double> lo, hi;
    for (const auto& q : closure::d_m[k]) lo.push_back(q.value() / dx);
    for (auto it = closure::d_m[k].rbegin(); it != closure::d_m[k].rend(); ++it) {
      hi.push_back(-it->value() / dx);
    }
    p.d_m.set_row(k, 0, lo);
    p.d_m.set_row(n - k, n - static_cast<int>(hi.size()), hi);
  }
  for (int i = w; i <= n - w; ++i) p.d_m.set_row(i, i - 2, st);

  // D_N: n x (n+1).
  p.d_n = StencilOperator(n, n + 1, false);
  for (int k = 0; k < w; ++k) {
    std::vector<double> lo, hi;
    for (const auto& q : closure::d_n[k]) lo.push_back(q.value() / dx);
    for (auto it = closure::d_n[k].rbegin(); it != closure::d_n[k].rend(); ++it) {
      hi.push_back(-it->value() / dx);
    }
    p.d_n.set_row(k, 0, lo);
    p.d_n.set_row(n - 1 - k, n + 1 - static_cast<int>(hi.size()), hi);
  }
  for (int j = w; j < n - w; ++j) p.d_n.set_row(j, j - 1, st);

  p.a_n.assign(n + 1, dx);
  p.a_m.assign(n, dx);
  for (int k = 0; k < w; ++k) {
    p.a_n[k] = p.a_n[n - k] = closure::norm_n[k].value() * dx;
    p.a_m[k] = p.a_m[n - 1 - k] = closure::norm_m[k].value() * dx;
  }

  p.e_b.assign(n + 1, 0.0);
  p.e_i.assign(n + 1, 0.0);
  p.e_b.front() = 1.0;
  p.e_i.back() = 1.0;
  p.p_b.assign(n, 0.0);
  p.p_i.assign(n, 0.0);
  for (int k = 0; k < 3; ++k) {
    p.p_b[k] = closure::p_b[k].value();
    p.p_i[n - 1 - k] = closure::p_b[k].value();
  }
  return p;
}

double sbp_identity_residual(const StaggeredPair1D& pair) {
  const Eigen::MatrixXd dn = pair.d_n.to_dense();
  const Eigen::MatrixXd dm = pair.d_m.to_dense();
  const Eigen::VectorXd an = Eigen::Map<const Eigen::VectorXd>(pair.a_n.data(), pair.a_n.size());
  const Eigen::VectorXd am = Eigen::Map<const Eigen::VectorXd>(pair.a_m.data(), pair.a_m.size());
  Eigen::MatrixXd r = an.asDiagonal() * dm + (am.asDiagonal() * dn).transpose();
  if (pair.kind() == AxisKind::bounded) {
    auto v = [](const std::vector<double>& x) {
      return Eigen::Map<const Eigen::VectorXd>(x.data(), x.size());
    };
    r += v(pair.e_b) * v(pair.p_b).transpose() - v(pair.e_i) * v(pair.p_i).transpose();
  }
  return r.cwiseAbs().maxCoeff();
}

std::string dump_operator_text(const StaggeredPair1D& pair) {
  std::ostringstream out;
  out << std::setprecision(17);
  out << "kind " << (pair.kind() == AxisKind::periodic ? "periodic" : "bounded") << "\n";
  out << "n_cells " << pair.axis.n_cells << "\ndx " << pair.axis.dx << "\n";
  auto dump_op = [&](const char* name, const StencilOperator& op) {
    for (int r = 0; r < op.rows(); ++r) {
      int c = op.row(r).first;
      for (double w : op.row(r).coeffs) {
        out << name << ' ' << r << ' ' << c << ' ' << w << '\n';
        if (++c == op.cols()) c = 0;
      }
    }
  };
  auto dump_vec = [&](const char* name, const std::vector<double>& v) {
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (v[i] != 0.0) out << name << ' ' << i << ' ' << v[i] << '\n';
    }
  };
  dump_op("d_n", pair.d_n);
  dump_op("d_m", pair.d_m);
  dump_vec("a_n", pair.a_n);
  dump_vec("a_m", pair.a_m);
  dump_vec("e_b", pair.e_b);
  dump_vec("e_i", pair.e_i);
  dump_vec("p_b", pair.p_b);
  dump_vec("p_i", pair.p_i);
  return out.str();
}

}  // namespace hybridwave
