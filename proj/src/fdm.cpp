#include "hybridwave/fdm.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>

#include "hybridwave/error.hpp"

namespace hybridwave {

namespace {

// out(:, r) = sum_k c_k in(:, first + k) over whole columns of length len.
void apply_x(const StencilOperator& op, const double* in, double* out, int len) {
  for (int r = 0; r < op.rows(); ++r) {
    double* o = out + static_cast<std::ptrdiff_t>(r) * len;
    std::fill(o, o + len, 0.0);
    const auto& row = op.row(r);
    int c = row.first;
    for (double w : row.coeffs) {
      const double* src = in + static_cast<std::ptrdiff_t>(c) * len;
      for (int j = 0; j < len; ++j) o[j] += w * src[j];
      if (++c == op.cols()) c = 0;
    }
  }
}

void apply_y(const StencilOperator& op, const double* in, double* out, int ncols) {
  for (int i = 0; i < ncols; ++i) {
    op.apply(in + static_cast<std::ptrdiff_t>(i) * op.cols(), out + static_cast<std::ptrdiff_t>(i) * op.rows());
  }
}

void check_len(std::span<const double> v, int n, const char* what) {
  if (static_cast<int>(v.size()) != n) {
    throw Error(ErrorKind::size_mismatch, std::string(what) + " has length " +
                                              std::to_string(v.size()) + ", expected " + std::to_string(n));
  }
}

std::vector<double> kron_diag(const std::vector<double>& ax, const std::vector<double>& ay) {
  std::vector<double> out(ax.size() * ay.size());
  for (std::size_t i = 0; i < ax.size(); ++i)
    for (std::size_t j = 0; j < ay.size(); ++j) out[i * ay.size() + j] = ax[i] * ay[j];
  return out;
}

}  // namespace

StaggeredLayout2D StaggeredLayout2D::make(int nx, int ny, double dx, Point2 origin, bool periodic_y) {
  if (nx < 4) throw Error(ErrorKind::stencil_does_not_fit, "FDM region needs at least 4 cells in x");
  StaggeredLayout2D l;
  l.x_axis = {AxisKind::periodic, nx, dx, origin.x};
  l.y_axis = {periodic_y ? AxisKind::periodic : AxisKind::bounded, ny, dx, origin.y};
  return l;
}

SubgridShape StaggeredLayout2D::shape(Subgrid g) const {
  const int nxn = x_axis.n_count(), nxm = x_axis.m_count();
  const int nyn = y_axis.n_count(), nym = y_axis.m_count();
  switch (g) {
    case Subgrid::vx: return {nxn, nym};
    case Subgrid::vy: return {nxm, nyn};
    case Subgrid::sxy: return {nxn, nyn};
    case Subgrid::sxx:
    case Subgrid::syy: return {nxm, nym};
  }
  return {};
}

Point2 StaggeredLayout2D::point(Subgrid g, int i, int j) const {
  const bool x_on_n = g == Subgrid::vx || g == Subgrid::sxy;
  const bool y_on_n = g == Subgrid::vy || g == Subgrid::sxy;
  return {x_on_n ? x_axis.n_coord(i) : x_axis.m_coord(i), y_on_n ? y_axis.n_coord(j) : y_axis.m_coord(j)};
}

FdmState FdmState::zeros(const StaggeredLayout2D& layout) {
  FdmState s;
  s.vx.assign(layout.shape(Subgrid::vx).size(), 0.0);
  s.vy.assign(layout.shape(Subgrid::vy).size(), 0.0);
  s.sxx.assign(layout.shape(Subgrid::sxx).size(), 0.0);
  s.sxy.assign(layout.shape(Subgrid::sxy).size(), 0.0);
  s.syy.assign(layout.shape(Subgrid::syy).size(), 0.0);
  return s;
}

SubgridCoefficients sample_on_subgrids(const IsotropicMedium& medium, const StaggeredLayout2D& layout) {
  auto sample = [&](Subgrid g, auto&& f) {
    const SubgridShape sh = layout.shape(g);
    std::vector<double> out(sh.size());
    for (int i = 0; i < sh.cols; ++i)
      for (int j = 0; j < sh.rows; ++j) out[sh.index(i, j)] = f(layout.point(g, i, j));
    return out;
  };
  SubgridCoefficients c;
  c.rho_vx = sample(Subgrid::vx, [&](Point2 p) { return medium.density()(p); });
  c.rho_vy = sample(Subgrid::vy, [&](Point2 p) { return medium.density()(p); });
  c.lambda_m = sample(Subgrid::sxx, [&](Point2 p) { return medium.lambda()(p); });
  c.mu_m = sample(Subgrid::sxx, [&](Point2 p) { return medium.mu()(p); });
  c.mu_n = sample(Subgrid::sxy, [&](Point2 p) { return medium.mu()(p); });
  return c;
}

FdmOperators::FdmOperators(const StaggeredLayout2D& layout, const IsotropicMedium& medium, TopBoundary top)
    : layout_(layout), top_(top) {
  const bool periodic_y = layout.y_axis.kind == AxisKind::periodic;
  if (periodic_y != (top == TopBoundary::periodic)) {
    throw Error(ErrorKind::construction, "periodic top boundary requires a periodic y-axis and vice versa");
  }
  if (!(layout.x_axis.dx > 0.0) || layout.x_axis.dx != layout.y_axis.dx) {
    throw Error(ErrorKind::construction, "FDM layout needs one positive spacing in x and y");
  }
  px_ = periodic_staggered_pair(layout.x_axis.n_cells, layout.x_axis.dx, layout.x_axis.origin);
  py_ = periodic_y ? periodic_staggered_pair(layout.y_axis.n_cells, layout.y_axis.dx, layout.y_axis.origin)
                   : bounded_staggered_pair(layout.y_axis.n_cells, layout.y_axis.dx, layout.y_axis.origin);
  coef_ = sample_on_subgrids(medium, layout);

  auto invert = [](const std::vector<double>& v) {
    std::vector<double> out(v.size());
    std::transform(v.begin(), v.end(), out.begin(), [](double x) { return 1.0 / x; });
    return out;
  };
  inv_rho_vx_ = invert(coef_.rho_vx);
  inv_rho_vy_ = invert(coef_.rho_vy);
  const std::size_t nm = coef_.lambda_m.size();
  lp2m_m_.resize(nm);
  s_nn_.resize(nm);
  s_nt_.resize(nm);
  for (std::size_t k = 0; k < nm; ++k) {
    lp2m_m_[k] = coef_.lambda_m[k] + 2.0 * coef_.mu_m[k];
    const ComplianceCoeffs c = compliance_coefficients(coef_.lambda_m[k], coef_.mu_m[k]);
    s_nn_[k] = c.s_nn;
    s_nt_[k] = c.s_nt;
  }
  s_shear_.resize(coef_.mu_n.size());
  for (std::size_t k = 0; k < s_shear_.size(); ++k) s_shear_[k] = 1.0 / (2.0 * coef_.mu_n[k]);
}

void FdmOperators::velocity_rhs(const FdmState& s, std::span<double> dvx, std::span<double> dvy) const {
  const SubgridShape svx = layout_.shape(Subgrid::vx), svy = layout_.shape(Subgrid::vy);
  const SubgridShape sxy = layout_.shape(Subgrid::sxy), smm = layout_.shape(Subgrid::sxx);
  check_len(dvx, svx.size(), "dvx");
  check_len(dvy, svy.size(), "dvy");

  apply_x(px_.d_m, s.sxx.data(), dvx.data(), smm.rows);
  apply_x(px_.d_n, s.sxy.data(), dvy.data(), sxy.rows);

  std::vector<double> col(std::max(svx.rows, svy.rows));
  for (int i = 0; i < svx.cols; ++i) {
    py_.d_n.apply(s.sxy.data() + sxy.index(i, 0), col.data());
    double* o = dvx.data() + svx.index(i, 0);
    for (int j = 0; j < svx.rows; ++j) o[j] += col[j];
  }
  for (int i = 0; i < svy.cols; ++i) {
    py_.d_m.apply(s.syy.data() + smm.index(i, 0), col.data());
    double* o = dvy.data() + svy.index(i, 0);
    for (int j = 0; j < svy.rows; ++j) o[j] += col[j];
  }

  if (top_ != TopBoundary::periodic) {
    const auto& an = py_.a_n;
    const auto& am = py_.a_m;
    const int myl = svx.rows - 1, nyl = svy.rows - 1;
    const bool free_top = top_ == TopBoundary::free_surface;
    for (int i = 0; i < svx.cols; ++i) {
      const double bottom = s.sxy[sxy.index(i, 0)];
      const double topv = s.sxy[sxy.index(i, sxy.rows - 1)];
      for (int k = 0; k < 3; ++k) {
        dvx[svx.index(i, k)] += py_.p_b[k] / am[k] * bottom;
        if (free_top) dvx[svx.index(i, myl - k)] -= py_.p_i[myl - k] / am[myl - k] * topv;
      }
    }
    for (int i = 0; i < svy.cols; ++i) {
      double pb = 0.0, pi = 0.0;
      for (int k = 0; k < 3; ++k) {
        pb += py_.p_b[k] * s.syy[smm.index(i, k)];
        pi += py_.p_i[smm.rows - 1 - k] * s.syy[smm.index(i, smm.rows - 1 - k)];
      }
      dvy[svy.index(i, 0)] += pb / an[0];
      if (free_top) dvy[svy.index(i, nyl)] -= pi / an[nyl];
    }
  }

  for (int k = 0; k < svx.size(); ++k) dvx[k] *= inv_rho_vx_[k];
  for (int k = 0; k < svy.size(); ++k) dvy[k] *= inv_rho_vy_[k];
}

void FdmOperators::stress_rhs(const FdmState& s, std::span<const double> vx_if, std::span<const double> vy_if,
                              std::span<double> dsxx, std::span<double> dsxy, std::span<double> dsyy) const {
  const SubgridShape svx = layout_.shape(Subgrid::vx), svy = layout_.shape(Subgrid::vy);
  const SubgridShape sxy = layout_.shape(Subgrid::sxy), smm = layout_.shape(Subgrid::sxx);
  check_len(dsxx, smm.size(), "dsxx");
  check_len(dsyy, smm.size(), "dsyy");
  check_len(dsxy, sxy.size(), "dsxy");
  const bool coupled = top_ == TopBoundary::interface;
  if (coupled) {
    check_len(vx_if, layout_.x_axis.n_count(), "interface vx");
    check_len(vy_if, layout_.x_axis.m_count(), "interface vy");
  }

  // Normal stresses: dsxx <- D_x V_x, dsyy <- modified D_y V_y, then mix.
  apply_x(px_.d_n, s.vx.data(), dsxx.data(), svx.rows);
  apply_y(py_.d_n, s.vy.data(), dsyy.data(), svy.cols);
  if (coupled) {
    const int myl = smm.rows - 1, nyl = svy.rows - 1;
    for (int i = 0; i < smm.cols; ++i) {
      const double mismatch = s.vy[svy.index(i, nyl)] - vy_if[i];
      for (int k = 0; k < 3; ++k) {
        dsyy[smm.index(i, myl - k)] -= py_.p_i[myl - k] / py_.a_m[myl - k] * mismatch;
      }
    }
  }
  for (int k = 0; k < smm.size(); ++k) {
    const double a = dsxx[k], b = dsyy[k];
    dsxx[k] = lp2m_m_[k] * a + coef_.lambda_m[k] * b;
    dsyy[k] = coef_.lambda_m[k] * a + lp2m_m_[k] * b;
  }

  // Shear stress: D_x V_y + modified D_y V_x.
  apply_x(px_.d_m, s.vy.data(), dsxy.data(), svy.rows);
  std::vector<double> col(sxy.rows);
  const int nyl = sxy.rows - 1, myl = svx.rows - 1;
  for (int i = 0; i < sxy.cols; ++i) {
    const double* v = s.vx.data() + svx.index(i, 0);
    py_.d_m.apply(v, col.data());
    if (coupled) {
      double trace = 0.0;
      for (int k = 0; k < 3; ++k) trace += py_.p_i[myl - k] * v[myl - k];
      col[nyl] -= (trace - vx_if[i]) / py_.a_n[nyl];
    }
    double* o = dsxy.data() + sxy.index(i, 0);
    const double* mu = coef_.mu_n.data() + sxy.index(i, 0);
    for (int j = 0; j < sxy.rows; ++j) o[j] = mu[j] * (o[j] + col[j]);
  }
}

InterfaceTractions FdmOperators::interface_tractions(const FdmState& s) const {
  const SubgridShape sxy = layout_.shape(Subgrid::sxy), smm = layout_.shape(Subgrid::sxx);
  if (top_ == TopBoundary::periodic) {
    throw Error(ErrorKind::construction, "no interface on a periodic y-axis");
  }
  InterfaceTractions t;
  t.sxy_at_n.resize(sxy.cols);
  t.syy_at_m.resize(smm.cols);
  for (int i = 0; i < sxy.cols; ++i) t.sxy_at_n[i] = s.sxy[sxy.index(i, sxy.rows - 1)];
  const int myl = smm.rows - 1;
  for (int i = 0; i < smm.cols; ++i) {
    double acc = 0.0;
    for (int k = 0; k < 3; ++k) acc += py_.p_i[myl - k] * s.syy[smm.index(i, myl - k)];
    t.syy_at_m[i] = acc;
  }
  return t;
}

std::vector<double> FdmOperators::norm(Subgrid g) const {
  switch (g) {
    case Subgrid::vx: return kron_diag(px_.a_n, py_.a_m);
    case Subgrid::vy: return kron_diag(px_.a_m, py_.a_n);
    case Subgrid::sxy: return kron_diag(px_.a_n, py_.a_n);
    case Subgrid::sxx:
    case Subgrid::syy: return kron_diag(px_.a_m, py_.a_m);
  }
  return {};
}

double FdmOperators::kinetic_energy(std::span<const double> vx_a, std::span<const double> vy_a,
                                    std::span<const double> vx_b, std::span<const double> vy_b) const {
  const std::vector<double> avx = norm(Subgrid::vx), avy = norm(Subgrid::vy);
  double e = 0.0;
  for (std::size_t k = 0; k < avx.size(); ++k) e += avx[k] * coef_.rho_vx[k] * vx_a[k] * vx_b[k];
  for (std::size_t k = 0; k < avy.size(); ++k) e += avy[k] * coef_.rho_vy[k] * vy_a[k] * vy_b[k];
  return 0.5 * e;
}

double FdmOperators::potential_energy(const FdmState& s) const {
  const std::vector<double> amm = norm(Subgrid::sxx), anm = norm(Subgrid::sxy);
  double e = 0.0;
  for (std::size_t k = 0; k < amm.size(); ++k) {
    const double a = s.sxx[k], b = s.syy[k];
    e += amm[k] * (0.5 * s_nn_[k] * (a * a + b * b) - s_nt_[k] * a * b);
  }
  for (std::size_t k = 0; k < anm.size(); ++k) e += anm[k] * s_shear_[k] * s.sxy[k] * s.sxy[k];
  return e;
}

EnergyParts FdmOperators::energy(const FdmState& v_minus, const FdmState& v_plus_and_stress) const {
  return {kinetic_energy(v_minus.vx, v_minus.vy, v_plus_and_stress.vx, v_plus_and_stress.vy),
          potential_energy(v_plus_and_stress)};
}

double FdmOperators::interface_energy_rate(const FdmState& s, std::span<const double> vx_if,
                                           std::span<const double> vy_if) const {
  const InterfaceTractions t = interface_tractions(s);
  check_len(vx_if, static_cast<int>(t.sxy_at_n.size()), "interface vx");
  check_len(vy_if, static_cast<int>(t.syy_at_m.size()), "interface vy");
  double r = 0.0;
  for (std::size_t i = 0; i < t.sxy_at_n.size(); ++i) r += vx_if[i] * px_.a_n[i] * t.sxy_at_n[i];
  for (std::size_t i = 0; i < t.syy_at_m.size(); ++i) r += vy_if[i] * px_.a_m[i] * t.syy_at_m[i];
  return r;
}

int FdmOperators::nearest_stress_index(Point2 p) const {
  const double dx = layout_.dx();
  const double fx = (p.x - layout_.x_axis.origin) / dx - 0.5;
  const double fy = (p.y - layout_.y_axis.origin) / dx - 0.5;
  if (fx < -1.0 || fx > layout_.x_axis.n_cells || fy < -0.5 || fy > layout_.y_axis.n_cells - 0.5) {
    throw Error(ErrorKind::placement, "point lies outside the FDM region");
  }
  const SubgridShape sh = layout_.shape(Subgrid::sxx);
  const int i = ((static_cast<int>(std::lround(fx)) % sh.cols) + sh.cols) % sh.cols;
  const int j = std::clamp(static_cast<int>(std::lround(fy)), 0, sh.rows - 1);
  return sh.index(i, j);
}

int FdmOperators::nearest_vy_index(Point2 p) const {
  const double dx = layout_.dx();
  const double fx = (p.x - layout_.x_axis.origin) / dx - 0.5;
  const double fy = (p.y - layout_.y_axis.origin) / dx;
  if (fx < -1.0 || fx > layout_.x_axis.n_cells || fy < 0.0 || fy > layout_.y_axis.n_cells) {
    throw Error(ErrorKind::placement, "point lies outside the FDM region");
  }
  const SubgridShape sh = layout_.shape(Subgrid::vy);
  const int i = ((static_cast<int>(std::lround(fx)) % sh.cols) + sh.cols) % sh.cols;
  const int j = std::clamp(static_cast<int>(std::lround(fy)), 0, sh.rows - 1);
  return sh.index(i, j);
}

Eigen::MatrixXd kron(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  Eigen::MatrixXd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

Eigen::MatrixXd materialize(const FdmOperators& ops, FdmOperatorId id) {
  const auto& px = ops.x_pair();
  const auto& py = ops.y_pair();
  auto eye = [](int n) { return Eigen::MatrixXd::Identity(n, n); };
  const int nxn = px.axis.n_count(), nxm = px.axis.m_count();
  const int nyn = py.axis.n_count(), nym = py.axis.m_count();
  switch (id) {
    case FdmOperatorId::dx_vx: return kron(px.d_n.to_dense(), eye(nym));
    case FdmOperatorId::dy_vx: return kron(eye(nxn), py.d_m.to_dense());
    case FdmOperatorId::dx_vy: return kron(px.d_m.to_dense(), eye(nyn));
    case FdmOperatorId::dy_vy: return kron(eye(nxm), py.d_n.to_dense());
    case FdmOperatorId::dx_sxy: return kron(px.d_n.to_dense(), eye(nyn));
    case FdmOperatorId::dy_sxy: return kron(eye(nxn), py.d_n.to_dense());
    case FdmOperatorId::dx_sxx: return kron(px.d_m.to_dense(), eye(nym));
    case FdmOperatorId::dy_syy: return kron(eye(nxm), py.d_m.to_dense());
  }
  return {};
}

void write_fdm_snapshot(const std::filesystem::path& path, const FdmState& s,
                        const StaggeredLayout2D& layout, double time, long step) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::io, "cannot write " + path.string());
  struct Field {
    const char* name;
    Subgrid g;
    const std::vector<double>* v;
  };
  const Field fields[] = {{"vx", Subgrid::vx, &s.vx}, {"vy", Subgrid::vy, &s.vy},
                          {"sxx", Subgrid::sxx, &s.sxx}, {"sxy", Subgrid::sxy, &s.sxy},
                          {"syy", Subgrid::syy, &s.syy}};
  out << std::setprecision(17);
  out << "hybridwave-fdm-snapshot 1\nstep " << step << "\ntime " << time << "\ndx " << layout.dx()
      << "\norigin " << layout.origin().x << ' ' << layout.origin().y << '\n';
  for (const Field& f : fields) {
    const SubgridShape sh = layout.shape(f.g);
    out << "field " << f.name << ' ' << sh.cols << ' ' << sh.rows << '\n';
  }
  out << "end_header\n";
  for (const Field& f : fields) {
    for (double x : *f.v) {
      std::uint64_t bits = std::bit_cast<std::uint64_t>(x);
      char bytes[8];
      for (int b = 0; b < 8; ++b) bytes[b] = static_cast<char>((bits >> (8 * b)) & 0xff);
      out.write(bytes, 8);
    }
  }
  if (!out) throw Error(ErrorKind::io, "failed writing " + path.string());
}

}  // namespace hybridwave
