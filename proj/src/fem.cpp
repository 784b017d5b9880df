#include "hybridwave/fem.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <unordered_map>

#include "hybridwave/error.hpp"

namespace hybridwave {

namespace {

// Local vertex -> local node, and the three local nodes along each edge in
// the direction vertex k -> vertex k+1.
constexpr int kVertexNode[4] = {0, 2, 8, 6};
constexpr int kEdgeNodes[4][3] = {{0, 1, 2}, {2, 5, 8}, {8, 7, 6}, {6, 3, 0}};

Point2 edge_reference(int local_edge, double t) {
  switch (local_edge) {
    case 0: return {t, -1.0};
    case 1: return {1.0, t};
    case 2: return {-t, 1.0};
    default: return {-1.0, -t};
  }
}

struct Jacobian {
  double x_xi, x_eta, y_xi, y_eta;
  double det() const { return x_xi * y_eta - x_eta * y_xi; }
};

Jacobian jacobian(const QuadMesh& mesh, int e, double xi, double eta) {
  const auto& el = mesh.elements[e];
  const double dxi[4] = {-0.25 * (1 - eta), 0.25 * (1 - eta), 0.25 * (1 + eta), -0.25 * (1 + eta)};
  const double deta[4] = {-0.25 * (1 - xi), -0.25 * (1 + xi), 0.25 * (1 + xi), 0.25 * (1 - xi)};
  Jacobian j{0, 0, 0, 0};
  for (int k = 0; k < 4; ++k) {
    const Point2 v = mesh.vertices[el[k]];
    j.x_xi += dxi[k] * v.x;
    j.x_eta += deta[k] * v.x;
    j.y_xi += dxi[k] * v.y;
    j.y_eta += deta[k] * v.y;
  }
  return j;
}

std::array<double, 9> basis_values(double xi, double eta) {
  const auto lx = lagrange3(xi), ly = lagrange3(eta);
  std::array<double, 9> v{};
  for (int b = 0; b < 3; ++b)
    for (int a = 0; a < 3; ++a) v[b * 3 + a] = lx[a] * ly[b];
  return v;
}

std::array<Point2, 9> gradients(const Jacobian& j, double xi, double eta) {
  const auto lx = lagrange3(xi), ly = lagrange3(eta);
  const auto dlx = lagrange3_deriv(xi), dly = lagrange3_deriv(eta);
  const double det = j.det();
  std::array<Point2, 9> g{};
  for (int b = 0; b < 3; ++b) {
    for (int a = 0; a < 3; ++a) {
      const double r_xi = dlx[a] * ly[b], r_eta = lx[a] * dly[b];
      g[b * 3 + a] = {(j.y_eta * r_xi - j.y_xi * r_eta) / det, (-j.x_eta * r_xi + j.x_xi * r_eta) / det};
    }
  }
  return g;
}

}  // namespace

Rule1D rule_1d(Quadrature q) {
  if (q == Quadrature::gauss3) {
    const double s = std::sqrt(0.6);
    return {{-s, 0.0, s}, {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0}};
  }
  return {{-1.0, 0.0, 1.0}, {1.0 / 3.0, 4.0 / 3.0, 1.0 / 3.0}};
}

std::array<double, 3> lagrange3(double s) { return {0.5 * s * (s - 1.0), 1.0 - s * s, 0.5 * s * (s + 1.0)}; }

std::array<double, 3> lagrange3_deriv(double s) { return {s - 0.5, -2.0 * s, s + 0.5}; }

FemSpace build_space(const QuadMesh& mesh) {
  const int nv = static_cast<int>(mesh.vertices.size());
  std::vector<int> partner(nv, -1);
  for (const auto& [l, r] : mesh.periodic_pairs) partner[r] = l;
  auto canonical = [&](int v) { return partner[v] >= 0 ? partner[v] : v; };

  FemSpace s;
  s.element_dofs.resize(mesh.elements.size());
  std::vector<int> vertex_dof(nv, -1);
  std::map<std::pair<int, int>, int> edge_dof;
  std::vector<bool> provisional;

  auto new_dof = [&](Point2 p, bool prov) {
    s.dof_points.push_back(p);
    provisional.push_back(prov);
    return s.n_dofs++;
  };

  for (std::size_t e = 0; e < mesh.elements.size(); ++e) {
    const auto& el = mesh.elements[e];
    auto& dofs = s.element_dofs[e];
    for (int k = 0; k < 4; ++k) {
      const int c = canonical(el[k]);
      if (vertex_dof[c] < 0) vertex_dof[c] = new_dof(mesh.vertices[c], false);
      dofs[kVertexNode[k]] = vertex_dof[c];
    }
    for (int k = 0; k < 4; ++k) {
      int a = el[k], b = el[(k + 1) % 4];
      const bool mapped = partner[a] >= 0 && partner[b] >= 0;
      if (mapped) {
        a = partner[a];
        b = partner[b];
      }
      const std::pair<int, int> key = std::minmax(a, b);
      const Point2 ref = edge_reference(k, 0.0);
      const Point2 p = map_to_physical(mesh, static_cast<int>(e), ref.x, ref.y);
      auto it = edge_dof.find(key);
      if (it == edge_dof.end()) {
        it = edge_dof.emplace(key, new_dof(p, mapped)).first;
      } else if (provisional[it->second] && !mapped) {
        s.dof_points[it->second] = p;
        provisional[it->second] = false;
      }
      dofs[kEdgeNodes[k][1]] = it->second;
    }
    dofs[4] = new_dof(map_to_physical(mesh, static_cast<int>(e), 0.0, 0.0), false);
  }
  return s;
}

FemSystem::FemSystem(const QuadMesh& mesh, Quadrature quadrature, const IsotropicMedium& medium)
    : mesh_(mesh), quad_(quadrature), space_(build_space(mesh)) {
  validate_mesh(mesh_);
  const int n = space_.n_dofs;
  const Rule1D r = rule_1d(quad_);

  std::vector<Eigen::Triplet<double>> mt, kt;
  mt.reserve(mesh_.elements.size() * 81);
  kt.reserve(mesh_.elements.size() * 324);

  for (std::size_t e = 0; e < mesh_.elements.size(); ++e) {
    double me[9][9] = {};
    double ke[18][18] = {};
    for (int qj = 0; qj < 3; ++qj) {
      for (int qi = 0; qi < 3; ++qi) {
        const double xi = r.points[qi], eta = r.points[qj];
        const Jacobian jac = jacobian(mesh_, static_cast<int>(e), xi, eta);
        const double det = jac.det();
        if (!(det > 0.0)) {
          throw Error(ErrorKind::mesh, "element " + std::to_string(e) + " has a non-positive Jacobian");
        }
        const double w = r.weights[qi] * r.weights[qj] * det;
        const LameParameters lp = medium.at(map_to_physical(mesh_, static_cast<int>(e), xi, eta));
        const auto phi = basis_values(xi, eta);
        const auto g = gradients(jac, xi, eta);
        const double l2m = lp.lambda + 2.0 * lp.mu;
        for (int a = 0; a < 9; ++a) {
          for (int b = 0; b < 9; ++b) {
            me[a][b] += lp.rho * phi[a] * phi[b] * w;
            const double xx = g[a].x * g[b].x, yy = g[a].y * g[b].y;
            const double xy = g[a].x * g[b].y, yx = g[a].y * g[b].x;
            ke[a][b] += (l2m * xx + lp.mu * yy) * w;
            ke[a][9 + b] += (lp.lambda * xy + lp.mu * yx) * w;
            ke[9 + a][b] += (lp.mu * xy + lp.lambda * yx) * w;
            ke[9 + a][9 + b] += (lp.mu * xx + l2m * yy) * w;
          }
        }
      }
    }
    const auto& dofs = space_.element_dofs[e];
    for (int a = 0; a < 9; ++a) {
      for (int b = 0; b < 9; ++b) {
        mt.emplace_back(dofs[a], dofs[b], me[a][b]);
        for (int ca = 0; ca < 2; ++ca)
          for (int cb = 0; cb < 2; ++cb)
            kt.emplace_back(ca * n + dofs[a], cb * n + dofs[b], ke[ca * 9 + a][cb * 9 + b]);
      }
    }
  }

  mass_.resize(n, n);
  mass_.setFromTriplets(mt.begin(), mt.end());
  stiffness_.resize(2 * n, 2 * n);
  stiffness_.setFromTriplets(kt.begin(), kt.end());

  if (quad_ == Quadrature::gll3) {
    mass_.prune(0.0);
    mass_diag_.resize(n);
    for (int k = 0; k < n; ++k) mass_diag_[k] = mass_.coeff(k, k);
    if (mass_.nonZeros() != n) throw Error(ErrorKind::construction, "collocated mass matrix is not diagonal");
  } else {
    mass_llt_ = std::make_unique<Eigen::SimplicialLLT<Eigen::SparseMatrix<double>>>(mass_);
    if (mass_llt_->info() != Eigen::Success) {
      throw Error(ErrorKind::construction, "mass matrix factorization failed");
    }
  }
}

void FemSystem::apply_stiffness(std::span<const double> b, std::span<double> out) const {
  Eigen::Map<const Eigen::VectorXd> bv(b.data(), static_cast<Eigen::Index>(b.size()));
  Eigen::Map<Eigen::VectorXd> ov(out.data(), static_cast<Eigen::Index>(out.size()));
  ov.noalias() = stiffness_ * bv;
}

void FemSystem::solve_mass(std::span<double> x) const {
  const int n = space_.n_dofs;
  if (!mass_diag_.empty()) {
    for (int c = 0; c < 2; ++c)
      for (int k = 0; k < n; ++k) x[c * n + k] /= mass_diag_[k];
    return;
  }
  Eigen::Map<Eigen::MatrixXd> xm(x.data(), n, 2);
  const Eigen::MatrixXd sol = mass_llt_->solve(xm);
  xm = sol;
}

double FemSystem::mass_product(std::span<const double> u, std::span<const double> v) const {
  const int n = space_.n_dofs;
  double acc = 0.0;
  for (int c = 0; c < 2; ++c) {
    Eigen::Map<const Eigen::VectorXd> uc(u.data() + c * n, n), vc(v.data() + c * n, n);
    if (!mass_diag_.empty()) {
      for (int k = 0; k < n; ++k) acc += uc[k] * mass_diag_[k] * vc[k];
    } else {
      acc += uc.dot(mass_ * vc);
    }
  }
  return acc;
}

EnergyParts FemSystem::energy(std::span<const double> b, std::span<const double> xi_minus,
                              std::span<const double> xi_plus) const {
  Eigen::Map<const Eigen::VectorXd> bv(b.data(), static_cast<Eigen::Index>(b.size()));
  return {0.5 * mass_product(xi_minus, xi_plus), 0.5 * bv.dot(stiffness_ * bv)};
}

FemInterface::FemInterface(const FemSystem& system, Quadrature quadrature) : n_dofs_(system.n_dofs()) {
  const QuadMesh& mesh = system.mesh();
  const Rule1D r = rule_1d(quadrature);
  for (const auto& ed : mesh.interface_edges) {
    auto [va, vb] = mesh.edge_vertices(ed);
    const bool reversed = mesh.vertices[va].x > mesh.vertices[vb].x;
    EdgeTrace t{};
    for (int m = 0; m < 3; ++m) {
      const int node = kEdgeNodes[ed.local_edge][reversed ? 2 - m : m];
      t.dofs[m] = system.space().element_dofs[ed.element][node];
    }
    for (int q = 0; q < 3; ++q) {
      const double s = r.points[q];
      t.phi[q] = lagrange3(s);
      const Point2 ref = edge_reference(ed.local_edge, reversed ? -s : s);
      t.points[q] = map_to_physical(mesh, ed.element, ref.x, ref.y);
    }
    edges_.push_back(t);
  }
}

std::vector<Point2> FemInterface::points() const {
  std::vector<Point2> out;
  for (const auto& e : edges_) out.insert(out.end(), e.points.begin(), e.points.end());
  return out;
}

void FemInterface::add_penalty(std::span<const double> sxy_q, std::span<const double> syy_q,
                               std::span<const double> w_q, std::span<double> p) const {
  const int nq = n_points();
  if (static_cast<int>(sxy_q.size()) != nq || static_cast<int>(syy_q.size()) != nq ||
      static_cast<int>(w_q.size()) != nq || static_cast<int>(p.size()) != 2 * n_dofs_) {
    throw Error(ErrorKind::size_mismatch, "interface penalty inputs do not match the interface");
  }
  for (std::size_t e = 0; e < edges_.size(); ++e) {
    const EdgeTrace& t = edges_[e];
    for (int q = 0; q < 3; ++q) {
      const std::size_t k = 3 * e + q;
      const double fx = w_q[k] * sxy_q[k], fy = w_q[k] * syy_q[k];
      for (int m = 0; m < 3; ++m) {
        p[t.dofs[m]] += t.phi[q][m] * fx;
        p[n_dofs_ + t.dofs[m]] += t.phi[q][m] * fy;
      }
    }
  }
}

void FemInterface::velocity_trace(std::span<const double> xi, std::span<double> vx_q, std::span<double> vy_q) const {
  if (static_cast<int>(xi.size()) != 2 * n_dofs_ || static_cast<int>(vx_q.size()) != n_points() ||
      static_cast<int>(vy_q.size()) != n_points()) {
    throw Error(ErrorKind::size_mismatch, "interface trace sizes do not match the interface");
  }
  for (std::size_t e = 0; e < edges_.size(); ++e) {
    const EdgeTrace& t = edges_[e];
    for (int q = 0; q < 3; ++q) {
      double vx = 0.0, vy = 0.0;
      for (int m = 0; m < 3; ++m) {
        vx += t.phi[q][m] * xi[t.dofs[m]];
        vy += t.phi[q][m] * xi[n_dofs_ + t.dofs[m]];
      }
      vx_q[3 * e + q] = vx;
      vy_q[3 * e + q] = vy;
    }
  }
}

std::vector<double> interface_penalty(const FemInterface& iface, std::span<const double> sxy_q,
                                      std::span<const double> syy_q, std::span<const double> w_q, int system_size) {
  std::vector<double> p(system_size, 0.0);
  iface.add_penalty(sxy_q, syy_q, w_q, p);
  return p;
}

PointLocation locate_point(const QuadMesh& mesh, Point2 p) {
  constexpr double tol = 1e-10;
  bool newton_failed = false;
  for (std::size_t e = 0; e < mesh.elements.size(); ++e) {
    const auto& el = mesh.elements[e];
    double xmin = INFINITY, xmax = -INFINITY, ymin = INFINITY, ymax = -INFINITY;
    for (int v : el) {
      xmin = std::min(xmin, mesh.vertices[v].x);
      xmax = std::max(xmax, mesh.vertices[v].x);
      ymin = std::min(ymin, mesh.vertices[v].y);
      ymax = std::max(ymax, mesh.vertices[v].y);
    }
    const double pad = 1e-9 * std::max(xmax - xmin, ymax - ymin);
    if (p.x < xmin - pad || p.x > xmax + pad || p.y < ymin - pad || p.y > ymax + pad) continue;

    double xi = 0.0, eta = 0.0;
    bool converged = false;
    for (int it = 0; it < 25; ++it) {
      const Point2 x = map_to_physical(mesh, static_cast<int>(e), xi, eta);
      const Jacobian j = jacobian(mesh, static_cast<int>(e), xi, eta);
      const double rx = x.x - p.x, ry = x.y - p.y;
      const double det = j.det();
      const double dxi = (j.y_eta * rx - j.x_eta * ry) / det;
      const double deta = (-j.y_xi * rx + j.x_xi * ry) / det;
      xi -= dxi;
      eta -= deta;
      if (std::abs(dxi) < 1e-12 && std::abs(deta) < 1e-12) {
        converged = true;
        break;
      }
    }
    if (!converged) {
      newton_failed = true;
      continue;
    }
    if (std::abs(xi) <= 1.0 + tol && std::abs(eta) <= 1.0 + tol) {
      return {static_cast<int>(e), std::clamp(xi, -1.0, 1.0), std::clamp(eta, -1.0, 1.0)};
    }
  }
  if (newton_failed) throw Error(ErrorKind::geometry, "inverse bilinear map did not converge");
  throw Error(ErrorKind::location, "point (" + std::to_string(p.x) + ", " + std::to_string(p.y) +
                                       ") lies outside the mesh");
}

double evaluate_at_point(const FemSystem& system, std::span<const double> coeffs, const PointLocation& loc) {
  const auto phi = basis_values(loc.xi, loc.eta);
  const auto& dofs = system.space().element_dofs[loc.element];
  double v = 0.0;
  for (int k = 0; k < 9; ++k) v += phi[k] * coeffs[dofs[k]];
  return v;
}

double evaluate_at_point(const FemSystem& system, std::span<const double> coeffs, Point2 p) {
  return evaluate_at_point(system, coeffs, locate_point(system.mesh(), p));
}

std::array<Point2, 9> basis_gradients(const QuadMesh& mesh, const PointLocation& loc) {
  return gradients(jacobian(mesh, loc.element, loc.xi, loc.eta), loc.xi, loc.eta);
}

}  // namespace hybridwave
