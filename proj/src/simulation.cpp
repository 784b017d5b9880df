#include "hybridwave/simulation.hpp"

#include <chrono>
#include <cmath>

#include "hybridwave/error.hpp"

namespace hybridwave {

namespace {

bool all_finite(const std::vector<double>& v) {
  // x * 0 is NaN exactly when x is NaN or infinite.
  double acc = 0.0;
  for (double x : v) acc += x * 0.0;
  return acc == 0.0;
}

void require_finite(const std::vector<double>& v, std::int64_t step, const char* what) {
  if (!all_finite(v)) throw UnstableRunError(step, what);
}

void axpy(double a, const std::vector<double>& x, std::vector<double>& y) {
  for (std::size_t k = 0; k < y.size(); ++k) y[k] += a * x[k];
}

std::vector<double> midpoint(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> m(a.size());
  for (std::size_t k = 0; k < a.size(); ++k) m[k] = 0.5 * (a[k] + b[k]);
  return m;
}

}  // namespace

const char* to_string(RunMode m) {
  switch (m) {
    case RunMode::hybrid: return "hybrid";
    case RunMode::fem: return "fem";
    case RunMode::fdm: return "fdm";
  }
  return "?";
}

Simulation::Simulation(const SimulationSetup& setup, const IsotropicMedium& medium)
    : mode_(setup.mode), dt_(setup.dt) {
  if (!(dt_ > 0.0) || !std::isfinite(dt_)) throw Error(ErrorKind::construction, "time step must be positive");
  const bool want_fdm = mode_ != RunMode::fem;
  const bool want_fem = mode_ != RunMode::fdm;
  if (want_fdm && !setup.fdm_layout) throw Error(ErrorKind::construction, "mode needs an FDM layout");
  if (want_fem && !setup.fem_mesh) throw Error(ErrorKind::construction, "mode needs an FEM mesh");

  if (want_fdm) {
    const TopBoundary top = mode_ == RunMode::hybrid ? TopBoundary::interface : TopBoundary::free_surface;
    fdm_ = std::make_unique<FdmOperators>(*setup.fdm_layout, medium, top);
  }
  if (want_fem) fem_ = std::make_unique<FemSystem>(*setup.fem_mesh, setup.quadrature, medium);

  if (mode_ == RunMode::hybrid) {
    const StaggeredLayout2D& l = fdm_->layout();
    const int nx = l.x_axis.n_cells;
    const double top_y = l.origin().y + l.height();
    validate_interface(fem_->mesh(), l.origin().x, l.dx(), nx);
    for (const auto& ed : fem_->mesh().interface_edges) {
      auto [a, b] = fem_->mesh().edge_vertices(ed);
      for (int v : {a, b}) {
        if (std::abs(fem_->mesh().vertices[v].y - top_y) > 1e-9 * l.dx()) {
          throw Error(ErrorKind::construction, "FEM interface edges do not lie on the FDM top boundary");
        }
      }
    }
    iface_ = std::make_unique<FemInterface>(*fem_, setup.quadrature);
    coupling_ = std::make_unique<InterfaceOperators>(
        build_interface_operators(setup.quadrature, nx, l.dx(), l.origin().x));
    const std::vector<Point2> pts = iface_->points();
    if (static_cast<int>(pts.size()) != coupling_->n_points()) {
      throw Error(ErrorKind::construction, "FEM interface and coupling operators disagree in size");
    }
    for (std::size_t q = 0; q < pts.size(); ++q) {
      if (std::abs(pts[q].x - coupling_->x_q[q]) > 1e-9 * l.dx()) {
        throw Error(ErrorKind::construction, "FEM interface quadrature points are out of order");
      }
    }
  }

  for (const RickerSource& src : setup.sources) {
    if (auto w = check_source(src)) warnings_.push_back(*w);
    SourceBinding sb;
    sb.src = src;
    sb.in_fdm = in_fdm_region(src.location);
    if (sb.in_fdm) {
      sb.fdm = place_fdm_source(*fdm_, src.location, dt_);
    } else {
      sb.fem = place_fem_source(*fem_, src.location);
    }
    sources_.push_back(sb);
  }
  for (const Receiver& r : setup.receivers) {
    ReceiverBinding rb;
    rb.in_fdm = in_fdm_region(r.location);
    if (rb.in_fdm) {
      rb.fdm_index = fdm_->nearest_vy_index(r.location);
    } else {
      try {
        rb.fem_loc = locate_point(fem_->mesh(), r.location);
      } catch (const Error& e) {
        throw Error(ErrorKind::placement, std::string("receiver outside the FEM region: ") + e.what());
      }
    }
    receivers_.push_back(rb);
  }
}

bool Simulation::in_fdm_region(Point2 p) const {
  if (mode_ == RunMode::fdm) return true;
  if (mode_ == RunMode::fem) return false;
  const StaggeredLayout2D& l = fdm_->layout();
  return p.y < l.origin().y + l.height();
}

HybridState Simulation::zero_state() const {
  HybridState s;
  if (fdm_) s.fdm = FdmState::zeros(fdm_->layout());
  if (fem_) {
    s.b.assign(fem_->system_size(), 0.0);
    s.xi.assign(fem_->system_size(), 0.0);
  }
  return s;
}

void Simulation::step(HybridState& s, EnergySample* energy) const {
  Workspace& w = ws_;
  const std::int64_t it = s.step;
  const double t_n = static_cast<double>(it) * dt_;
  const bool hybrid = mode_ == RunMode::hybrid;

  // (1) FEM: xi^{n+1/2} = xi^{n-1/2} + dt M^{-1} (-K b^n - p^n + f^n)
  std::vector<double> xi_prev;
  if (fem_) {
    const int n = fem_->n_dofs();
    w.kb.resize(fem_->system_size());
    fem_->apply_stiffness(s.b, w.kb);
    w.rhs.resize(w.kb.size());
    for (std::size_t k = 0; k < w.kb.size(); ++k) w.rhs[k] = -w.kb[k];
    if (hybrid) {
      const InterfaceTractions tr = fdm_->interface_tractions(s.fdm);
      w.sxy_q.resize(coupling_->n_points());
      w.syy_q.resize(coupling_->n_points());
      apply(coupling_->t_dn_eq, tr.sxy_at_n, w.sxy_q);
      apply(coupling_->t_dm_eq, tr.syy_at_m, w.syy_q);
      w.p.assign(w.kb.size(), 0.0);
      iface_->add_penalty(w.sxy_q, w.syy_q, coupling_->w_q, w.p);
      for (std::size_t k = 0; k < w.p.size(); ++k) w.rhs[k] -= w.p[k];
    }
    for (const SourceBinding& sb : sources_) {
      if (!sb.in_fdm) inject_fem(sb.fem, sb.src.antiderivative(t_n), n, w.rhs);
    }
    fem_->solve_mass(w.rhs);
    if (energy) xi_prev = s.xi;
    axpy(dt_, w.rhs, s.xi);
    require_finite(s.xi, it, "FEM velocity");
  }

  // (2) FDM: V^{n+1/2} = V^{n-1/2} + dt velocity_rhs(Sigma^n)
  std::vector<double> vx_prev, vy_prev;
  if (fdm_) {
    if (energy) {
      vx_prev = s.fdm.vx;
      vy_prev = s.fdm.vy;
    }
    w.dvx.resize(s.fdm.vx.size());
    w.dvy.resize(s.fdm.vy.size());
    fdm_->velocity_rhs(s.fdm, w.dvx, w.dvy);
    axpy(dt_, w.dvx, s.fdm.vx);
    axpy(dt_, w.dvy, s.fdm.vy);
    require_finite(s.fdm.vx, it, "FDM vx");
    require_finite(s.fdm.vy, it, "FDM vy");
  }

  if (energy) {
    EnergySample& e = *energy;
    e = EnergySample{};
    e.t = t_n;
    double naive = 0.0;
    if (fem_) {
      e.fem_kinetic = 0.5 * fem_->mass_product(xi_prev, s.xi);
      double pot = 0.0;
      for (std::size_t k = 0; k < s.b.size(); ++k) pot += s.b[k] * w.kb[k];
      e.fem_potential = 0.5 * pot;
      const std::vector<double> avg = midpoint(xi_prev, s.xi);
      naive += 0.5 * fem_->mass_product(avg, avg) + e.fem_potential;
    }
    if (fdm_) {
      e.fdm_kinetic = fdm_->kinetic_energy(vx_prev, vy_prev, s.fdm.vx, s.fdm.vy);
      e.fdm_potential = fdm_->potential_energy(s.fdm);
      const std::vector<double> ax = midpoint(vx_prev, s.fdm.vx), ay = midpoint(vy_prev, s.fdm.vy);
      naive += fdm_->kinetic_energy(ax, ay, ax, ay) + e.fdm_potential;
    }
    e.total = e.fem_kinetic + e.fem_potential + e.fdm_kinetic + e.fdm_potential;
    e.total_naive = naive;
  }

  // (3) FEM velocity traces -> FDM interface grids
  if (hybrid) {
    w.vx_q.resize(coupling_->n_points());
    w.vy_q.resize(coupling_->n_points());
    iface_->velocity_trace(s.xi, w.vx_q, w.vy_q);
    w.vx_n.resize(coupling_->t_eq_dn.rows());
    w.vy_m.resize(coupling_->t_eq_dm.rows());
    apply(coupling_->t_eq_dn, w.vx_q, w.vx_n);
    apply(coupling_->t_eq_dm, w.vy_q, w.vy_m);
  }

  // (4) FDM: Sigma^{n+1} = Sigma^n + dt stress_rhs(V^{n+1/2}) + source
  if (fdm_) {
    w.dsxx.resize(s.fdm.sxx.size());
    w.dsxy.resize(s.fdm.sxy.size());
    w.dsyy.resize(s.fdm.syy.size());
    fdm_->stress_rhs(s.fdm, w.vx_n, w.vy_m, w.dsxx, w.dsxy, w.dsyy);
    axpy(dt_, w.dsxx, s.fdm.sxx);
    axpy(dt_, w.dsxy, s.fdm.sxy);
    axpy(dt_, w.dsyy, s.fdm.syy);
    for (const SourceBinding& sb : sources_) {
      if (sb.in_fdm) inject_fdm(sb.fdm, sb.src.value(t_n + 0.5 * dt_), s.fdm);
    }
    require_finite(s.fdm.sxx, it, "FDM sxx");
    require_finite(s.fdm.sxy, it, "FDM sxy");
    require_finite(s.fdm.syy, it, "FDM syy");
  }

  // (5) FEM: b^{n+1} = b^n + dt xi^{n+1/2}
  if (fem_) {
    axpy(dt_, s.xi, s.b);
    require_finite(s.b, it, "FEM displacement");
  }
  s.step = it + 1;
}

EnergySample Simulation::energy_at(const HybridState& s) const {
  HybridState copy = s;
  EnergySample e;
  step(copy, &e);
  return e;
}

std::vector<double> Simulation::record(const HybridState& s) const {
  std::vector<double> out;
  out.reserve(receivers_.size());
  for (const ReceiverBinding& r : receivers_) {
    if (r.in_fdm) {
      out.push_back(s.fdm.vy[r.fdm_index]);
    } else {
      const int n = fem_->n_dofs();
      out.push_back(evaluate_at_point(*fem_, std::span<const double>(s.xi).subspan(n, n), r.fem_loc));
    }
  }
  return out;
}

HybridState Simulation::reversed(const HybridState& s) const {
  HybridState ahead = s;
  step(ahead);
  HybridState r = s;
  auto negate = [](const std::vector<double>& v) {
    std::vector<double> out(v.size());
    for (std::size_t k = 0; k < v.size(); ++k) out[k] = -v[k];
    return out;
  };
  r.fdm.vx = negate(ahead.fdm.vx);
  r.fdm.vy = negate(ahead.fdm.vy);
  r.xi = negate(ahead.xi);
  return r;
}

std::pair<double, double> Simulation::interface_rates(const HybridState& s) const {
  if (mode_ != RunMode::hybrid) throw Error(ErrorKind::construction, "interface rates need a hybrid run");
  const int nq = coupling_->n_points();
  const InterfaceTractions tr = fdm_->interface_tractions(s.fdm);
  std::vector<double> sxy_q(nq), syy_q(nq), vx_q(nq), vy_q(nq);
  apply(coupling_->t_dn_eq, tr.sxy_at_n, sxy_q);
  apply(coupling_->t_dm_eq, tr.syy_at_m, syy_q);
  std::vector<double> p(fem_->system_size(), 0.0);
  iface_->add_penalty(sxy_q, syy_q, coupling_->w_q, p);
  double fem_rate = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) fem_rate -= s.xi[k] * p[k];
  iface_->velocity_trace(s.xi, vx_q, vy_q);
  std::vector<double> vx_n(coupling_->t_eq_dn.rows()), vy_m(coupling_->t_eq_dm.rows());
  apply(coupling_->t_eq_dn, vx_q, vx_n);
  apply(coupling_->t_eq_dm, vy_q, vy_m);
  return {fem_rate, fdm_->interface_energy_rate(s.fdm, vx_n, vy_m)};
}

RunOutputs run(const Simulation& sim, const RunOptions& options) {
  HybridState s = sim.zero_state();
  return run_from(sim, s, options);
}

RunOutputs run_from(const Simulation& sim, HybridState& state, const RunOptions& options) {
  if (options.n_steps < 0) throw Error(ErrorKind::construction, "negative step count");
  if (options.energy_stride < 1) throw Error(ErrorKind::construction, "energy stride must be at least 1");
  const auto t_start = std::chrono::steady_clock::now();
  RunOutputs out;
  out.traces.assign(sim.receiver_count(), {});
  for (auto& tr : out.traces) tr.reserve(options.n_steps);
  out.seismogram_time.reserve(options.n_steps);

  const std::int64_t first = state.step;
  const int k = options.energy_stride;
  for (std::int64_t n = 0; n < options.n_steps; ++n) {
    const bool sample = n % k == 0;
    EnergySample e;
    try {
      sim.step(state, sample ? &e : nullptr);
    } catch (const UnstableRunError& err) {
      out.completed = false;
      out.failed_step = err.step();
      out.failure = err.what();
      break;
    }
    if (sample) out.energy.push_back(e);
    out.seismogram_time.push_back((static_cast<double>(state.step) - 0.5) * sim.dt());
    const std::vector<double> r = sim.record(state);
    for (std::size_t i = 0; i < r.size(); ++i) out.traces[i].push_back(r[i]);
    if (options.snapshot_stride > 0 && options.on_snapshot && (state.step - first) % options.snapshot_stride == 0) {
      options.on_snapshot(state);
    }
  }
  if (out.completed && options.n_steps % k == 0) {
    try {
      out.energy.push_back(sim.energy_at(state));
    } catch (const UnstableRunError& err) {
      out.completed = false;
      out.failed_step = err.step();
      out.failure = err.what();
    }
  }
  out.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  return out;
}

}  // namespace hybridwave
