// End-to-end acceptance checks. Prints one "Criterion N: PASS|FAIL" line per
// criterion and exits non-zero if any criterion fails.
//
//   acceptance --cli PATH [criterion numbers...]
#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <numbers>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <sys/wait.h>

#include "hybridwave/config.hpp"
#include "hybridwave/error.hpp"
#include "hybridwave/fdm.hpp"
#include "hybridwave/io.hpp"
#include "hybridwave/simulation.hpp"

namespace fs = std::filesystem;
using namespace hybridwave;
using Clock = std::chrono::steady_clock;

namespace {

const fs::path kPresets = HW_PRESET_DIR;
const fs::path kOut = "acceptance_out";

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Verdict {
  bool pass = false;
  std::string detail;
};

void report(int n, const Verdict& v) {
  std::printf("Criterion %d: %s %s\n", n, v.pass ? "PASS" : "FAIL", v.detail.c_str());
  std::fflush(stdout);
}

void note(const char* fmt, auto... args) {
  std::printf("  ");
  std::printf(fmt, args...);
  std::printf("\n");
  std::fflush(stdout);
}

std::string format(const char* fmt, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, fmt, args...);
  return buf;
}

// (max - min) / mean of the staggered total energy over samples with t in [t0, t1].
double flatness(const std::vector<EnergySample>& e, double t0, double t1) {
  double lo = INFINITY, hi = -INFINITY, sum = 0.0;
  int n = 0;
  for (const EnergySample& s : e) {
    if (s.t < t0 - 1e-12 || s.t > t1 + 1e-12) continue;
    lo = std::min(lo, s.total);
    hi = std::max(hi, s.total);
    sum += s.total;
    ++n;
  }
  return n == 0 ? NAN : (hi - lo) / (sum / n);
}

struct PresetRun {
  RunOutputs out;
  double dt = 0.0;
};

PresetRun run_preset(const std::string& file, RunMode mode, const std::string& tag) {
  RunConfig cfg = parse_config(kPresets / file);
  cfg.mode = mode;
  const ScenarioBuild b = build_scenario(cfg);
  const Simulation sim(b.setup, b.medium);
  RunOptions opt;
  opt.n_steps = cfg.steps;
  opt.energy_stride = cfg.energy_stride;
  note("running %s in %s mode (%lld steps)", file.c_str(), to_string(mode), static_cast<long long>(cfg.steps));
  PresetRun r{run(sim, opt), cfg.dt};
  const fs::path dir = kOut / tag;
  fs::create_directories(dir);
  write_seismogram(r.out, dir / "seismogram.csv");
  write_energy(r.out, dir / "energy.csv");
  note("  %s: %s, wall %.1f s", tag.c_str(), r.out.completed ? "completed" : r.out.failure.c_str(),
       r.out.wall_seconds);
  return r;
}

// 1. Operator identities through the command-line tool.
Verdict criterion1(const std::string& cli) {
  if (cli.empty()) return {false, "no --cli path given"};
  const auto t0 = Clock::now();
  const std::string cmd = "\"" + cli + "\" verify-operators --sizes 8 16 33 100 --elements 4 7 200";
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return {false, "cannot start " + cli};
  char line[256];
  int lines = 0, failed = 0;
  while (std::fgets(line, sizeof line, p)) {
    if (std::string(line).find(" residual ") != std::string::npos) {
      ++lines;
      if (std::string(line).find("FAIL") != std::string::npos) ++failed;
    }
  }
  const int status = pclose(p);
  const double t = seconds_since(t0);
  const bool ok = WIFEXITED(status) && WEXITSTATUS(status) == 0 && failed == 0 && lines == 22 && t < 1.0;
  return {ok, format("(%d residual checks, %d failed, exit %d, %.3f s; runtime limit 1 s)", lines, failed,
                     WIFEXITED(status) ? WEXITSTATUS(status) : -1, t)};
}

// 2. The FEM and FDM interface energy rates cancel for arbitrary states.
Verdict criterion2() {
  const auto t0 = Clock::now();
  std::mt19937 rng(2024);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double worst = 0.0, worst_vs_rate = 0.0;
  int evaluated = 0;
  for (Quadrature q : {Quadrature::gauss3, Quadrature::gll3}) {
    SimulationSetup setup;
    setup.mode = RunMode::hybrid;
    setup.dt = 1e-4;
    setup.quadrature = q;
    setup.fdm_layout = StaggeredLayout2D::make(64, 8, 0.005, {0, 0});
    setup.fem_mesh = sinusoidal_mesh(64, 3, 64 * 0.005, 0.015, 0.2, {0, 0.04});
    const Simulation sim(setup, constant_medium(1, 2, 1));
    const double length = sim.fdm().layout().width();
    HybridState s = sim.zero_state();
    for (int trial = 0; trial < 1000; ++trial) {
      // amplitudes spread over six decades
      const double a_fdm = std::pow(10.0, 3 * u(rng)), a_fem = std::pow(10.0, 3 * u(rng));
      double s_max = 0.0, xi_max = 0.0;
      for (auto* v : {&s.fdm.sxx, &s.fdm.sxy, &s.fdm.syy}) {
        for (double& x : *v) {
          x = a_fdm * u(rng);
          s_max = std::max(s_max, std::abs(x));
        }
      }
      for (double& x : s.xi) {
        x = a_fem * u(rng);
        xi_max = std::max(xi_max, std::abs(x));
      }
      const auto [fem, fdm] = sim.interface_rates(s);
      // state scale: the largest possible size of either rate for this state
      const double scale = xi_max * s_max * length;
      worst = std::max(worst, std::abs(fem + fdm) / scale);
      worst_vs_rate = std::max(worst_vs_rate, std::abs(fem + fdm) / std::max(std::abs(fem), std::abs(fdm)));
      ++evaluated;
    }
  }
  const double t = seconds_since(t0);
  note("2 diagnostic: worst |rate_FEM + rate_FDM| relative to the larger rate itself %.2e", worst_vs_rate);
  return {worst <= 1e-12 && t < 1.0,
          format("(max |rate_FEM + rate_FDM| / (|xi|_max |sigma|_max L) = %.2e over %d states, tol 1e-12; "
                 "%.3f s, runtime limit 1 s)",
                 worst, evaluated, t)};
}

// 3. Flat topography: three modes agree and the hybrid energy is flat.
Verdict criterion3() {
  const PresetRun h = run_preset("flat.cfg", RunMode::hybrid, "flat_hybrid");
  const PresetRun fe = run_preset("flat.cfg", RunMode::fem, "flat_fem");
  const PresetRun fd = run_preset("flat.cfg", RunMode::fdm, "flat_fdm");
  if (!h.out.completed || !fe.out.completed || !fd.out.completed) return {false, "(a run did not complete)"};
  const double hf = compare_seismograms(h.out.traces[0], fe.out.traces[0]).relative_l2;
  const double hd = compare_seismograms(h.out.traces[0], fd.out.traces[0]).relative_l2;
  const double fefd = compare_seismograms(fe.out.traces[0], fd.out.traces[0]).relative_l2;
  const double t_end = h.out.energy.back().t;
  const double flat = flatness(h.out.energy, 0.5, t_end);
  note("3a relative L2: hybrid-fem %.3e, hybrid-fdm %.3e, fem-fdm %.3e (tol 0.02)", hf, hd, fefd);
  note("3b hybrid energy (max-min)/mean over [0.5, %.1f] s: %.3e (tol 1e-9)", t_end, flat);
  note("   diagnostic, not a criterion: over [0.6, %.1f] s %.3e; fem-only over [0.5, %.1f] s %.3e", t_end,
       flatness(h.out.energy, 0.6, t_end), t_end, flatness(fe.out.energy, 0.5, t_end));
  note("   hybrid total energy at 0.5 s %.15e, at %.1f s %.15e", h.out.energy[1000 / 10].total, t_end,
       h.out.energy.back().total);
  const bool a = hf <= 0.02 && hd <= 0.02 && fefd <= 0.02;
  const bool b = flat <= 1e-9;
  return {a && b, format("(3a %s: max pairwise relative L2 %.3e, tol 0.02; 3b %s: energy flatness %.3e, tol 1e-9)",
                         a ? "pass" : "fail", std::max({hf, hd, fefd}), b ? "pass" : "fail", flat)};
}

// 4. Scaled sinusoidal topography.
Verdict criterion4() {
  const PresetRun h = run_preset("sinusoidal_small.cfg", RunMode::hybrid, "sinusoidal_hybrid");
  const PresetRun fe = run_preset("sinusoidal_small.cfg", RunMode::fem, "sinusoidal_fem");
  if (!h.out.completed || !fe.out.completed) return {false, "(a run did not complete)"};
  const double l2 = compare_seismograms(h.out.traces[0], fe.out.traces[0]).relative_l2;
  const double t_end = h.out.energy.back().t;
  const double flat = flatness(h.out.energy, 0.5, t_end);
  note("4 hybrid energy (max-min)/mean over [0.5, %.2f] s: %.3e (tol 1e-9); diagnostic over [0.6, %.2f] s: %.3e",
       t_end, flat, t_end, flatness(h.out.energy, 0.6, t_end));
  const bool fast = h.out.wall_seconds < 300 && fe.out.wall_seconds < 300;
  const bool ok = flat <= 1e-9 && l2 <= 0.05 && fast;
  return {ok, format("(energy flatness %.3e, tol 1e-9; hybrid-fem relative L2 %.3e, tol 0.05; wall %.0f s and "
                     "%.0f s, limit 300 s each)",
                     flat, l2, h.out.wall_seconds, fe.out.wall_seconds)};
}

// Smooth random field: a few low wavenumbers with random amplitudes and phases.
struct BandLimited {
  double width, height;
  std::vector<std::array<double, 4>> terms;  // m, l, amplitude, phase

  BandLimited(double w, double h, std::mt19937& rng) : width(w), height(h) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int m = 0; m <= 3; ++m)
      for (int l = 0; l <= 3; ++l) terms.push_back({double(m), double(l), 2 * u(rng) - 1, 2 * std::numbers::pi * u(rng)});
  }
  double operator()(Point2 p) const {
    double v = 0.0;
    for (const auto& t : terms)
      v += t[2] * std::cos(2 * std::numbers::pi * (t[0] * p.x / width + t[1] * p.y / height) + t[3]);
    return v;
  }
};

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a[k] - b[k]));
  return m;
}

double max_abs(const std::vector<double>& a) {
  double m = 0.0;
  for (double x : a) m = std::max(m, std::abs(x));
  return m;
}

// 5. Time reversibility of the source-free hybrid scheme.
Verdict criterion5() {
  const auto t0 = Clock::now();
  RunConfig cfg = parse_config(kPresets / "flat.cfg");
  cfg.source.reset();
  cfg.receivers.clear();
  const ScenarioBuild b = build_scenario(cfg);
  const Simulation sim(b.setup, b.medium);
  const double w = cfg.nx * cfg.dx, h = (cfg.fem_ny + cfg.fdm_ny) * cfg.dx;
  std::mt19937 rng(55);
  HybridState s0 = sim.zero_state();
  const StaggeredLayout2D& l = sim.fdm().layout();
  const std::pair<std::vector<double>*, Subgrid> fdm_fields[] = {
      {&s0.fdm.vx, Subgrid::vx}, {&s0.fdm.vy, Subgrid::vy}, {&s0.fdm.sxx, Subgrid::sxx},
      {&s0.fdm.sxy, Subgrid::sxy}, {&s0.fdm.syy, Subgrid::syy}};
  for (auto [v, g] : fdm_fields) {
    const BandLimited f(w, h, rng);
    const SubgridShape sh = l.shape(g);
    for (int i = 0; i < sh.cols; ++i)
      for (int j = 0; j < sh.rows; ++j) (*v)[sh.index(i, j)] = f(l.point(g, i, j));
  }
  const int n = sim.fem().n_dofs();
  for (auto* v : {&s0.b, &s0.xi}) {
    for (int c = 0; c < 2; ++c) {
      const BandLimited f(w, h, rng);
      for (int a = 0; a < n; ++a) (*v)[c * n + a] = f(sim.fem().space().dof_points[a]);
    }
  }
  // scale b so that its strain energy is comparable to the kinetic energy
  for (double& x : s0.b) x *= 0.01;

  HybridState s = s0;
  for (int k = 0; k < 2000; ++k) sim.step(s);
  s = sim.reversed(s);
  for (int k = 0; k < 2000; ++k) sim.step(s);
  s = sim.reversed(s);

  double rel = 0.0;
  const std::pair<const std::vector<double>*, const std::vector<double>*> pairs[] = {
      {&s.fdm.vx, &s0.fdm.vx}, {&s.fdm.vy, &s0.fdm.vy}, {&s.fdm.sxx, &s0.fdm.sxx}, {&s.fdm.sxy, &s0.fdm.sxy},
      {&s.fdm.syy, &s0.fdm.syy}, {&s.b, &s0.b}, {&s.xi, &s0.xi}};
  for (auto [a, b0] : pairs) rel = std::max(rel, max_abs_diff(*a, *b0) / max_abs(*b0));
  const double t = seconds_since(t0);
  return {rel <= 1e-8 && t < 60.0,
          format("(max relative difference to the initial state %.3e over all fields, tol 1e-8; %.1f s, limit 60 s)",
                 rel, t)};
}

// Exact standing waves of the unit medium (rho 1, lambda 2, mu 1) with wavenumber k.
struct StandingWaves {
  double k;
  bool x_modes;  // include a P wave travelling in x (periodic runs only)

  void eval(Subgrid g, Point2 p, double t, double& v) const {
    const double lambda = 2.0, mu = 1.0, cp = 2.0, cs = 1.0;
    const double wp = cp * k, ws = cs * k;
    v = 0.0;
    // P along y (vy, syy, sxx) and S along y (vx, sxy)
    const double cy = std::cos(k * p.y), sy = std::sin(k * p.y);
    switch (g) {
      case Subgrid::vy: v += cy * std::cos(wp * t); break;
      case Subgrid::syy: v += -(lambda + 2 * mu) * k / wp * sy * std::sin(wp * t); break;
      case Subgrid::sxx: v += -lambda * k / wp * sy * std::sin(wp * t); break;
      case Subgrid::vx: v += cy * std::cos(ws * t); break;
      case Subgrid::sxy: v += -mu * k / ws * sy * std::sin(ws * t); break;
    }
    if (!x_modes) return;
    const double cx = std::cos(k * p.x), sx = std::sin(k * p.x);
    switch (g) {
      case Subgrid::vx: v += cx * std::cos(wp * t); break;
      case Subgrid::sxx: v += -(lambda + 2 * mu) * k / wp * sx * std::sin(wp * t); break;
      case Subgrid::syy: v += -lambda * k / wp * sx * std::sin(wp * t); break;
      default: break;
    }
  }
};

double standing_wave_error(int nx, int ny, double dx, TopBoundary top, const StandingWaves& w, int n_steps,
                           double t_end) {
  const auto layout = StaggeredLayout2D::make(nx, ny, dx, {0, 0}, top == TopBoundary::periodic);
  const FdmOperators ops(layout, constant_medium(1, 2, 1), top);
  const double dt = t_end / n_steps;
  FdmState s = FdmState::zeros(layout);
  auto fill = [&](std::vector<double>& v, Subgrid g, double t) {
    const SubgridShape sh = layout.shape(g);
    for (int i = 0; i < sh.cols; ++i)
      for (int j = 0; j < sh.rows; ++j) w.eval(g, layout.point(g, i, j), t, v[sh.index(i, j)]);
  };
  fill(s.vx, Subgrid::vx, -0.5 * dt);
  fill(s.vy, Subgrid::vy, -0.5 * dt);
  fill(s.sxx, Subgrid::sxx, 0.0);
  fill(s.sxy, Subgrid::sxy, 0.0);
  fill(s.syy, Subgrid::syy, 0.0);
  FdmState d = FdmState::zeros(layout);
  for (int n = 0; n < n_steps; ++n) {
    ops.velocity_rhs(s, d.vx, d.vy);
    for (std::size_t k = 0; k < s.vx.size(); ++k) s.vx[k] += dt * d.vx[k];
    for (std::size_t k = 0; k < s.vy.size(); ++k) s.vy[k] += dt * d.vy[k];
    ops.stress_rhs(s, {}, {}, d.sxx, d.sxy, d.syy);
    for (std::size_t k = 0; k < s.sxx.size(); ++k) s.sxx[k] += dt * d.sxx[k];
    for (std::size_t k = 0; k < s.sxy.size(); ++k) s.sxy[k] += dt * d.sxy[k];
    for (std::size_t k = 0; k < s.syy.size(); ++k) s.syy[k] += dt * d.syy[k];
  }
  FdmState e = FdmState::zeros(layout);
  fill(e.vx, Subgrid::vx, t_end - 0.5 * dt);
  fill(e.vy, Subgrid::vy, t_end - 0.5 * dt);
  fill(e.sxx, Subgrid::sxx, t_end);
  fill(e.sxy, Subgrid::sxy, t_end);
  fill(e.syy, Subgrid::syy, t_end);
  return std::max({max_abs_diff(s.vx, e.vx), max_abs_diff(s.vy, e.vy), max_abs_diff(s.sxx, e.sxx),
                   max_abs_diff(s.sxy, e.sxy), max_abs_diff(s.syy, e.syy)});
}

// 6. Convergence of the FDM scheme. Time steps shrink with dx^2 so that the
// second-order time error does not mask the spatial order.
Verdict criterion6() {
  const double t_end = 0.3;
  const int base_steps = 24;  // cp dt / dx = 0.4 at 16 cells
  std::vector<double> ep, ef;
  std::string rows;
  for (int level = 0; level < 4; ++level) {
    const int n = 16 << level;
    const int steps = base_steps << (2 * level);
    ep.push_back(standing_wave_error(n, n, 1.0 / n, TopBoundary::periodic, {2 * std::numbers::pi, true}, steps,
                                     t_end));
    ef.push_back(standing_wave_error(4, n, 1.0 / n, TopBoundary::free_surface, {2 * std::numbers::pi, false},
                                     steps, t_end));
    note("6 n=%3d: periodic max error %.3e, free-surface max error %.3e", n, ep.back(), ef.back());
  }
  for (std::size_t k = 1; k < ep.size(); ++k) {
    note("6 order %d->%d: periodic %.3f, free surface %.3f", 16 << (k - 1), 16 << k, std::log2(ep[k - 1] / ep[k]),
         std::log2(ef[k - 1] / ef[k]));
  }
  const double op = std::log2(ep[2] / ep[3]), of = std::log2(ef[2] / ef[3]);
  return {op >= 3.9 && of >= 2.0,
          format("(observed order on the finest pair: periodic %.3f, tol >= 3.9; free surface %.3f, tol >= 2.0)",
                 op, of)};
}

// 7. A too-large time step is caught.
Verdict criterion7() {
  RunConfig cfg = parse_config(kPresets / "flat.cfg");
  cfg.dt *= 10.0;
  const ScenarioBuild b = build_scenario(cfg);
  const Simulation sim(b.setup, b.medium);
  RunOptions opt;
  opt.n_steps = cfg.steps;
  opt.energy_stride = cfg.energy_stride;
  const RunOutputs out = run(sim, opt);
  const bool ok = !out.completed && out.failed_step >= 0 && out.failed_step < 500;
  return {ok, format("(%s at step %lld, limit 500: %s)", out.completed ? "completed" : "aborted",
                     static_cast<long long>(out.failed_step), out.completed ? "no error" : out.failure.c_str())};
}

}  // namespace

int main(int argc, char** argv) {
  std::string cli;
  std::set<int> wanted;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--cli" && i + 1 < argc) {
      cli = argv[++i];
    } else {
      wanted.insert(std::atoi(a.c_str()));
    }
  }
  if (wanted.empty()) wanted = {1, 2, 3, 4, 5, 6, 7};
  fs::create_directories(kOut);

  bool all = true;
  for (int n : wanted) {
    Verdict v;
    try {
      switch (n) {
        case 1: v = criterion1(cli); break;
        case 2: v = criterion2(); break;
        case 3: v = criterion3(); break;
        case 4: v = criterion4(); break;
        case 5: v = criterion5(); break;
        case 6: v = criterion6(); break;
        case 7: v = criterion7(); break;
        default: v = {false, "(unknown criterion)"};
      }
    } catch (const std::exception& e) {
      v = {false, std::string("(error: ") + e.what() + ")"};
    }
    report(n, v);
    all = all && v.pass;
  }
  return all ? 0 : 1;
}
