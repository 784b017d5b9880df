#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "hybridwave/error.hpp"
#include "hybridwave/simulation.hpp"

using namespace hybridwave;
using Catch::Approx;

namespace {

const IsotropicMedium unit = constant_medium(1, 2, 1);

// 16-cell wide strip: 12 FDM rows under 4 element rows, dx = 1.
SimulationSetup small_setup(RunMode mode = RunMode::hybrid, Quadrature q = Quadrature::gauss3) {
  SimulationSetup s;
  s.mode = mode;
  s.dt = 0.05;
  s.quadrature = q;
  if (mode == RunMode::fdm) {
    s.fdm_layout = StaggeredLayout2D::make(16, 16, 1.0, {0, 0});
  } else if (mode == RunMode::fem) {
    s.fem_mesh = structured_mesh(16, 16, 1.0, {0, 0});
  } else {
    s.fdm_layout = StaggeredLayout2D::make(16, 12, 1.0, {0, 0});
    s.fem_mesh = structured_mesh(16, 4, 1.0, {0, 12});
  }
  return s;
}

HybridState random_state(const Simulation& sim, std::uint32_t seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(-1, 1);
  HybridState s = sim.zero_state();
  for (auto* v : {&s.fdm.vx, &s.fdm.vy, &s.fdm.sxx, &s.fdm.sxy, &s.fdm.syy, &s.b, &s.xi})
    for (double& x : *v) x = u(rng);
  return s;
}

double max_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a[k] - b[k]));
  return m;
}

double max_abs(const std::vector<double>& a) {
  double m = 0.0;
  for (double x : a) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

TEST_CASE("construction by mode", "[simulation]") {
  for (RunMode m : {RunMode::hybrid, RunMode::fem, RunMode::fdm}) {
    const Simulation sim(small_setup(m), unit);
    CHECK(sim.has_fdm() == (m != RunMode::fem));
    CHECK(sim.has_fem() == (m != RunMode::fdm));
  }
  SimulationSetup bad = small_setup();
  bad.dt = 0.0;
  CHECK_THROWS_AS(Simulation(bad, unit), Error);
  bad = small_setup();
  bad.fem_mesh = structured_mesh(16, 4, 1.0, {0, 11});
  CHECK_THROWS_AS(Simulation(bad, unit), Error);
  bad = small_setup();
  bad.fem_mesh = structured_mesh(15, 4, 1.0, {0, 12});
  CHECK_THROWS_AS(Simulation(bad, unit), Error);
}

TEST_CASE("rest is a fixed point", "[simulation]") {
  const Simulation sim(small_setup(), unit);
  HybridState s = sim.zero_state();
  for (int k = 0; k < 50; ++k) sim.step(s);
  CHECK(s.step == 50);
  CHECK(max_abs(s.b) == 0.0);
  CHECK(max_abs(s.xi) == 0.0);
  CHECK(max_abs(s.fdm.vx) == 0.0);
  CHECK(max_abs(s.fdm.syy) == 0.0);
}

TEST_CASE("disturbances travel at most one stencil per step", "[simulation]") {
  SimulationSetup setup = small_setup();
  setup.sources.push_back({5.0, 0.25, 1.0, {8.5, 2.5}});
  const Simulation sim(setup, unit);
  HybridState s = sim.zero_state();
  sim.step(s);
  sim.step(s);
  // the first step only deposits stress at the source; the second moves it
  // through one velocity and one stress stencil, two cells each
  CHECK(max_abs(s.b) == 0.0);
  CHECK(max_abs(s.xi) == 0.0);
  CHECK(max_abs(s.fdm.syy) > 0.0);
  const StaggeredLayout2D& l = sim.fdm().layout();
  const SubgridShape sh = l.shape(Subgrid::syy);
  for (int i = 0; i < sh.cols; ++i) {
    for (int j = 0; j < sh.rows; ++j) {
      const Point2 p = l.point(Subgrid::syy, i, j);
      if (std::abs(p.x - 8.5) > 4.0 || std::abs(p.y - 2.5) > 4.0) CHECK(s.fdm.syy[sh.index(i, j)] == 0.0);
    }
  }
}

TEST_CASE("leapfrog runs backwards", "[simulation]") {
  for (Quadrature q : {Quadrature::gauss3, Quadrature::gll3}) {
    const Simulation sim(small_setup(RunMode::hybrid, q), unit);
    const HybridState s0 = random_state(sim, 21);
    HybridState s = s0;
    for (int k = 0; k < 100; ++k) sim.step(s);
    s = sim.reversed(s);
    for (int k = 0; k < 100; ++k) sim.step(s);
    s = sim.reversed(s);
    const double scale = max_abs(s0.fdm.sxx);
    CHECK(max_diff(s.fdm.sxx, s0.fdm.sxx) <= 1e-10 * scale);
    CHECK(max_diff(s.fdm.vy, s0.fdm.vy) <= 1e-10 * scale);
    CHECK(max_diff(s.b, s0.b) <= 1e-10 * scale);
    CHECK(max_diff(s.xi, s0.xi) <= 1e-10 * scale);
  }
}

TEST_CASE("interface exchange neither creates nor destroys energy", "[simulation]") {
  for (Quadrature q : {Quadrature::gauss3, Quadrature::gll3}) {
    const Simulation sim(small_setup(RunMode::hybrid, q), unit);
    for (std::uint32_t seed = 1; seed <= 20; ++seed) {
      const auto [fem, fdm] = sim.interface_rates(random_state(sim, seed));
      CHECK(std::abs(fem + fdm) <= 1e-12 * std::max(std::abs(fem), 1.0));
    }
  }
}

TEST_CASE("free evolution conserves the discrete energy", "[simulation]") {
  for (RunMode m : {RunMode::hybrid, RunMode::fem, RunMode::fdm}) {
    const Simulation sim(small_setup(m), unit);
    HybridState s = random_state(sim, 4);
    const double e0 = sim.energy_at(s).total;
    for (int k = 0; k < 200; ++k) sim.step(s);
    CHECK(sim.energy_at(s).total == Approx(e0).epsilon(1e-11));
  }
}

TEST_CASE("zero steps", "[simulation]") {
  SimulationSetup setup = small_setup();
  setup.receivers.push_back({{3.0, 14.0}});
  const Simulation sim(setup, unit);
  RunOptions opt;
  opt.n_steps = 0;
  const RunOutputs out = run(sim, opt);
  CHECK(out.completed);
  CHECK(out.seismogram_time.empty());
  REQUIRE(out.traces.size() == 1);
  CHECK(out.traces[0].empty());
  REQUIRE(out.energy.size() == 1);
  CHECK(out.energy[0].total == 0.0);
}

TEST_CASE("run outputs: sizes, timing and determinism", "[simulation]") {
  SimulationSetup setup = small_setup();
  setup.sources.push_back({2.0, 0.5, 1.0, {8.5, 6.5}});
  setup.receivers.push_back({{4.0, 14.5}});
  setup.receivers.push_back({{12.0, 3.0}});
  const Simulation sim(setup, unit);
  RunOptions opt;
  opt.n_steps = 40;
  opt.energy_stride = 7;
  const RunOutputs a = run(sim, opt), b = run(sim, opt);
  REQUIRE(a.seismogram_time.size() == 40);
  CHECK(a.seismogram_time[0] == Approx(0.5 * setup.dt));
  CHECK(a.energy.size() == 40 / 7 + 1);
  CHECK(a.energy[1].t == Approx(7 * setup.dt));
  CHECK(a.traces == b.traces);
  CHECK(max_abs(a.traces[0]) > 0.0);
  CHECK(max_abs(a.traces[1]) > 0.0);
}

TEST_CASE("superposition of sources", "[simulation]") {
  auto traces = [](std::vector<RickerSource> src) {
    SimulationSetup setup = small_setup();
    setup.sources = std::move(src);
    setup.receivers.push_back({{4.0, 14.5}});
    const Simulation sim(setup, unit);
    RunOptions opt;
    opt.n_steps = 60;
    opt.energy_stride = 60;
    return run(sim, opt).traces[0];
  };
  const RickerSource a{2.0, 0.5, 1.0, {8.5, 6.5}}, b{3.0, 0.4, -0.5, {5.0, 14.0}};
  RickerSource a2 = a;
  a2.amplitude = 2.0;
  const std::vector<double> ta = traces({a}), tb = traces({b}), tab = traces({a, b}), t2 = traces({a2});
  const double scale = max_abs(tab);
  for (std::size_t k = 0; k < ta.size(); ++k) {
    CHECK(tab[k] == Approx(ta[k] + tb[k]).margin(1e-12 * scale));
    CHECK(t2[k] == Approx(2.0 * ta[k]).margin(1e-12 * scale));
  }
}

TEST_CASE("an unstable run stops with a report", "[simulation]") {
  SimulationSetup setup = small_setup();
  setup.dt = 2.0;
  setup.sources.push_back({2.0, 0.5, 1.0, {8.5, 6.5}});
  const Simulation sim(setup, unit);
  RunOptions opt;
  opt.n_steps = 5000;
  const RunOutputs out = run(sim, opt);
  CHECK_FALSE(out.completed);
  CHECK(out.failed_step > 0);
  CHECK(out.failed_step < 5000);
  CHECK_FALSE(out.failure.empty());
}

TEST_CASE("sources outside every region are rejected", "[simulation]") {
  SimulationSetup setup = small_setup();
  setup.sources.push_back({2.0, 0.5, 1.0, {8.5, 30.0}});
  CHECK_THROWS_AS(Simulation(setup, unit), Error);
}
