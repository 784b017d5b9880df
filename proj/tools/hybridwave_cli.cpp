// Command-line front end: simulate, compare, verify-operators.
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hybridwave/config.hpp"
#include "hybridwave/coupling.hpp"
#include "hybridwave/error.hpp"
#include "hybridwave/io.hpp"
#include "hybridwave/sbp1d.hpp"
#include "hybridwave/simulation.hpp"

namespace fs = std::filesystem;
using namespace hybridwave;

namespace {

int simulate(const std::string& config_path, const std::string& mode, const std::string& out_dir, int stride) {
  RunConfig cfg = parse_config(config_path);
  if (!mode.empty()) {
    cfg.mode = mode == "hybrid" ? RunMode::hybrid : mode == "fem" ? RunMode::fem : RunMode::fdm;
    if (cfg.mode == RunMode::fdm && cfg.scenario != Scenario::flat) {
      throw Error(ErrorKind::construction, "fdm mode is only available for the flat scenario");
    }
  }
  if (stride > 0) cfg.energy_stride = stride;

  ScenarioBuild build = build_scenario(cfg);
  const Simulation sim(build.setup, build.medium);
  for (const std::string& w : sim.warnings()) std::cerr << "warning: " << w << "\n";
  for (const std::string& w : build.medium.diagnostics()) std::cerr << "note: " << w << "\n";

  fs::create_directories(out_dir);
  RunOptions opt;
  opt.n_steps = cfg.steps;
  opt.energy_stride = cfg.energy_stride;
  opt.snapshot_stride = cfg.snapshot_stride;
  if (cfg.snapshot_stride > 0 && sim.has_fdm()) {
    opt.on_snapshot = [&](const HybridState& s) {
      char name[64];
      std::snprintf(name, sizeof name, "snapshot_%08lld.bin", static_cast<long long>(s.step));
      write_fdm_snapshot(fs::path(out_dir) / name, s.fdm, sim.fdm().layout(), s.step * sim.dt(), s.step);
    };
  }
  std::cerr << "running " << cfg.steps << " steps in " << to_string(cfg.mode) << " mode\n";
  const RunOutputs out = run(sim, opt);

  write_seismogram(out, fs::path(out_dir) / "seismogram.csv");
  write_energy(out, fs::path(out_dir) / "energy.csv");
  ManifestInfo info;
  info.config_text = cfg.to_text();
  info.mode = to_string(cfg.mode);
  info.steps_requested = cfg.steps;
  info.warnings = sim.warnings();
  write_manifest(out, info, fs::path(out_dir) / "manifest.txt");
  std::cerr << "wall time " << out.wall_seconds << " s\n";
  if (!out.completed) {
    std::cerr << "error: " << out.failure << "\n";
    return 3;
  }
  return 0;
}

int compare(const std::string& a_path, const std::string& b_path) {
  const CsvTable a = read_csv(a_path), b = read_csv(b_path);
  if (a.columns.size() != b.columns.size()) throw Error(ErrorKind::size_mismatch, "tables have different columns");
  std::printf("%-10s %-24s %-24s %s\n", "column", "relative_l2", "max_abs_diff", "lag");
  for (std::size_t c = 1; c < a.columns.size(); ++c) {
    const SeismogramComparison r = compare_seismograms(a.columns[c], b.columns[c]);
    std::printf("%-10s %-24.17g %-24.17g %d\n", a.header[c].c_str(), r.relative_l2, r.max_abs_diff, r.lag);
  }
  return 0;
}

int verify_operators(const std::vector<int>& sizes, const std::vector<int>& elements) {
  bool ok = true;
  auto report = [&](const std::string& what, double residual, double tol, bool exact) {
    const bool pass = exact ? residual == 0.0 : residual <= tol;
    ok = ok && pass;
    if (exact) {
      std::printf("%-44s residual %.3e  tol exact    %s\n", what.c_str(), residual, pass ? "PASS" : "FAIL");
    } else {
      std::printf("%-44s residual %.3e  tol %.1e  %s\n", what.c_str(), residual, tol, pass ? "PASS" : "FAIL");
    }
  };
  for (double dx : {1.0, 0.005}) {
    for (int n : sizes) {
      char label[96];
      std::snprintf(label, sizeof label, "periodic SBP n_cells=%d dx=%g", n, dx);
      report(label, sbp_identity_residual(periodic_staggered_pair(n, dx)), 0.0, true);
      std::snprintf(label, sizeof label, "bounded SBP n_cells=%d dx=%g", n, dx);
      report(label, sbp_identity_residual(bounded_staggered_pair(n, dx)), 1e-14 / dx, false);
    }
  }
  for (Quadrature q : {Quadrature::gauss3, Quadrature::gll3}) {
    for (int n : elements) {
      const InterfaceOperators ops = build_interface_operators(q, n, 0.005);
      char label[96];
      std::snprintf(label, sizeof label, "interface compatibility %s n_elements=%d", to_string(q), n);
      report(label, compatibility_residual(ops), 1e-14, false);
    }
  }
  std::printf("%s\n", ok ? "all residuals pass" : "some residuals FAIL");
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Coupled finite-element / finite-difference elastic wave solver"};
  app.require_subcommand(1);

  std::string config, mode, out_dir = "out";
  int stride = 0;
  auto* sim = app.add_subcommand("simulate", "run a configuration and write CSV outputs");
  sim->add_option("config", config, "configuration file")->required()->check(CLI::ExistingFile);
  sim->add_option("--mode", mode, "override the run mode")->check(CLI::IsMember({"hybrid", "fem", "fdm"}));
  sim->add_option("--out", out_dir, "output directory");
  sim->add_option("--energy-stride", stride, "energy sampling stride")->check(CLI::PositiveNumber);

  std::string a_path, b_path;
  auto* cmp = app.add_subcommand("compare", "compare two seismogram CSV files column by column");
  cmp->add_option("a", a_path)->required()->check(CLI::ExistingFile);
  cmp->add_option("b", b_path)->required()->check(CLI::ExistingFile);

  std::vector<int> sizes{8, 16, 33, 100}, elements{4, 7, 200};
  auto* ver = app.add_subcommand("verify-operators", "check the SBP and interface operator identities");
  ver->add_option("--sizes", sizes, "n_cells values for the SBP checks");
  ver->add_option("--elements", elements, "n_elements values for the interface checks");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*sim) return simulate(config, mode, out_dir, stride);
    if (*cmp) return compare(a_path, b_path);
    if (*ver) return verify_operators(sizes, elements);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
