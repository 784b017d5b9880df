#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "hybridwave/fem.hpp"
#include "hybridwave/medium.hpp"
#include "hybridwave/simulation.hpp"

namespace hybridwave {

enum class Scenario { flat, sinusoidal, custom };

struct MediumConfig {
  bool gridded = false;
  double rho = 0.0, cp = 0.0, cs = 0.0;
  std::filesystem::path rho_file, cp_file, cs_file;
  GridSpec grid;
};

struct SourceConfig {
  double x = 0.0;
  std::optional<double> y;      // absolute height
  std::optional<double> depth;  // below the local top surface
  double frequency = 0.0;
  double delay = 0.0;
  double amplitude = 1.0;
};

/// Sections and keys:
///   [run]       scenario, mode, dt, steps, energy_stride, snapshot_stride
///   [geometry]  nx, dx, fem_ny, fdm_ny, amplitude_fraction, jitter, seed, mesh_file
///   [medium]    type (constant|gridded), rho, cp, cs, rho_file, cp_file, cs_file,
///               grid_nx, grid_ny, grid_dx, grid_origin
///   [fem]       quadrature (gauss3|gll3)
///   [source]    x, y | depth, frequency, delay, amplitude
///   [receivers] point = x, y   (repeatable)
struct RunConfig {
  Scenario scenario = Scenario::flat;
  RunMode mode = RunMode::hybrid;
  double dt = 0.0;
  std::int64_t steps = 0;
  int energy_stride = 1;
  int snapshot_stride = 0;

  int nx = 0;
  double dx = 0.0;
  int fem_ny = 0;
  int fdm_ny = 0;
  double amplitude_fraction = 0.0;
  double jitter = 0.1;
  std::uint32_t seed = 20240611;
  std::filesystem::path mesh_file;

  MediumConfig medium;
  Quadrature quadrature = Quadrature::gauss3;
  std::optional<SourceConfig> source;
  std::vector<Point2> receivers;

  /// Canonical text of this configuration, itself parseable.
  std::string to_text() const;
};

RunConfig parse_config(const std::filesystem::path& path);
/// Relative file names are resolved against base_dir.
RunConfig parse_config_text(const std::string& text, const std::filesystem::path& base_dir = {});

const char* to_string(Scenario s);
const char* to_string(Quadrature q);

/// Height of the free top surface above x for the configured geometry.
double top_surface(const RunConfig& cfg, double x);

struct ScenarioBuild {
  SimulationSetup setup;
  IsotropicMedium medium;
};

/// Meshes, layout, medium, source and receivers for the configured mode.
ScenarioBuild build_scenario(const RunConfig& cfg);

}  // namespace hybridwave
