#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "hybridwave/geometry.hpp"

namespace hybridwave {

/// Regular sampling lattice of a gridded model: nx columns by ny rows,
/// spacing dx in both directions, node (0,0) at `origin`.
struct GridSpec {
  int nx = 0;
  int ny = 0;
  double dx = 0.0;
  Point2 origin{};

  bool operator==(const GridSpec&) const = default;
};

/// A scalar material field: either a constant or a table sampled on a
/// GridSpec. Tables are column-major with y varying fastest, i.e. the value of
/// node (ix, iy) lives at index ix * ny + iy. Off-node queries are bilinear and
/// clamp to the table boundary.
class ScalarField {
 public:
  ScalarField() = default;

  static ScalarField constant(double value);
  static ScalarField gridded(GridSpec spec, std::vector<double> values);

  double operator()(Point2 p) const;

  bool is_constant() const noexcept { return !gridded_; }
  const GridSpec& grid() const noexcept { return spec_; }
  /// The stored samples (a single value for constant fields).
  std::span<const double> samples() const noexcept { return values_; }

  /// Same field resampled onto `spec` node-by-node (used to bring constants
  /// onto a common table).
  ScalarField on_grid(const GridSpec& spec) const;

 private:
  bool gridded_ = false;
  GridSpec spec_{};
  std::vector<double> values_{0.0};
};

/// Reads nx*ny little-endian IEEE-754 float32 values, column-major with y
/// fastest. Other sample widths are rejected by the size check.
ScalarField load_gridded_model(const std::filesystem::path& path, const GridSpec& spec);

struct LameParameters {
  double rho = 0.0;
  double lambda = 0.0;
  double mu = 0.0;
};

/// Nonzero entries of the isotropic compliance tensor in 2D:
///   eps_xx = s_nn*sxx - s_nt*syy,  eps_yy = -s_nt*sxx + s_nn*syy,
///   eps_xy = s_shear*sxy.
struct ComplianceCoeffs {
  double s_nn = 0.0;
  double s_nt = 0.0;
  double s_shear = 0.0;
};

ComplianceCoeffs compliance_coefficients(double lambda, double mu);

class IsotropicMedium {
 public:
  IsotropicMedium(ScalarField density, ScalarField lambda, ScalarField mu);

  LameParameters at(Point2 p) const;
  ComplianceCoeffs compliance_at(Point2 p) const;

  const ScalarField& density() const noexcept { return rho_; }
  const ScalarField& lambda() const noexcept { return lambda_; }
  const ScalarField& mu() const noexcept { return mu_; }

  /// Non-fatal findings from construction (e.g. negative lambda).
  const std::vector<std::string>& diagnostics() const noexcept { return diagnostics_; }

 private:
  ScalarField rho_;
  ScalarField lambda_;
  ScalarField mu_;
  std::vector<std::string> diagnostics_;
};

/// lambda = rho (cp^2 - 2 cs^2), mu = rho cs^2, evaluated node-wise. Gridded
/// inputs must share one GridSpec; constants are broadcast onto it.
IsotropicMedium medium_from_velocities(const ScalarField& rho, const ScalarField& cp,
                                       const ScalarField& cs);

inline IsotropicMedium constant_medium(double rho, double cp, double cs) {
  return medium_from_velocities(ScalarField::constant(rho), ScalarField::constant(cp),
                                ScalarField::constant(cs));
}

}  // namespace hybridwave
