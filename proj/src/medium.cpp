#include "hybridwave/medium.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

#include "hybridwave/error.hpp"

namespace hybridwave {

namespace {

// Lower node index and fractional offset along one table axis, clamped.
std::pair<int, double> locate_axis(double coord, double origin, double dx, int n) {
  if (n == 1) return {0, 0.0};
  double f = std::clamp((coord - origin) / dx, 0.0, static_cast<double>(n - 1));
  int i = std::min(static_cast<int>(std::floor(f)), n - 2);
  return {i, f - i};
}

void check_spec(const GridSpec& spec) {
  if (spec.nx < 1 || spec.ny < 1 || !(spec.dx > 0.0)) {
    throw Error(ErrorKind::format, "gridded model needs nx, ny >= 1 and dx > 0");
  }
}

}  // namespace

ScalarField ScalarField::constant(double value) {
  ScalarField f;
  f.values_ = {value};
  return f;
}

ScalarField ScalarField::gridded(GridSpec spec, std::vector<double> values) {
  check_spec(spec);
  if (values.size() != static_cast<std::size_t>(spec.nx) * spec.ny) {
    throw Error(ErrorKind::format, "table size does not match nx*ny");
  }
  for (double v : values) {
    if (!std::isfinite(v)) throw Error(ErrorKind::data, "non-finite value in gridded model");
  }
  ScalarField f;
  f.gridded_ = true;
  f.spec_ = spec;
  f.values_ = std::move(values);
  return f;
}

double ScalarField::operator()(Point2 p) const {
  if (!gridded_) return values_[0];
  auto [ix, tx] = locate_axis(p.x, spec_.origin.x, spec_.dx, spec_.nx);
  auto [iy, ty] = locate_axis(p.y, spec_.origin.y, spec_.dx, spec_.ny);
  const int ny = spec_.ny;
  auto at = [&](int i, int j) { return values_[static_cast<std::size_t>(i) * ny + j]; };
  const int ix1 = std::min(ix + 1, spec_.nx - 1);
  const int iy1 = std::min(iy + 1, spec_.ny - 1);
  return (1 - tx) * (1 - ty) * at(ix, iy) + tx * (1 - ty) * at(ix1, iy) +
         (1 - tx) * ty * at(ix, iy1) + tx * ty * at(ix1, iy1);
}

ScalarField ScalarField::on_grid(const GridSpec& spec) const {
  if (gridded_ && spec_ == spec) return *this;
  std::vector<double> out(static_cast<std::size_t>(spec.nx) * spec.ny);
  for (int i = 0; i < spec.nx; ++i) {
    for (int j = 0; j < spec.ny; ++j) {
      out[static_cast<std::size_t>(i) * spec.ny + j] =
          (*this)({spec.origin.x + i * spec.dx, spec.origin.y + j * spec.dx});
    }
  }
  return gridded(spec, std::move(out));
}

ScalarField load_gridded_model(const std::filesystem::path& path, const GridSpec& spec) {
  check_spec(spec);
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::io, "cannot open " + path.string());
  std::vector<char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  const std::size_t count = static_cast<std::size_t>(spec.nx) * spec.ny;
  if (bytes.size() != count * 4) {
    std::ostringstream msg;
    msg << path.string() << ": expected " << count * 4 << " bytes (" << spec.nx << "x" << spec.ny
        << " float32), found " << bytes.size();
    throw Error(ErrorKind::format, msg.str());
  }
  std::vector<double> values(count);
  for (std::size_t k = 0; k < count; ++k) {
    std::uint32_t raw = 0;
    for (int b = 3; b >= 0; --b) {
      raw = (raw << 8) | static_cast<unsigned char>(bytes[4 * k + b]);
    }
    values[k] = std::bit_cast<float>(raw);
    if (!std::isfinite(values[k])) {
      throw Error(ErrorKind::data, path.string() + ": non-finite sample at index " +
                                       std::to_string(k));
    }
  }
  return ScalarField::gridded(spec, std::move(values));
}

ComplianceCoeffs compliance_coefficients(double lambda, double mu) {
  const double denom = 4.0 * mu * (lambda + mu);
  if (mu == 0.0 || lambda + mu == 0.0) {
    throw Error(ErrorKind::singular_constitutive, "mu = 0 or lambda + mu = 0");
  }
  return {(lambda + 2.0 * mu) / denom, lambda / denom, 1.0 / (2.0 * mu)};
}

IsotropicMedium::IsotropicMedium(ScalarField density, ScalarField lambda, ScalarField mu)
    : rho_(std::move(density)), lambda_(std::move(lambda)), mu_(std::move(mu)) {
  // Every field is checked at its own samples and, when gridded, at the
  // samples of the others so that mixed tables are covered too.
  std::vector<Point2> probes;
  for (const ScalarField* f : {&rho_, &lambda_, &mu_}) {
    if (f->is_constant()) continue;
    const GridSpec& g = f->grid();
    for (int i = 0; i < g.nx; ++i)
      for (int j = 0; j < g.ny; ++j) probes.push_back({g.origin.x + i * g.dx, g.origin.y + j * g.dx});
  }
  if (probes.empty()) probes.push_back({0.0, 0.0});

  bool negative_lambda = false;
  for (Point2 p : probes) {
    const double r = rho_(p), l = lambda_(p), m = mu_(p);
    if (!(r > 0.0)) throw Error(ErrorKind::invalid_medium, "density must be positive");
    if (!(m > 0.0)) throw Error(ErrorKind::invalid_medium, "shear modulus must be positive");
    if (!(l + 2.0 * m > 0.0)) throw Error(ErrorKind::invalid_medium, "lambda + 2 mu must be positive");
    if (!(l + m > 0.0)) throw Error(ErrorKind::invalid_medium, "lambda + mu must be positive");
    negative_lambda = negative_lambda || l < 0.0;
  }
  if (negative_lambda) {
    diagnostics_.push_back("lambda < 0 somewhere in the medium (cp < sqrt(2) cs); admissible since lambda + mu > 0");
  }
}

LameParameters IsotropicMedium::at(Point2 p) const { return {rho_(p), lambda_(p), mu_(p)}; }

ComplianceCoeffs IsotropicMedium::compliance_at(Point2 p) const {
  return compliance_coefficients(lambda_(p), mu_(p));
}

IsotropicMedium medium_from_velocities(const ScalarField& rho, const ScalarField& cp,
                                       const ScalarField& cs) {
  const ScalarField* table = nullptr;
  for (const ScalarField* f : {&rho, &cp, &cs}) {
    if (f->is_constant()) continue;
    if (table && !(table->grid() == f->grid())) {
      throw Error(ErrorKind::invalid_medium, "gridded rho/cp/cs must share one grid");
    }
    table = f;
  }

  auto check = [](const ScalarField& f, const char* name) {
    for (double v : f.samples()) {
      if (!(v > 0.0)) throw Error(ErrorKind::invalid_medium, std::string(name) + " must be positive");
    }
  };
  check(rho, "density");
  check(cp, "cp");
  for (double v : cs.samples()) {
    if (!(v >= 0.0)) throw Error(ErrorKind::invalid_medium, "cs must be non-negative");
  }

  if (!table) {
    const double r = rho.samples()[0], p = cp.samples()[0], s = cs.samples()[0];
    return IsotropicMedium(ScalarField::constant(r), ScalarField::constant(r * (p * p - 2.0 * s * s)),
                           ScalarField::constant(r * s * s));
  }

  const GridSpec spec = table->grid();
  ScalarField r = rho.on_grid(spec), p = cp.on_grid(spec), s = cs.on_grid(spec);
  const std::size_t count = r.samples().size();
  std::vector<double> lambda(count), mu(count);
  for (std::size_t k = 0; k < count; ++k) {
    const double rk = r.samples()[k], pk = p.samples()[k], sk = s.samples()[k];
    lambda[k] = rk * (pk * pk - 2.0 * sk * sk);
    mu[k] = rk * sk * sk;
  }
  return IsotropicMedium(std::move(r), ScalarField::gridded(spec, std::move(lambda)),
                         ScalarField::gridded(spec, std::move(mu)));
}

}  // namespace hybridwave
