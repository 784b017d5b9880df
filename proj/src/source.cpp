#include "hybridwave/source.hpp"

#include <cmath>
#include <numbers>

#include "hybridwave/error.hpp"

namespace hybridwave {

namespace {

double gauss_arg(double s, double f) {
  const double a = std::numbers::pi * f * s;
  return a * a;
}

}  // namespace

double ricker(double t, double f, double t0) {
  const double g = gauss_arg(t - t0, f);
  return (1.0 - 2.0 * g) * std::exp(-g);
}

double ricker_integral(double t, double f, double t0) {
  const double s = t - t0;
  return s * std::exp(-gauss_arg(s, f)) + t0 * std::exp(-gauss_arg(t0, f));
}

double ricker_antiderivative(double t, double f, double t0) {
  const double s = t - t0;
  return s * std::exp(-gauss_arg(s, f));
}

std::optional<std::string> check_source(const RickerSource& s) {
  if (!(s.frequency > 0.0)) throw Error(ErrorKind::construction, "source frequency must be positive");
  if (!(s.delay > 0.0)) throw Error(ErrorKind::construction, "source delay must be positive");
  const double a0 = std::abs(ricker(0.0, s.frequency, s.delay));
  if (a0 > 1e-4) {
    return "source wavelet is not negligible at t = 0 (|A(0)| = " + std::to_string(a0) + ")";
  }
  return std::nullopt;
}

FdmSourceHandle place_fdm_source(const FdmOperators& ops, Point2 p, double dt) {
  const double dx = ops.layout().dx();
  return {ops.nearest_stress_index(p), dt / (dx * dx)};
}

void inject_fdm(const FdmSourceHandle& h, double amplitude_at_t, FdmState& s) {
  const double v = amplitude_at_t * h.scale;
  s.sxx[h.index] += v;
  s.syy[h.index] += v;
}

FemSourceHandle place_fem_source(const FemSystem& sys, Point2 p) {
  PointLocation loc;
  try {
    loc = locate_point(sys.mesh(), p);
  } catch (const Error& e) {
    throw Error(ErrorKind::placement, std::string("source outside the FEM region: ") + e.what());
  }
  FemSourceHandle h;
  h.dofs = sys.space().element_dofs[loc.element];
  h.grad = basis_gradients(sys.mesh(), loc);
  return h;
}

void inject_fem(const FemSourceHandle& h, double g_at_t, int n_dofs, std::span<double> f) {
  for (int a = 0; a < 9; ++a) {
    f[h.dofs[a]] -= g_at_t * h.grad[a].x;
    f[n_dofs + h.dofs[a]] -= g_at_t * h.grad[a].y;
  }
}

}  // namespace hybridwave
