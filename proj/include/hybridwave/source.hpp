#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>

#include "hybridwave/fdm.hpp"
#include "hybridwave/fem.hpp"
#include "hybridwave/geometry.hpp"

namespace hybridwave {

/// A(t) = (1 - 2 pi^2 f^2 s^2) exp(-pi^2 f^2 s^2), s = t - t0.
double ricker(double t, double f, double t0);
/// Integral of ricker() from 0 to t, in closed form: s exp(-pi^2 f^2 s^2) + t0 exp(-pi^2 f^2 t0^2).
double ricker_integral(double t, double f, double t0);
/// The antiderivative s exp(-pi^2 f^2 s^2) that vanishes for t -> +-inf.
/// Differs from ricker_integral by the constant t0 exp(-pi^2 f^2 t0^2).
double ricker_antiderivative(double t, double f, double t0);

/// Explosive point source acting on both normal stresses.
struct RickerSource {
  double frequency = 5.0;
  double delay = 0.25;
  double amplitude = 1.0;
  Point2 location;

  double value(double t) const { return amplitude * ricker(t, frequency, delay); }
  double antiderivative(double t) const { return amplitude * ricker_antiderivative(t, frequency, delay); }
};

/// Throws a construction error for f <= 0 or t0 <= 0. Returns a warning
/// message when |A(0)| exceeds 1e-4 of the peak.
std::optional<std::string> check_source(const RickerSource& s);

struct Receiver {
  Point2 location;
};

/// FDM handle: adds amplitude A(t) dt / dx^2 to sxx and syy at one point.
struct FdmSourceHandle {
  int index = -1;
  double scale = 0.0;  // dt / dx^2
};
FdmSourceHandle place_fdm_source(const FdmOperators& ops, Point2 p, double dt);
void inject_fdm(const FdmSourceHandle& h, double amplitude_at_t, FdmState& s);

/// FEM handle: the source point's basis gradients. The FDM source acts on the
/// stress rate, so the displacement form sees its time integral: the force is
/// -G(t) grad(phi_a)(x0) with G = ricker_antiderivative, which leaves no static
/// load behind once the wavelet has passed.
struct FemSourceHandle {
  std::array<int, 9> dofs{};
  std::array<Point2, 9> grad{};
};
FemSourceHandle place_fem_source(const FemSystem& sys, Point2 p);
/// f[a] -= g * dphi_a/dx, f[n + a] -= g * dphi_a/dy
void inject_fem(const FemSourceHandle& h, double g_at_t, int n_dofs, std::span<double> f);

}  // namespace hybridwave
