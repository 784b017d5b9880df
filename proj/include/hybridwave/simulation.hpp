#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "hybridwave/coupling.hpp"
#include "hybridwave/fdm.hpp"
#include "hybridwave/fem.hpp"
#include "hybridwave/medium.hpp"
#include "hybridwave/mesh.hpp"
#include "hybridwave/source.hpp"

namespace hybridwave {

enum class RunMode { hybrid, fem, fdm };

const char* to_string(RunMode m);

/// Everything needed to build a discretisation. In hybrid mode the FDM top is
/// the interface and the mesh's interface edges must sit on it; in fem mode
/// only the mesh is used (free top and bottom); in fdm mode only the layout
/// (free top and bottom).
struct SimulationSetup {
  RunMode mode = RunMode::hybrid;
  double dt = 0.0;
  std::optional<StaggeredLayout2D> fdm_layout;
  std::optional<QuadMesh> fem_mesh;
  Quadrature quadrature = Quadrature::gauss3;
  std::vector<RickerSource> sources;
  std::vector<Receiver> receivers;
};

/// Stresses and b at the integer level `step`; FDM velocities and xi at
/// step - 1/2.
struct HybridState {
  std::int64_t step = 0;
  FdmState fdm;
  std::vector<double> b, xi;
};

struct EnergySample {
  double t = 0.0;
  double fem_kinetic = 0.0, fem_potential = 0.0;
  double fdm_kinetic = 0.0, fdm_potential = 0.0;
  double total = 0.0;        // staggered-product kinetic form
  double total_naive = 0.0;  // kinetic energy of the averaged velocities
};

class Simulation {
 public:
  Simulation(const SimulationSetup& setup, const IsotropicMedium& medium);

  RunMode mode() const noexcept { return mode_; }
  double dt() const noexcept { return dt_; }
  bool has_fdm() const noexcept { return fdm_ != nullptr; }
  bool has_fem() const noexcept { return fem_ != nullptr; }
  const FdmOperators& fdm() const { return *fdm_; }
  const FemSystem& fem() const { return *fem_; }
  const FemInterface& fem_interface() const { return *iface_; }
  const InterfaceOperators& coupling() const { return *coupling_; }
  std::size_t receiver_count() const noexcept { return receivers_.size(); }
  const std::vector<std::string>& warnings() const noexcept { return warnings_; }

  HybridState zero_state() const;

  /// One leapfrog step, state level i_t -> i_t + 1. When `energy` is given it
  /// receives the energies at level i_t. Throws UnstableRunError on NaN/Inf.
  void step(HybridState& s, EnergySample* energy = nullptr) const;

  /// Energies at the state's current level (advances a copy by one step).
  EnergySample energy_at(const HybridState& s) const;

  /// Receiver v_y values of the current half-step velocities.
  std::vector<double> record(const HybridState& s) const;

  /// State for running backwards: same stresses and b, velocities and xi
  /// replaced by minus their values at step + 1/2.
  HybridState reversed(const HybridState& s) const;

  /// FEM and FDM interface energy rates for the tractions of s and the
  /// velocities xi of s, evaluated with the exchanged vectors. Their sum
  /// vanishes identically.
  std::pair<double, double> interface_rates(const HybridState& s) const;

 private:
  struct SourceBinding {
    RickerSource src;
    bool in_fdm = false;
    FdmSourceHandle fdm;
    FemSourceHandle fem;
  };
  struct ReceiverBinding {
    bool in_fdm = false;
    int fdm_index = -1;
    PointLocation fem_loc;
  };
  struct Workspace {
    std::vector<double> kb, rhs, p;
    std::vector<double> dvx, dvy, dsxx, dsxy, dsyy;
    std::vector<double> sxy_q, syy_q, vx_q, vy_q, vx_n, vy_m;
  };

  bool in_fdm_region(Point2 p) const;

  RunMode mode_;
  double dt_;
  std::unique_ptr<FdmOperators> fdm_;
  std::unique_ptr<FemSystem> fem_;
  std::unique_ptr<FemInterface> iface_;
  std::unique_ptr<InterfaceOperators> coupling_;
  std::vector<SourceBinding> sources_;
  std::vector<ReceiverBinding> receivers_;
  std::vector<std::string> warnings_;
  mutable Workspace ws_;
};

struct RunOptions {
  std::int64_t n_steps = 0;
  int energy_stride = 1;
  int snapshot_stride = 0;  // 0 disables snapshots
  std::function<void(const HybridState&)> on_snapshot;
};

struct RunOutputs {
  std::vector<double> seismogram_time;
  std::vector<std::vector<double>> traces;  // one per receiver
  std::vector<EnergySample> energy;
  bool completed = true;
  std::int64_t failed_step = -1;
  std::string failure;
  double wall_seconds = 0.0;
};

/// Runs from rest. An unstable run stops early with completed = false and the
/// outputs recorded so far.
RunOutputs run(const Simulation& sim, const RunOptions& options);
RunOutputs run_from(const Simulation& sim, HybridState& state, const RunOptions& options);

}  // namespace hybridwave
