#pragma once

#include <optional>
#include <string>
#include <vector>

#include "bhm/energy.hpp"
#include "bhm/error.hpp"

namespace bhm {

struct EnergyRecord {
  double t = 0.0;
  double E = 0.0;
  double D = 0.0;
  std::optional<double> E1, E2;
  MonitorRecord monitors;
  double y_norm = 0.0;
};

struct RunSpec {
  SimState initial;
  StepParams params;
  double T = 0.0;
  int record_stride = 1;
  int snapshot_stride = 0;       // 0: keep no snapshots
  bool higher_energies = false;  // central-difference E_{j,1}, E_{j,2} at records
  bool monitors = false;
  std::function<double(double)> G0;  // for the envelope-pairing monitor
  double eps0 = 0.0;
  bool compare_backends = false;  // needs initial.ring
};

struct RunSummary {
  MonitorBaseline baseline;
  double max_norm_drift = 0.0;           // max | |y(t)| - |y(0)| | / |y(0)|
  std::optional<double> max_backend_gap;  // max relative gap of the two force backends
  std::optional<double> max_history_bound_ratio;
  std::optional<double> max_gradient_bound, max_laplacian_bound, max_energy_bound, max_envelope_pairing;
  long steps = 0;
};

struct Trajectory {
  std::vector<EnergyRecord> records;
  std::vector<Snapshot> snapshots;
  RunSummary summary;
  std::optional<std::string> error;  // set when the run stopped early
  std::optional<ErrorKind> error_kind;
};

/// Steps from t = 0 to T, recording every record_stride steps and at T.
/// Errors stop the run and are reported in the trajectory.
Trajectory run(const RunSpec& spec);

/// Relative gap |F - F_direct| / |F| of the two memory backends
/// (absolute when |F| vanishes).
double backend_gap(const SimState& state);

}  // namespace bhm
