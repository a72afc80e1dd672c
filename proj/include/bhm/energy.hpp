#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "bhm/evolution.hpp"

namespace bhm {

/// E_j = 1/2 (|y|^2 + sum_m W_m |Lap^{j/2} eta_m|^2).
double energy(const SimState& state);
double energy_of(const Grid& grid, const SGrid& sgrid, int j, const Field& y, const HistoryField& eta);

/// Memory part sum_m W_m |Lap^{j/2} eta_m|^2 (no factor 1/2).
double memory_norm_squared(const Grid& grid, const SGrid& sgrid, int j, const HistoryField& eta);

/// 1/2 sum_m W'_m |Lap^{j/2} eta_m|^2, the rate of change of E_j (<= 0).
double dissipation_rhs(const SimState& state);

struct Snapshot {
  double t = 0.0;
  Field y;
  HistoryField eta;
};

/// E_{j,k} at the interior snapshots of a run of consecutive snapshots spaced
/// dt apart: central differences build the k-th time derivative of (y, eta).
/// Entry i corresponds to snaps[i + 1].
std::vector<double> higher_energy(const std::vector<Snapshot>& snaps, const Grid& grid, const SGrid& sgrid,
                                  int j, int k);
/// E_{j,k} from three consecutive snapshots centred on `cur`.
double higher_energy_at(const Snapshot& prev, const Snapshot& cur, const Snapshot& next, const Grid& grid,
                        const SGrid& sgrid, int j, int k);
/// 1/2 |A^k U|^2 with the semi-discrete generator A: the exact time
/// derivatives of the spatially discrete flow at a given state.
double generator_energy(const SimState& state, int k);

struct MonitorBaseline {
  double E = 0.0;   // E_j(0)
  double E1 = 0.0;  // E_{j,1}(0)
  double E2 = 0.0;  // E_{j,2}(0)
};

struct MonitorContext {
  MonitorBaseline baseline;
  std::function<double(double)> G0;  // empty: the envelope-pairing monitor is skipped
  double eps0 = 0.0;                 // <= 0: use 1 / (2 E_j(0))
  double floor = 1e-14;              // denominators below this deactivate a monitor
};

/// Empirical tightest constants of the inequality chain behind the decay
/// estimate. Empty entries are inactive (degenerate denominator).
struct MonitorRecord {
  std::optional<double> gradient_bound;    // |grad y|^2 / (memory norm + |cross|)
  std::optional<double> laplacian_bound;   // |Lap y|^2 / (...), j = 2 only
  std::optional<double> energy_bound;      // |Lap^{j/2} y|^2 / (E + E1 + E2 at t=0)
  std::optional<double> envelope_pairing;  // weighted memory term / (-E' + G0(eps0 E))
};

MonitorRecord bound_monitors(const SimState& state, const MonitorContext& ctx);

/// Largest ratio |Lap^{j/2} eta(s)|^2 / M(t, s) over the s-nodes, where M is
/// the a-priori history bound built from the initial energies, the running
/// constant `c` of the energy bound and the initial history `eta0`.
std::optional<double> history_bound_ratio(const SimState& state, const HistoryField& eta0,
                                          const MonitorBaseline& base, double c);

}  // namespace bhm
