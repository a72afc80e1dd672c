#include "bhm/energy.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "bhm/error.hpp"

namespace bhm {

double memory_norm_squared(const Grid& grid, const SGrid& sgrid, int j, const HistoryField& eta) {
  const auto& W = sgrid.energy_weights();
  double acc = 0.0;
  for (int m = 1; m <= sgrid.last(); ++m)
    if (W[m] != 0.0) acc += W[m] * norm_hj_squared(grid, eta.values.col(m), j);
  return acc;
}

double energy_of(const Grid& grid, const SGrid& sgrid, int j, const Field& y, const HistoryField& eta) {
  return 0.5 * (norm_hj_squared(grid, y, 0) + memory_norm_squared(grid, sgrid, j, eta));
}

double energy(const SimState& s) { return energy_of(*s.grid, *s.sgrid, s.j, s.y, s.eta); }

double dissipation_rhs(const SimState& s) {
  const auto& Wp = s.sgrid->dissipation_weights();
  double acc = 0.0;
  for (int m = 1; m <= s.sgrid->last(); ++m)
    if (Wp[m] != 0.0) acc += Wp[m] * norm_hj_squared(*s.grid, s.eta.values.col(m), s.j);
  return 0.5 * acc;
}

double higher_energy_at(const Snapshot& prev, const Snapshot& cur, const Snapshot& next, const Grid& grid,
                        const SGrid& sgrid, int j, int k) {
  const double dt = sgrid.dt();
  const double tol = 1e-9 * dt;
  if (std::abs(cur.t - prev.t - dt) > tol || std::abs(next.t - cur.t - dt) > tol)
    fail(ErrorKind::State, "higher energies need snapshots spaced exactly one time step apart");
  if (k == 1) {
    const double c = 1.0 / (2.0 * dt);
    const Field y = c * (next.y - prev.y);
    HistoryField eta{c * (next.eta.values - prev.eta.values)};
    return energy_of(grid, sgrid, j, y, eta);
  }
  if (k == 2) {
    const double c = 1.0 / (dt * dt);
    const Field y = c * (next.y - 2.0 * cur.y + prev.y);
    HistoryField eta{c * (next.eta.values - 2.0 * cur.eta.values + prev.eta.values)};
    return energy_of(grid, sgrid, j, y, eta);
  }
  fail(ErrorKind::Parameter, "higher energy order k must be 1 or 2");
}

std::vector<double> higher_energy(const std::vector<Snapshot>& snaps, const Grid& grid, const SGrid& sgrid,
                                  int j, int k) {
  if (static_cast<int>(snaps.size()) < k + 1 || snaps.size() < 3) {
    std::ostringstream os;
    os << "E_{j," << k << "} needs at least 3 consecutive snapshots, got " << snaps.size();
    fail(ErrorKind::State, os.str());
  }
  std::vector<double> out;
  for (std::size_t i = 1; i + 1 < snaps.size(); ++i)
    out.push_back(higher_energy_at(snaps[i - 1], snaps[i], snaps[i + 1], grid, sgrid, j, k));
  return out;
}

double generator_energy(const SimState& state, int k) {
  if (k < 0) fail(ErrorKind::Parameter, "generator power must be >= 0");
  SimState cur = state;
  for (int i = 0; i < k; ++i) {
    GeneratorImage img = apply_generator(cur);
    cur.y = std::move(img.y);
    cur.eta = std::move(img.eta);
  }
  return energy(cur);
}

namespace {

std::optional<double> ratio(double num, double den, double floor) {
  if (!(den > floor) || !std::isfinite(num)) return std::nullopt;
  return num / den;
}

}  // namespace

MonitorRecord bound_monitors(const SimState& s, const MonitorContext& ctx) {
  const Grid& grid = *s.grid;
  MonitorRecord r;
  const GeneratorImage dyn = apply_generator(s);
  // int Re(y_t) Im(y) - Im(y_t) Re(y) dx
  const double cross =
      grid.cell_volume() * (dyn.y.real().cwiseProduct(s.y.imag()) - dyn.y.imag().cwiseProduct(s.y.real())).sum();
  const double mem = memory_norm_squared(grid, *s.sgrid, s.j, s.eta);
  const double den = mem + std::abs(cross);
  r.gradient_bound = ratio(norm_hj_squared(grid, s.y, 1), den, ctx.floor);
  if (s.j == 2) r.laplacian_bound = ratio(norm_hj_squared(grid, s.y, 2), den, ctx.floor);
  const auto& b = ctx.baseline;
  r.energy_bound = ratio(norm_hj_squared(grid, s.y, s.j), b.E + b.E1 + b.E2, ctx.floor);

  if (ctx.G0) {
    const double E = energy(s);
    const double eps0 = ctx.eps0 > 0.0 ? ctx.eps0 : (b.E > 0.0 ? 1.0 / (2.0 * b.E) : 0.0);
    const double x = eps0 * E;
    if (x > ctx.floor) {
      const double g0x = ctx.G0(x);
      const double lhs = g0x / x * mem;
      r.envelope_pairing = ratio(lhs, -dissipation_rhs(s) + g0x, ctx.floor);
    }
  }
  return r;
}

std::optional<double> history_bound_ratio(const SimState& s, const HistoryField& eta0, const MonitorBaseline& b,
                                          double c) {
  const Grid& grid = *s.grid;
  const SGrid& sg = *s.sgrid;
  const auto& nodes = sg.nodes();
  const double total = b.E + b.E1 + b.E2;
  std::optional<double> worst;
  for (int m = 1; m <= sg.last(); ++m) {
    const double sm = nodes[m];
    double bound;
    if (s.j == 0) {
      bound = 2.0 * sm * sm * b.E;
    } else {
      bound = sm * sm * c * total;
    }
    if (sm > s.t) {
      // int_0^{s-t} of the past, read off the initial history by interpolation.
      const double u = sm - s.t;
      const auto it = std::upper_bound(nodes.begin(), nodes.end(), u);
      const int hi = std::min<int>(static_cast<int>(it - nodes.begin()), sg.last());
      const int lo = std::max(hi - 1, 0);
      const double w = hi == lo ? 0.0 : std::clamp((u - nodes[lo]) / (nodes[hi] - nodes[lo]), 0.0, 1.0);
      const Field past = (1.0 - w) * eta0.values.col(lo) + w * eta0.values.col(hi);
      const double pn = norm_hj_squared(grid, past, s.j);
      bound = s.j == 0 ? 2.0 * pn + 4.0 * sm * sm * b.E : 2.0 * pn + 2.0 * sm * sm * c * total;
    }
    const double num = norm_hj_squared(grid, s.eta.values.col(m), s.j);
    if (bound > 1e-14) worst = std::max(worst.value_or(0.0), num / bound);
  }
  return worst;
}

}  // namespace bhm
