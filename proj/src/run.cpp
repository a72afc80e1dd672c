#include "bhm/run.hpp"

#include <algorithm>
#include <cmath>

namespace bhm {

namespace {

Snapshot snap(const SimState& s) { return Snapshot{s.t, s.y, s.eta}; }

void keep_max(std::optional<double>& acc, const std::optional<double>& v) {
  if (v) acc = std::max(acc.value_or(*v), *v);
}

}  // namespace

double backend_gap(const SimState& s) {
  if (!s.ring) fail(ErrorKind::State, "backend comparison needs the past-slice ring");
  const Field a = memory_force(s.eta, *s.sgrid, s.j, *s.grid);
  const Field b = memory_force_direct(*s.ring, *s.sgrid, s.j, *s.grid);
  const double na = a.norm();
  const double gap = (a - b).norm();
  return na > 0.0 ? gap / na : gap;
}

Trajectory run(const RunSpec& spec) {
  Trajectory tr;
  if (!(spec.T >= 0.0)) fail(ErrorKind::Parameter, "final time T must be >= 0");
  if (spec.record_stride < 1) fail(ErrorKind::Parameter, "record_stride must be >= 1");
  if (spec.snapshot_stride < 0) fail(ErrorKind::Parameter, "snapshot_stride must be >= 0");
  SimState st = spec.initial;
  const double dt = st.dt();
  const long nsteps = std::lround(spec.T / dt);
  RunSummary& sum = tr.summary;

  const double y0n = st.y.norm();
  sum.baseline.E = energy(st);
  std::optional<HistoryField> eta0;
  MonitorContext ctx;
  if (spec.monitors) {
    sum.baseline.E1 = generator_energy(st, 1);
    sum.baseline.E2 = generator_energy(st, 2);
    ctx.baseline = sum.baseline;
    ctx.G0 = spec.G0;
    ctx.eps0 = spec.eps0;
    eta0 = st.eta;
  }

  auto make_record = [&](const SimState& s) {
    EnergyRecord r;
    r.t = s.t;
    r.E = energy(s);
    r.D = dissipation_rhs(s);
    r.y_norm = norm_hj(*s.grid, s.y, 0);
    if (y0n > 0.0) sum.max_norm_drift = std::max(sum.max_norm_drift, std::abs(s.y.norm() - y0n) / y0n);
    if (spec.monitors) {
      r.monitors = bound_monitors(s, ctx);
      keep_max(sum.max_gradient_bound, r.monitors.gradient_bound);
      keep_max(sum.max_laplacian_bound, r.monitors.laplacian_bound);
      keep_max(sum.max_energy_bound, r.monitors.energy_bound);
      keep_max(sum.max_envelope_pairing, r.monitors.envelope_pairing);
      if (sum.max_energy_bound)
        keep_max(sum.max_history_bound_ratio, history_bound_ratio(s, *eta0, sum.baseline, *sum.max_energy_bound));
    }
    if (spec.compare_backends) {
      sum.max_backend_gap = std::max(sum.max_backend_gap.value_or(0.0), backend_gap(s));
    }
    tr.records.push_back(std::move(r));
  };

  struct Pending {
    std::size_t index;
    Snapshot prev, cur;
  };
  std::optional<Pending> pending;
  std::optional<Snapshot> before;

  try {
    if (spec.compare_backends && !st.ring) fail(ErrorKind::State, "backend comparison needs the past-slice ring");
    make_record(st);
    if (spec.snapshot_stride > 0) tr.snapshots.push_back(snap(st));
    const Stepper stepper(st, spec.params);
    for (long n = 0; n < nsteps; ++n) {
      const bool next_is_record = (n + 1) % spec.record_stride == 0 || n + 1 == nsteps;
      if (spec.higher_energies && next_is_record) before = snap(st);
      stepper.step(st);
      if (pending) {
        const Snapshot next = snap(st);
        auto& rec = tr.records[pending->index];
        rec.E1 = higher_energy_at(pending->prev, pending->cur, next, *st.grid, *st.sgrid, st.j, 1);
        rec.E2 = higher_energy_at(pending->prev, pending->cur, next, *st.grid, *st.sgrid, st.j, 2);
        pending.reset();
      }
      if (spec.snapshot_stride > 0 && (n + 1) % spec.snapshot_stride == 0) tr.snapshots.push_back(snap(st));
      if (next_is_record) {
        make_record(st);
        if (spec.higher_energies && before) {
          pending = Pending{tr.records.size() - 1, std::move(*before), snap(st)};
          before.reset();
        }
      }
      sum.steps = n + 1;
    }
  } catch (const Error& e) {
    tr.error = e.what();
    tr.error_kind = e.kind();
  }
  return tr;
}

}  // namespace bhm
