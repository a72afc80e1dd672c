#include "bhm/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "bhm/error.hpp"

namespace bhm {

namespace fs = std::filesystem;

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Numeric:
    case ErrorKind::State: return kExitNumeric;
    default: return kExitConfig;
  }
}

SimState build_initial_state(const ExperimentConfig& cfg) {
  const Kernel kernel = build_kernel(cfg);
  auto grid = std::make_shared<const Grid>(build_grid(cfg.lengths, cfg.counts));
  auto sgrid = std::make_shared<const SGrid>(kernel, cfg.dt, cfg.sgrid);
  InitialSpec initial = cfg.initial;
  initial.seed = cfg.seed;
  const Field phi = make_initial(*grid, initial);
  return make_state(grid, sgrid, cfg.j, phi, make_history(phi, cfg.history), cfg.compare_backends);
}

RunSpec build_run_spec(const ExperimentConfig& cfg) {
  RunSpec spec{.initial = build_initial_state(cfg), .params = cfg.solver, .G0 = {}};
  spec.T = cfg.T;
  spec.record_stride = cfg.record_stride;
  spec.snapshot_stride = cfg.snapshot_stride;
  spec.higher_energies = cfg.higher_energies;
  spec.monitors = cfg.monitors;
  spec.compare_backends = cfg.compare_backends;
  spec.eps0 = cfg.eps0;
  const auto profile = build_profile(cfg, spec.initial.sgrid->kernel());
  spec.G0 = [profile](double s) { return profile.G0(s); };
  return spec;
}

DecaySection analyse_decay(const ExperimentConfig& cfg, const Trajectory& tr) {
  DecaySection out;
  const double t0 = cfg.fit_t0.value_or(0.1 * cfg.T);
  const double t1 = cfg.fit_t1.value_or(cfg.T);
  std::vector<double> t, E;
  for (const auto& r : tr.records) {
    t.push_back(r.t);
    E.push_back(r.E);
  }
  try {
    out.fit = fit_decay(t, E, t0, t1);
    const auto profile = build_profile(cfg, build_kernel(cfg));
    out.envelope = check_envelope(t, E, build_Gn(profile, cfg.gn_order), t0, t1);
  } catch (const Error& e) {
    out.skipped = std::string(to_string(e.kind())) + ": " + e.what();
  }
  return out;
}

namespace {

void put(std::ostream& out, const std::optional<double>& v) {
  if (v) out << format_double(*v);
}

std::string opt(const std::optional<double>& v) { return v ? format_double(*v) : "inactive"; }

}  // namespace

void write_energy_csv(std::ostream& out, const Trajectory& tr) {
  out << "t,E,D,E1,E2,mon_eq30,mon_eq37,mon_eq43,mon_eq49\n";
  for (const auto& r : tr.records) {
    out << format_double(r.t) << ',' << format_double(r.E) << ',' << format_double(r.D) << ',';
    put(out, r.E1);
    out << ',';
    put(out, r.E2);
    out << ',';
    put(out, r.monitors.gradient_bound);
    out << ',';
    put(out, r.monitors.laplacian_bound);
    out << ',';
    put(out, r.monitors.energy_bound);
    out << ',';
    put(out, r.monitors.envelope_pairing);
    out << '\n';
  }
  if (tr.error) out << "# error: " << *tr.error << '\n';
}

namespace {

// Invariant checks on a finished trajectory; appends PASS/FAIL lines and
// returns false when any fails.
bool invariant_checks(const ExperimentConfig& cfg, const Trajectory& tr, bool memory,
                      std::vector<std::string>& lines) {
  bool ok = true;
  auto check = [&](bool pass, const std::string& text) {
    lines.push_back(std::string(pass ? "PASS " : "FAIL ") + text);
    ok = ok && pass;
  };
  if (tr.records.empty()) return ok;
  const double E0 = tr.records.front().E;

  bool signs = true;
  for (const auto& r : tr.records) signs = signs && r.E >= 0.0 && r.D <= 0.0;
  check(signs, "energy >= 0 and dissipation <= 0 at every record");

  if (!memory) {
    const double drift = tr.summary.max_norm_drift;
    check(drift <= cfg.conservation_tol, "conservation: max relative drift of |y| = " + format_double(drift) +
                                             " (tolerance " + format_double(cfg.conservation_tol) + ")");
  } else {
    double rise = 0.0;
    for (std::size_t i = 1; i < tr.records.size(); ++i)
      rise = std::max(rise, tr.records[i].E - tr.records[i - 1].E);
    check(rise <= 1e-8 * E0, "energy non-increasing: largest rise " + format_double(rise) + " (band " +
                                 format_double(1e-8 * E0) + ")");
  }
  if (cfg.higher_energies) {
    for (int k = 1; k <= 2; ++k) {
      std::optional<double> first, prev;
      double rise = 0.0;
      for (const auto& r : tr.records) {
        const auto& v = k == 1 ? r.E1 : r.E2;
        if (!v) continue;
        if (!first) first = v;
        if (prev) rise = std::max(rise, *v - *prev);
        prev = v;
      }
      if (first) {
        const double band = 1e-6 * *first;
        check(rise <= band, "E" + std::to_string(k) + " non-increasing: largest rise " + format_double(rise) +
                                " (band " + format_double(band) + ")");
      }
    }
  }
  if (tr.summary.max_backend_gap) {
    check(*tr.summary.max_backend_gap <= 1e-6,
          "memory backends agree: max relative gap " + format_double(*tr.summary.max_backend_gap));
  }
  return ok;
}

void write_report(std::ostream& out, const ExperimentConfig& cfg, const ExperimentResult& res) {
  out << "# run report: " << cfg.name << "\n\n[config]\n";
  for (const auto& [k, v] : echo_config(cfg)) out << k << " = " << v << '\n';

  const auto& tr = res.trajectory;
  const auto& st = tr.summary;
  out << "\n[kernel]\n";
  const Kernel kernel = build_kernel(cfg);
  out << "family = " << kernel.family_name() << '\n';
  if (!kernel.is_none()) {
    out << "g0 = " << format_double(kernel.g0()) << '\n';
    out << "c0 = " << format_double(kernel.c0()) << '\n';
  }
  if (res.assumptions) {
    const auto& a = *res.assumptions;
    auto b = [](bool x) { return x ? "yes" : "no"; };
    out << "admissible = " << b(a.admissible) << '\n';
    out << "g_conditions = " << b(a.g_conditions) << '\n';
    out << "f_conditions = " << b(a.f_conditions) << '\n';
    out << "tail_vanishes = " << b(a.tail_vanishes) << '\n';
    out << "f_matches_tail = " << b(a.f_matches_tail) << " (max error " << format_double(a.max_tail_error) << ")\n";
    if (a.linear_rate_holds) out << "linear_rate_holds = " << b(*a.linear_rate_holds) << '\n';
    if (a.weighted_tail)
      out << "weighted_tail_integral = " << format_double(a.weighted_tail->value)
          << (a.weighted_tail->finite ? " (finite)" : " (divergent)") << '\n';
    if (a.m0) out << "m0 = " << format_double(a.m0->value) << (a.m0->finite ? " (finite)" : " (divergent)") << '\n';
    out << "s_max = " << format_double(a.s_max) << '\n';
  }

  out << "\n[run]\n";
  out << "steps = " << st.steps << '\n';
  out << "records = " << tr.records.size() << '\n';
  if (!tr.records.empty()) {
    out << "E_initial = " << format_double(tr.records.front().E) << '\n';
    out << "E_final = " << format_double(tr.records.back().E) << '\n';
  }
  out << "max_norm_drift = " << format_double(st.max_norm_drift) << '\n';
  if (st.max_backend_gap) out << "max_backend_gap = " << format_double(*st.max_backend_gap) << '\n';
  if (tr.error) out << "error = " << *tr.error << '\n';

  if (cfg.monitors) {
    out << "\n[monitors]\n";
    out << "E_j(0) = " << format_double(st.baseline.E) << '\n';
    out << "E_j1(0) = " << format_double(st.baseline.E1) << '\n';
    out << "E_j2(0) = " << format_double(st.baseline.E2) << '\n';
    out << "max_gradient_bound = " << opt(st.max_gradient_bound) << '\n';
    out << "max_laplacian_bound = " << opt(st.max_laplacian_bound) << '\n';
    out << "max_energy_bound = " << opt(st.max_energy_bound) << '\n';
    out << "max_history_bound_ratio = " << opt(st.max_history_bound_ratio) << '\n';
    out << "empirical_pairing_constant = " << opt(st.max_envelope_pairing) << '\n';
  }

  out << "\n[decay]\n";
  const auto& d = res.decay;
  if (d.fit) {
    out << "window = [" << format_double(d.fit->t0) << ", " << format_double(d.fit->t1) << "]\n";
    out << "slope = " << format_double(-d.fit->rate) << '\n';
    out << "rate = " << format_double(d.fit->rate) << '\n';
    out << "r_squared = " << format_double(d.fit->r_squared) << '\n';
    out << "fit_points = " << d.fit->points << '\n';
    out << "rate_confident = " << (d.fit->confident ? "yes" : "no") << '\n';
  }
  if (d.envelope) {
    out << "envelope_order = " << cfg.gn_order << '\n';
    out << "envelope_alpha = " << format_double(d.envelope->alpha) << '\n';
    out << "envelope_holds = " << (d.envelope->holds ? "yes" : "no") << '\n';
    out << "envelope_cap = " << format_double(d.envelope->cap) << (d.envelope->capped ? " (reached)" : "") << '\n';
    // Power profiles make G_n homogeneous: alpha G_n(alpha / t) = beta t^-q.
    const auto gn = build_Gn(build_profile(cfg, kernel), cfg.gn_order);
    const double q = std::log(gn(2.0) / gn(1.0)) / std::log(2.0);
    out << "envelope_exponent = " << format_double(q) << '\n';
    out << "envelope_beta = " << format_double(d.envelope->alpha * gn(d.envelope->alpha)) << '\n';
  }
  if (!d.skipped.empty()) out << "skipped = " << d.skipped << '\n';

  out << "\n[checks]\n";
  for (const auto& line : res.checks) out << line << '\n';
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  ExperimentResult res;
  const fs::path dir = output_directory(cfg);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) fail(ErrorKind::Config, "cannot create output directory '" + dir.string() + "': " + ec.message());
  res.csv_path = dir / "energies.csv";
  res.report_path = dir / "report.txt";

  const RunSpec spec = build_run_spec(cfg);
  const Kernel& kernel = spec.initial.sgrid->kernel();
  if (!kernel.is_none()) res.assumptions = validate_assumptions(kernel, build_profile(cfg, kernel));
  res.trajectory = run(spec);
  res.decay = analyse_decay(cfg, res.trajectory);
  const bool ok = invariant_checks(cfg, res.trajectory, !kernel.is_none(), res.checks);

  {
    std::ofstream csv(res.csv_path, std::ios::binary);
    if (!csv) fail(ErrorKind::Config, "cannot write '" + res.csv_path.string() + "'");
    write_energy_csv(csv, res.trajectory);
  }
  {
    std::ofstream rep(res.report_path);
    if (!rep) fail(ErrorKind::Config, "cannot write '" + res.report_path.string() + "'");
    write_report(rep, cfg, res);
  }
  if (res.trajectory.error_kind)
    res.exit_code = exit_code_for(*res.trajectory.error_kind);
  else if (!ok)
    res.exit_code = kExitVerification;
  return res;
}

std::vector<SweepEntry> sweep(const fs::path& dir, unsigned workers) {
  if (!fs::is_directory(dir)) fail(ErrorKind::Config, "sweep directory '" + dir.string() + "' does not exist");
  std::vector<SweepEntry> entries;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".cfg") entries.push_back({e.path(), 0, ""});
  std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) { return a.config < b.config; });

  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = std::min<unsigned>(workers, std::max<std::size_t>(entries.size(), 1));
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next++) < entries.size();) {
      auto& entry = entries[i];
      try {
        const auto res = run_experiment(parse_config(entry.config));
        entry.exit_code = res.exit_code;
        entry.message = res.trajectory.error ? *res.trajectory.error : res.report_path.string();
      } catch (const Error& err) {
        entry.exit_code = exit_code_for(err.kind());
        entry.message = err.what();
      } catch (const std::exception& err) {
        entry.exit_code = kExitNumeric;
        entry.message = err.what();
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  return entries;
}

}  // namespace bhm
