// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <unistd.h>

#include <Eigen/Eigenvalues>

#include "bhm/config.hpp"
#include "bhm/convexity.hpp"
#include "bhm/decay.hpp"
#include "bhm/energy.hpp"
#include "bhm/error.hpp"
#include "bhm/evolution.hpp"
#include "bhm/experiment.hpp"
#include "bhm/profiles.hpp"
#include "bhm/run.hpp"
#include "bhm/verify.hpp"

using namespace bhm;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void report(int id, const std::string& title, const std::function<Outcome()>& body) {
  Outcome o;
  const auto t0 = Clock::now();
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  std::ostringstream line;
  line << (o.pass ? "PASS" : "FAIL") << " criterion " << id << ": " << title << " [" << o.detail << "; "
       << std::fixed << std::setprecision(1) << seconds_since(t0) << " s]";
  std::cout << line.str() << std::endl;
  if (!o.pass) ++failures;
}

std::string num(double v) { return format_double(v); }

SimState state_1d(const Kernel& k, double L, int N, int j, double dt, HistorySpec hist = {}, SGridOptions opt = {}) {
  auto grid = std::make_shared<const Grid>(build_grid({L}, {N}));
  auto sg = std::make_shared<const SGrid>(k, dt, opt);
  const Field phi = make_initial(*grid, {});
  return make_state(grid, sg, j, phi, make_history(phi, hist), false);
}

RunSpec spec_for(SimState s, double T, int stride) {
  RunSpec r{.initial = std::move(s), .params = {}, .G0 = {}};
  r.T = T;
  r.record_stride = stride;
  return r;
}

void series(const Trajectory& tr, std::vector<double>& t, std::vector<double>& E) {
  for (const auto& r : tr.records) {
    t.push_back(r.t);
    E.push_back(r.E);
  }
}

// Long-time decay run on [0, 100] with the fit window [10, 100].
Outcome decay_run(const Kernel& k, const ConvexityProfile& prof, bool want_rate) {
  const auto tr = run(spec_for(state_1d(k, 10.0, 64, 0, 1e-2), 100.0, 10));
  if (tr.error) return {false, *tr.error};
  std::vector<double> t, E;
  series(tr, t, E);
  const auto fit = fit_decay(t, E, 10.0, 100.0);
  const auto env = check_envelope(t, E, build_Gn(prof, 1), 10.0, 100.0);
  bool pass = env.holds && std::isfinite(env.alpha);
  if (want_rate) pass = pass && fit.rate >= 0.8;
  return {pass, "rate " + num(fit.rate) + " (R^2 " + num(fit.r_squared) + "), envelope alpha " + num(env.alpha) +
                    (env.holds ? " holds" : " fails")};
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace

int main() {
  report(1, "no-memory norm conservation (N=64, dt=1e-3, 1000 steps)", [] {
    const auto t0 = Clock::now();
    SimState s = state_1d(Kernel::none(), 1.0, 64, 0, 1e-3);
    const double n0 = s.y.norm();
    const Stepper st(s, {});
    double drift = 0.0;
    for (int n = 0; n < 1000; ++n) {
      st.step(s);
      drift = std::max(drift, std::abs(s.y.norm() - n0) / n0);
    }
    const double secs = seconds_since(t0);
    return Outcome{drift <= 1e-10 && secs < 10.0, "max relative drift " + num(drift) + ", runtime " + num(secs) + " s"};
  });

  report(2, "dissipation identity order >= 1.8 and strictly decreasing energy", [] {
    const auto t0 = Clock::now();
    const auto st = dissipation_order_study({2e-3, 1e-3, 5e-4});
    const double p1 = std::log2(st.residuals[0] / st.residuals[1]);
    const double p2 = std::log2(st.residuals[1] / st.residuals[2]);
    const double secs = seconds_since(t0);
    std::ostringstream d;
    d << "residuals " << st.residuals[0] << ", " << st.residuals[1] << ", " << st.residuals[2] << "; orders " << p1
      << ", " << p2 << " (fit " << st.order << "); monotone " << (st.strictly_decreasing ? "yes" : "no");
    return Outcome{std::min(p1, p2) >= 1.8 && st.strictly_decreasing && secs < 60.0, d.str()};
  });

  report(3, "history force equals direct convolution (Prony, 100 steps)", [] {
    const double gap = backend_equivalence_study(100);
    return Outcome{gap <= 1e-6, "max relative gap " + num(gap)};
  });

  report(4, "G_n closed forms", [] {
    double lin = 0.0, pow_err = 0.0;
    for (int n = 1; n <= 4; ++n) {
      const auto gn = build_Gn(ConvexityProfile::power(2.0, ConvexityProfile::Mode::Linear, 1.0), n);
      for (int i = 0; i <= 1000; ++i) {
        const double s = 0.01 * i;
        lin = std::max(lin, std::abs(gn(s) - std::pow(s, n)) / std::max(1.0, std::pow(s, n)));
      }
    }
    for (auto [p, n] : {std::pair{2.0, 2}, std::pair{2.0, 3}, std::pair{6.0, 2}}) {
      double pn = 0.0;
      for (int m = 1; m <= n; ++m) pn += std::pow(p, -m);
      const auto gn = build_Gn(ConvexityProfile::power(p, ConvexityProfile::Mode::Convex), n);
      for (int i = 0; i <= 1000; ++i) {
        const double s = 0.01 * i, want = std::pow(s / p, pn);
        pow_err = std::max(pow_err, std::abs(gn(s) - want) / std::max(1.0, want));
      }
    }
    return Outcome{lin <= 1e-12 && pow_err <= 1e-8, "linear max error " + num(lin) + ", power max error " + num(pow_err)};
  });

  report(5, "exponential kernel: decay rate >= 0.8 and n=1 envelope on [10,100]", [] {
    return decay_run(make_exponential_kernel(1.0, 1.0),
                     ConvexityProfile::power(2.0, ConvexityProfile::Mode::Linear, 1.0), true);
  });

  report(6, "polynomial kernel (1,4), G = s^6: n=1 envelope and finite tail integrals", [] {
    const Kernel k = make_polynomial_kernel(1.0, 4.0);
    const auto prof = ConvexityProfile::power(6.0, ConvexityProfile::Mode::Convex);
    const auto rep = validate_assumptions(k, prof);
    const bool finite = rep.weighted_tail && rep.weighted_tail->finite && rep.m0 && rep.m0->finite;
    Outcome o = decay_run(k, prof, false);
    o.pass = o.pass && finite;
    o.detail += std::string(", tail integrals ") + (finite ? "finite" : "not finite");
    if (rep.weighted_tail) o.detail += " (" + num(rep.weighted_tail->value) + ")";
    return o;
  });

  report(7, "Poincare constant at N=256 vs dense oracle and N=512", [] {
    const int N = 256;
    const double h = 1.0 / (N + 1);
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(N, N);
    for (int i = 0; i < N; ++i) {
      A(i, i) = 2.0 / (h * h);
      if (i > 0) A(i, i - 1) = A(i - 1, i) = -1.0 / (h * h);
    }
    const double dense =
        1.0 / Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(A, Eigen::EigenvaluesOnly).eigenvalues()(0);
    const double c256 = poincare_constant(build_grid({1.0}, {256}));
    const double c512 = poincare_constant(build_grid({1.0}, {512}));
    const double e1 = std::abs(c256 - dense) / dense, e2 = std::abs(c256 - c512) / c512;
    return Outcome{e1 <= 0.01 && e2 <= 0.02,
                   "c* " + num(c256) + ", vs dense " + num(e1) + ", vs N=512 " + num(e2)};
  });

  report(8, "higher energies E_{0,1}, E_{0,2} non-increasing (exponential kernel)", [] {
    RunSpec spec = spec_for(state_1d(make_exponential_kernel(1.0, 1.0), 1.0, 64, 0, 1e-3), 2.0, 10);
    spec.higher_energies = true;
    const auto tr = run(spec);
    if (tr.error) return Outcome{false, *tr.error};
    bool ok = true;
    std::ostringstream d;
    for (int k = 1; k <= 2; ++k) {
      std::optional<double> first, prev;
      double rise = 0.0;
      int count = 0;
      for (const auto& r : tr.records) {
        const auto v = k == 1 ? r.E1 : r.E2;
        if (!v) continue;
        ++count;
        if (!first) first = v;
        if (prev) rise = std::max(rise, *v - *prev);
        prev = v;
      }
      ok = ok && first && count > 100 && rise <= 1e-6 * *first;
      d << (k == 2 ? "; " : "") << "E" << k << ": " << count << " records, largest rise " << rise;
    }
    return Outcome{ok, d.str()};
  });

  report(9, "resolvent round trip (N=32, j = 0, 1, 2)", [] {
    std::mt19937_64 rng(21);
    std::normal_distribution<double> nd;
    double worst = 0.0;
    for (int j = 0; j <= 2; ++j) {
      SimState s = state_1d(make_exponential_kernel(1.0, 1.0), 1.0, 32, j, 1e-2, {HistoryShape::Exponential, 1.0});
      for (auto& v : s.y) v *= cplx(1.0 + 0.1 * nd(rng), 0.1 * nd(rng));
      const GeneratorImage a = apply_generator(s);
      const double dt = 1e-2;
      const HistoryField f2{s.eta.values - dt * a.eta.values};
      const SimState back = resolvent_solve(s, s.y - dt * a.y, f2, dt);
      worst = std::max({worst, (back.y - s.y).norm() / s.y.norm(),
                        (back.eta.values - s.eta.values).norm() / s.eta.values.norm()});
    }
    return Outcome{worst <= 1e-10, "max relative error " + num(worst)};
  });

  report(10, "identical configs give byte-identical energies.csv", [] {
    const fs::path root = fs::temp_directory_path() / ("bhm_acceptance_" + std::to_string(::getpid()));
    fs::remove_all(root);
    ::setenv("BHM_OUTPUT_ROOT", root.c_str(), 1);
    const std::string text =
        "lengths = 1\ncounts = 64\nj = 1\nkernel = prony\nprony_terms = 1:1, 0.5:3\nhistory = exponential\n"
        "dt = 1e-3\nT = 0.2\nhigher_energies = true\n";
    const auto a = run_experiment(parse_config_text(text + "output_dir = first\n", "det"));
    const auto b = run_experiment(parse_config_text(text + "output_dir = second\n", "det"));
    const std::string ca = read_file(a.csv_path), cb = read_file(b.csv_path);
    ::unsetenv("BHM_OUTPUT_ROOT");
    fs::remove_all(root);
    return Outcome{!ca.empty() && ca == cb, std::to_string(ca.size()) + " bytes, " + (ca == cb ? "identical" : "differ")};
  });

  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
  return failures == 0 ? 0 : 1;
}
