#include "bhm/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <functional>
#include <random>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "bhm/config.hpp"
#include "bhm/convexity.hpp"
#include "bhm/decay.hpp"
#include "bhm/energy.hpp"
#include "bhm/error.hpp"
#include "bhm/evolution.hpp"
#include "bhm/kernel.hpp"
#include "bhm/profiles.hpp"
#include "bhm/run.hpp"

namespace bhm {

namespace {

constexpr double kPi = 3.14159265358979323846;

class Collector {
 public:
  void check(std::string name, bool pass, const std::string& detail = {}) {
    out_.push_back({std::move(name), pass, detail});
  }
  // Runs `body`; a thrown library error becomes a failed check.
  void guarded(const std::string& name, const std::function<void()>& body) {
    try {
      body();
    } catch (const Error& e) {
      check(name, false, std::string("unexpected ") + to_string(e.kind()) + " error: " + e.what());
    }
  }
  std::vector<CheckResult> take() { return std::move(out_); }

 private:
  std::vector<CheckResult> out_;
};

std::string num(double v) { return format_double(v); }

template <class F>
bool throws_kind(ErrorKind kind, F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind() == kind;
  }
  return false;
}

double rel_err(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

// Random smooth clamped field: clamp factor times a few random sine modes.
Field random_smooth_field(const Grid& grid, std::mt19937_64& rng, int modes = 4) {
  std::normal_distribution<double> nd;
  std::vector<cplx> c(modes);
  for (auto& v : c) v = cplx(nd(rng), nd(rng));
  Field u(grid.size());
  for (int k = 0; k < grid.size(); ++k) {
    const auto x = grid.node(k);
    cplx v = 1.0;
    for (int d = 0; d < grid.dimension(); ++d) {
      const double L = grid.lengths()[d], xi = x[d];
      cplx s = 0.0;
      for (int m = 0; m < modes; ++m) s += c[m] * std::sin((m + 1) * kPi * xi / L);
      v *= xi * xi * (L - xi) * (L - xi) * s;
    }
    u[k] = v;
  }
  return u / std::sqrt(inner(grid, u, u));
}

Field random_field(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  Field u(n);
  for (auto& v : u) v = cplx(nd(rng), nd(rng));
  return u;
}

// ---------------------------------------------------------------- kernels

std::vector<CheckResult> kernels_suite() {
  Collector c;
  c.guarded("exponential kernel closed forms", [&] {
    const Kernel k = make_exponential_kernel(2.0, 3.0);
    const bool ok = rel_err(k.g(0.0), 2.0) < 1e-15 && rel_err(k.g_prime(0.0), -6.0) < 1e-15 &&
                    rel_err(k.f(0.0), 2.0 / 3.0) < 1e-15 && rel_err(*k.linear_rate(), 3.0) < 1e-15;
    c.check("exponential kernel closed forms", ok, "g(0)=2, g'(0)=-6, f(0)=2/3, rate 3");
  });
  c.guarded("polynomial kernel f(0) = d2/(q2-1)", [&] {
    const Kernel k = make_polynomial_kernel(1.0, 4.0);
    c.check("polynomial kernel f(0) = d2/(q2-1)", rel_err(k.f(0.0), 1.0 / 3.0) < 1e-14, num(k.f(0.0)));
    c.check("polynomial kernel minimal profile exponent", rel_err(*k.minimal_power_exponent(), 5.0) < 1e-14,
            num(*k.minimal_power_exponent()));
  });
  c.check("polynomial kernel with q2 <= 3 rejected",
          throws_kind(ErrorKind::Admissibility, [] { make_polynomial_kernel(1.0, 2.0); }));
  c.guarded("prony kernel sums its terms", [&] {
    const std::vector<Kernel::Term> terms{{1.0, 1.0}, {0.5, 3.0}};
    const Kernel k = make_prony_kernel(terms);
    double worst = 0.0;
    for (double s = 0.0; s <= 10.0; s += 0.25) {
      const double g = std::exp(-s) + 0.5 * std::exp(-3.0 * s);
      const double f = std::exp(-s) + 0.5 / 3.0 * std::exp(-3.0 * s);
      worst = std::max({worst, rel_err(k.g(s), g), rel_err(k.f(s), f)});
    }
    c.check("prony kernel sums its terms", worst < 1e-14, "max relative error " + num(worst));
    c.check("prony linear rate is the slowest exponent", rel_err(*k.linear_rate(), 1.0) < 1e-15);
  });
  c.check("prony kernel with a negative rate rejected", throws_kind(ErrorKind::Parameter, [] {
            const std::vector<Kernel::Term> bad{{1.0, -1.0}};
            make_prony_kernel(bad);
          }));
  c.guarded("f is the tail mass of g", [&] {
    const Kernel k = make_polynomial_kernel(1.0, 4.0);
    double worst = 0.0;
    for (double s : {0.0, 0.5, 2.0, 10.0}) worst = std::max(worst, rel_err(k.f_integral(s, s + 1.0),
                                                                            (std::pow(1 + s, -2.0) - std::pow(2 + s, -2.0)) / 6.0));
    c.check("f integral closed form (polynomial)", worst < 1e-12, "max relative error " + num(worst));
  });

  c.guarded("assumption validator", [&] {
    const Kernel g1 = make_exponential_kernel(1.0, 1.0);
    const auto lin = validate_assumptions(g1, ConvexityProfile::power(2.0, ConvexityProfile::Mode::Linear, 1.0));
    c.check("exponential kernel admissible in linear mode", lin.admissible && lin.linear_rate_holds.value_or(false));
    const Kernel g2 = make_polynomial_kernel(1.0, 4.0);
    const auto good = validate_assumptions(g2, ConvexityProfile::power(6.0, ConvexityProfile::Mode::Convex));
    c.check("polynomial kernel with G = s^6: tail integrals finite",
            good.weighted_tail && good.weighted_tail->finite && good.m0 && good.m0->finite,
            good.weighted_tail ? "weighted tail " + num(good.weighted_tail->value) : "");
    const auto bad = validate_assumptions(g2, ConvexityProfile::power(2.0, ConvexityProfile::Mode::Convex));
    c.check("polynomial kernel with G = s^2: weighted tail divergent",
            bad.weighted_tail && !bad.weighted_tail->finite && !bad.admissible);
  });

  c.guarded("G_n closed forms", [&] {
    const auto lin = ConvexityProfile::power(2.0, ConvexityProfile::Mode::Linear, 1.0);
    double worst = 0.0;
    for (int n = 1; n <= 4; ++n) {
      const auto gn = build_Gn(lin, n);
      for (int i = 0; i <= 200; ++i) {
        const double s = 10.0 * i / 200.0;
        worst = std::max(worst, std::abs(gn(s) - std::pow(s, n)) / std::max(1.0, std::pow(s, n)));
      }
    }
    c.check("linear mode: G_n(s) = s^n for n <= 4 on [0,10]", worst <= 1e-12, "max error " + num(worst));
    for (auto [p, n] : {std::pair{2.0, 2}, std::pair{2.0, 3}, std::pair{6.0, 2}}) {
      const auto gn = build_Gn(ConvexityProfile::power(p, ConvexityProfile::Mode::Convex), n);
      const double pn = eval_pn(p, n);
      double w = 0.0;
      for (int i = 0; i <= 200; ++i) {
        const double s = 10.0 * i / 200.0;
        const double want = std::pow(s / p, pn);
        w = std::max(w, std::abs(gn(s) - want) / std::max(1.0, want));
      }
      std::ostringstream name;
      name << "G = s^" << p << ", n = " << n << ": G_n(s) = (s/p)^p_n on [0,10]";
      c.check(name.str(), w <= 1e-8, "max error " + num(w));
    }
    c.check("p_n for p = 2, n = 3 is 7/8", std::abs(eval_pn(2.0, 3) - 0.875) < 1e-15);
  });

  c.guarded("conjugate and K", [&] {
    const auto prof = ConvexityProfile::power(3.0, ConvexityProfile::Mode::Convex);
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.0, 5.0);
    bool young = true, monotone = true;
    for (int i = 0; i < 1000; ++i) {
      const double a = u(rng), b = u(rng);
      young = young && a * b <= prof.G(a) + prof.G_star(b) + 1e-12 * (1.0 + a * b);
    }
    double prev = prof.K(0.0);
    for (int i = 1; i <= 400; ++i) {
      const double k = prof.K(0.05 * i);
      monotone = monotone && k >= prev;
      prev = k;
    }
    c.check("Young inequality ab <= G(a) + G*(b) on 1000 random pairs", young);
    c.check("K(s) = s / G^{-1}(s) non-decreasing", monotone && prof.K(0.0) == 0.0);
  });
  return c.take();
}

// -------------------------------------------------------------- operators

std::vector<CheckResult> operators_suite() {
  Collector c;
  std::mt19937_64 rng(3);
  for (const auto& [L, N] : {std::pair{std::vector<double>{1.0}, std::vector<int>{48}},
                             std::pair{std::vector<double>{1.0, 2.0}, std::vector<int>{12, 16}}}) {
    const std::string tag = std::to_string(L.size()) + "D";
    c.guarded(tag + " operators", [&] {
      const Grid g = build_grid(L, N);
      double asym_d = 0.0, asym_b = 0.0, id_grad = 0.0, id_lap = 0.0;
      bool positive = true;
      for (int i = 0; i < 20; ++i) {
        const Field u = random_field(g.size(), rng), v = random_field(g.size(), rng);
        const double scale = u.norm() * v.norm() * g.cell_volume() * (1.0 + 16.0 / std::pow(g.spacing()[0], 4));
        const cplx du = u.dot(apply_laplacian(g, v)), dv = apply_laplacian(g, u).dot(v);
        const cplx bu = u.dot(apply_biharmonic(g, v)), bv = apply_biharmonic(g, u).dot(v);
        asym_d = std::max(asym_d, std::abs(du - dv) * g.cell_volume() / scale);
        asym_b = std::max(asym_b, std::abs(bu - bv) * g.cell_volume() / scale);
        const double grad = norm_hj_squared(g, u, 1), lapn = norm_hj_squared(g, u, 2);
        id_grad = std::max(id_grad, rel_err(-inner(g, apply_laplacian(g, u), u), grad));
        id_lap = std::max(id_lap, rel_err(inner(g, apply_biharmonic(g, u), u), lapn));
        positive = positive && grad > 0.0 && lapn > 0.0;
      }
      c.check(tag + ": Laplacian symmetric", asym_d < 1e-9, num(asym_d));
      c.check(tag + ": biharmonic symmetric", asym_b < 1e-9, num(asym_b));
      c.check(tag + ": <-Lap u, u> = |grad u|^2", id_grad < 1e-12, num(id_grad));
      c.check(tag + ": <Bih u, u> = |Lap u|^2", id_lap < 1e-12, num(id_lap));
      c.check(tag + ": both operators positive definite on random fields", positive);
    });
  }
  c.guarded("interior stencil", [&] {
    const Grid g = build_grid({1.0}, {20});
    const double h = g.spacing()[0], h4 = h * h * h * h;
    const auto& B = g.biharmonic();
    const double row[] = {1, -4, 6, -4, 1};
    double worst = 0.0;
    for (int i = 2; i < 18; ++i)
      for (int k = -2; k <= 2; ++k) worst = std::max(worst, std::abs(B.coeff(i, i + k) * h4 - row[k + 2]));
    c.check("biharmonic interior rows are (1,-4,6,-4,1)/h^4", worst < 1e-9, num(worst));
    c.check("clamped boundary row starts with 7/h^4", std::abs(B.coeff(0, 0) * h4 - 7.0) < 1e-9,
            num(B.coeff(0, 0) * h4));
  });
  c.guarded("poincare", [&] {
    const Grid g = build_grid({1.0}, {256});
    const Eigen::MatrixXd A = -Eigen::MatrixXd(g.laplacian());
    const double lmin = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(A, Eigen::EigenvaluesOnly).eigenvalues()(0);
    const double cstar = poincare_constant(g);
    c.check("Poincare constant matches the dense eigensolve (N=256)", rel_err(cstar, 1.0 / lmin) < 1e-8,
            num(cstar) + " vs " + num(1.0 / lmin));
    c.check("Poincare constant near 1/pi^2 (L=1)", rel_err(cstar, 1.0 / (kPi * kPi)) < 1e-3, num(cstar));
    const double c2 = poincare_constant(build_grid({2.0}, {256}));
    c.check("Poincare constant scales with L^2", std::abs(c2 / cstar - 4.0) < 1e-2, num(c2 / cstar));
  });
  c.check("shape mismatch rejected", throws_kind(ErrorKind::Shape, [] {
            const Grid g = build_grid({1.0}, {8});
            apply_laplacian(g, Field::Zero(7));
          }));
  c.check("dimension 3 rejected", throws_kind(ErrorKind::Parameter, [] { build_grid({1, 1, 1}, {4, 4, 4}); }));
  return c.take();
}

// ----------------------------------------------------------------- memory

std::vector<CheckResult> memory_suite() {
  Collector c;
  c.guarded("weights", [&] {
    for (double dt : {1e-2, 1e-3}) {
      const SGrid sg(make_exponential_kernel(1.0, 1.0), dt);
      double w = 0.0, ws = 0.0, a = 0.0;
      for (int m = 0; m <= sg.last(); ++m) {
        w += sg.energy_weights()[m];
        ws += sg.energy_weights()[m] * sg.nodes()[m];
        a += sg.cell_masses()[m];
      }
      const double sM = sg.s_max();
      const std::string tag = " (dt=" + num(dt) + ")";
      // W_0 pairs with eta(0) = 0, so its half-hat of mass is left out.
      const double want = (1.0 - std::exp(-sM)) - 1.0 + (1.0 - std::exp(-dt)) / dt;
      c.check("energy weights hold the mass of g off s = 0" + tag, std::abs(w - want) < 1e-12,
              num(w) + " vs " + num(want));
      c.check("energy weights integrate s exactly" + tag,
              std::abs(ws - (1.0 - (1.0 + sM) * std::exp(-sM))) < 1e-10,
              num(ws));
      c.check("cell masses sum to f(0) - f(s_max)" + tag, std::abs(a - (1.0 - std::exp(-sM))) < 1e-12, num(a));
      bool signs = true;
      for (double v : sg.dissipation_weights()) signs = signs && v <= 0.0;
      c.check("dissipation weights non-positive" + tag, signs);
    }
  });
  c.guarded("constant past", [&] {
    const Grid g = build_grid({1.0}, {16});
    const SGrid sg(make_exponential_kernel(1.0, 1.0), 1e-3);
    const Field phi = make_initial(g, {});
    const HistoryField h = init_history([&](double) { return phi; }, g, sg);
    double worst = 0.0;
    for (int m = 0; m <= sg.last(); ++m) worst = std::max(worst, (h.at(m) - sg.nodes()[m] * phi).norm());
    worst /= sg.s_max() * phi.norm();
    c.check("constant past gives eta(s) = s phi", worst < 1e-12, num(worst));
    HistoryField adv = h;
    for (int n = 0; n < 50; ++n) advance_history(adv, sg.dt() * phi, sg.dt(), sg);
    const double drift = (adv.values - h.values).norm() / h.values.norm();
    c.check("history of a steady state is a fixed point of the transport step", drift < 1e-12, num(drift));
    const Field force = memory_force(h, sg, 0, g);
    const double want = 1.0 - (1.0 + sg.s_max()) * std::exp(-sg.s_max());
    c.check("memory force of eta = s phi is -(int s g) phi", (force + want * phi).norm() / phi.norm() < 1e-8);
  });
  c.guarded("zero state", [&] {
    const Grid g = build_grid({1.0}, {16});
    const SGrid sg(make_exponential_kernel(1.0, 1.0), 1e-2);
    const HistoryField h = init_history([&](double) { return Field(Field::Zero(16)); }, g, sg);
    c.check("zero history gives zero force", memory_force(h, sg, 2, g).norm() == 0.0);
  });
  c.guarded("backend equivalence", [&] {
    const double gap = backend_equivalence_study(100);
    c.check("history force equals direct convolution over 100 steps (Prony kernel)", gap <= 1e-6,
            "max relative gap " + num(gap));
  });
  c.check("dt mismatch rejected", throws_kind(ErrorKind::Config, [] {
            const Grid g = build_grid({1.0}, {8});
            const SGrid sg(make_exponential_kernel(1.0, 1.0), 1e-2);
            HistoryField h = init_history([](double) { return Field(Field::Zero(8)); }, g, sg);
            advance_history(h, Field::Zero(8), 2e-2, sg);
          }));
  return c.take();
}

// ------------------------------------------------------------- identities

SimState simple_state(const Kernel& k, int N, double L, int j, double dt, HistorySpec hist,
                      SGridOptions opt = {}) {
  auto grid = std::make_shared<const Grid>(build_grid({L}, {N}));
  auto sg = std::make_shared<const SGrid>(k, dt, opt);
  const Field phi = make_initial(*grid, {});
  return make_state(grid, sg, j, phi, make_history(phi, hist), false);
}

std::vector<CheckResult> identities_suite() {
  Collector c;
  c.guarded("conservation", [&] {
    RunSpec spec{.initial = simple_state(Kernel::none(), 64, 1.0, 0, 1e-3, {}), .params = {}, .G0 = {}};
    spec.T = 1.0;
    spec.record_stride = 100;
    const auto tr = run(spec);
    c.check("no memory: |y| conserved over 1000 steps", !tr.error && tr.summary.max_norm_drift <= 1e-10,
            "max relative drift " + num(tr.summary.max_norm_drift));
  });
  c.guarded("energy at start", [&] {
    const SimState s = simple_state(make_exponential_kernel(1.0, 1.0), 64, 1.0, 0, 1e-3,
                                    {HistoryShape::Constant, 1.0});
    // eta = s phi: E = 1/2 |phi|^2 (1 + int s^2 g) = 1/2 * 3 for unit phi.
    const double sM = s.sgrid->s_max();
    const double m2 = 2.0 - (sM * sM + 2.0 * sM + 2.0) * std::exp(-sM);
    const double E = energy(s);
    // Hat-weight quadrature of s^2 on the geometric tail is accurate to ~1e-4.
    c.check("energy of a constant past is (1 + int s^2 g)/2", std::abs(E - 0.5 * (1.0 + m2)) < 1e-3,
            num(E) + " vs " + num(0.5 * (1.0 + m2)));
    c.check("dissipation of a constant past is -(1/2) int s^2 |g'|", dissipation_rhs(s) < 0.0 &&
                                                                        std::abs(dissipation_rhs(s) + 0.5 * m2) < 1e-3,
            num(dissipation_rhs(s)));
  });
  c.guarded("order", [&] {
    const auto st = dissipation_order_study({2e-3, 1e-3, 5e-4});
    std::ostringstream d;
    for (std::size_t i = 0; i < st.dts.size(); ++i) d << "dt=" << st.dts[i] << ": " << st.residuals[i] << "; ";
    d << "order " << st.order;
    c.check("dE/dt matches the dissipation rate with order >= 1.8", st.order >= 1.8, d.str());
    c.check("energy strictly decreasing at every record", st.strictly_decreasing);
  });
  c.guarded("resolvent", [&] {
    std::mt19937_64 rng(5);
    const StepParams params;
    for (int j = 0; j <= 2; ++j) {
      SimState s = simple_state(make_exponential_kernel(1.0, 1.0), 32, 1.0, j, 1e-2, {HistoryShape::Exponential, 1.0});
      s.y = random_smooth_field(*s.grid, rng);
      for (int m = 1; m <= s.sgrid->last(); ++m) s.eta.values.col(m) *= std::sin(s.sgrid->nodes()[m]) + 1.5;
      const GeneratorImage a = apply_generator(s);
      const double dt = 1e-2;
      const Field f1 = s.y - dt * a.y;
      HistoryField f2{s.eta.values - dt * a.eta.values};
      const SimState back = resolvent_solve(s, f1, f2, dt, params);
      const double err = std::max((back.y - s.y).norm() / s.y.norm(),
                                  (back.eta.values - s.eta.values).norm() / s.eta.values.norm());
      c.check("resolvent recovers U from (I - dt A) U, j = " + std::to_string(j), err <= 1e-10, num(err));
    }
  });
  c.guarded("higher energies", [&] {
    RunSpec spec{.initial = simple_state(make_exponential_kernel(1.0, 1.0), 64, 1.0, 0, 1e-3,
                                         {HistoryShape::Exponential, 1.0}),
                 .params = {}, .G0 = {}};
    spec.T = 0.5;
    spec.record_stride = 10;
    spec.higher_energies = true;
    const auto tr = run(spec);
    for (int k = 1; k <= 2; ++k) {
      std::optional<double> first, prev;
      double rise = 0.0;
      for (const auto& r : tr.records) {
        const auto v = k == 1 ? r.E1 : r.E2;
        if (!v) continue;
        if (!first) first = v;
        if (prev) rise = std::max(rise, *v - *prev);
        prev = v;
      }
      c.check("E" + std::to_string(k) + " non-increasing within 1e-6 of its first value",
              first && rise <= 1e-6 * *first, "largest rise " + num(rise));
    }
  });
  return c.take();
}

// ------------------------------------------------------------------ decay

std::vector<CheckResult> decay_suite() {
  Collector c;
  std::vector<double> t;
  for (int i = 1; i <= 1000; ++i) t.push_back(0.1 * i);
  auto series = [&](const std::function<double(double)>& f) {
    std::vector<double> E;
    for (double s : t) E.push_back(f(s));
    return E;
  };
  c.guarded("fits", [&] {
    const auto pw = fit_decay(t, series([](double s) { return 5.0 / (s * s); }), 10.0, 100.0);
    c.check("pure power law t^-2 fits rate 2 with R^2 = 1",
            std::abs(pw.rate - 2.0) < 1e-10 && std::abs(pw.r_squared - 1.0) < 1e-12, "rate " + num(pw.rate));
    const auto ex = fit_decay(t, series([](double s) { return std::exp(-s); }), 10.0, 100.0);
    c.check("exponential decay fits a steep rate", ex.rate > 10.0, "rate " + num(ex.rate));
    const auto flat = fit_decay(t, series([](double) { return 2.0; }), 10.0, 100.0);
    c.check("constant energy fits rate 0", std::abs(flat.rate) < 1e-12);
    c.check("window with too few records rejected",
            throws_kind(ErrorKind::Window, [&] { fit_decay(t, series([](double s) { return 1 / s; }), 10.0, 10.5); }));
    c.check("non-positive energy rejected",
            throws_kind(ErrorKind::Data, [&] { fit_decay(t, series([](double) { return 0.0; }), 10.0, 100.0); }));
  });
  c.guarded("envelopes", [&] {
    const auto g1 = build_Gn(ConvexityProfile::power(2.0, ConvexityProfile::Mode::Linear, 1.0), 1);
    const auto inv = check_envelope(t, series([](double s) { return 1.0 / s; }), g1, 10.0, 100.0);
    c.check("E = 1/t satisfies E <= alpha^2/t with alpha = 1", inv.holds && std::abs(inv.alpha - 1.0) < 1e-6,
            "alpha " + num(inv.alpha));
    const auto flat = check_envelope(t, series([](double) { return 1.0; }), g1, 10.0, 100.0, 5.0);
    c.check("constant energy over a long window exceeds the cap", !flat.holds && flat.capped);
  });
  c.guarded("run", [&] {
    RunSpec spec{.initial = simple_state(make_exponential_kernel(1.0, 1.0), 64, 10.0, 0, 1e-2, {}), .params = {},
                 .G0 = {}};
    spec.T = 100.0;
    spec.record_stride = 10;
    const auto tr = run(spec);
    std::vector<double> tt, E;
    for (const auto& r : tr.records) tt.push_back(r.t), E.push_back(r.E);
    const auto fit = fit_decay(tt, E, 10.0, 100.0);
    const auto env = check_envelope(
        tt, E, build_Gn(ConvexityProfile::power(2.0, ConvexityProfile::Mode::Linear, 1.0), 1), 10.0, 100.0);
    c.check("exponential kernel run decays at rate >= 0.8 on [10,100]", fit.rate >= 0.8, "rate " + num(fit.rate));
    c.check("exponential kernel run satisfies the n=1 envelope", env.holds, "alpha " + num(env.alpha));
  });
  return c.take();
}

}  // namespace

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"kernels", "operators", "memory", "identities", "decay"};
  return names;
}

std::vector<CheckResult> run_suite(const std::string& name) {
  if (name == "kernels") return kernels_suite();
  if (name == "operators") return operators_suite();
  if (name == "memory") return memory_suite();
  if (name == "identities") return identities_suite();
  if (name == "decay") return decay_suite();
  fail(ErrorKind::Config, "unknown verification suite '" + name + "'");
}

OrderStudy dissipation_order_study(const std::vector<double>& dts, double T, double probe_spacing) {
  OrderStudy out;
  out.dts = dts;
  SGridOptions opt;
  opt.uniform_span = 1e9;  // fully dt-spaced history grid
  for (double dt : dts) {
    RunSpec spec{.initial = simple_state(make_exponential_kernel(1.0, 1.0), 64, 1.0, 0, dt,
                                         {HistoryShape::Constant, 1.0}, opt),
                 .params = {}, .G0 = {}};
    spec.T = T;
    const auto tr = run(spec);
    if (tr.error) fail(tr.error_kind.value_or(ErrorKind::Numeric), *tr.error);
    const auto& r = tr.records;
    const long stride = std::lround(probe_spacing / dt);
    double worst = 0.0;
    for (std::size_t n = stride; n + 1 < r.size(); n += stride) {
      const double dEdt = (r[n + 1].E - r[n - 1].E) / (2.0 * dt);
      worst = std::max(worst, std::abs(dEdt - r[n].D));
    }
    for (std::size_t n = 1; n < r.size(); ++n) out.strictly_decreasing = out.strictly_decreasing && r[n].E < r[n - 1].E;
    out.residuals.push_back(worst);
  }
  double mx = 0, my = 0;
  const double n = static_cast<double>(dts.size());
  for (std::size_t i = 0; i < dts.size(); ++i) mx += std::log(dts[i]) / n, my += std::log(out.residuals[i]) / n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < dts.size(); ++i) {
    const double dx = std::log(dts[i]) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(out.residuals[i]) - my);
  }
  out.order = sxx > 0 ? sxy / sxx : 0.0;
  return out;
}

double backend_equivalence_study(int steps, double dt, unsigned seed) {
  std::mt19937_64 rng(seed);
  const std::vector<Kernel::Term> terms{{1.0, 1.0}, {0.5, 3.0}};
  auto grid = std::make_shared<const Grid>(build_grid({1.0}, {64}));
  SGridOptions opt;
  opt.uniform_span = 1e9;
  auto sg = std::make_shared<const SGrid>(make_prony_kernel(terms), dt, opt);
  const Field phi = random_smooth_field(*grid, rng);
  SimState s = make_state(grid, sg, 0, phi, [phi](double tau) { return Field(std::exp(-tau) * phi); }, true);
  const Stepper stepper(s, {});
  double worst = backend_gap(s);
  for (int n = 0; n < steps; ++n) {
    stepper.step(s);
    worst = std::max(worst, backend_gap(s));
  }
  return worst;
}

}  // namespace bhm
