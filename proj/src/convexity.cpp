#include "bhm/convexity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "bhm/error.hpp"
#include "bhm/quadrature.hpp"

namespace bhm {

double invert_monotone(const std::function<double(double)>& fn, double y) {
  if (!(y > 0.0)) {
    if (y == 0.0) return 0.0;
    std::ostringstream os;
    os << "cannot invert at negative or NaN argument " << y;
    fail(ErrorKind::Domain, os.str());
  }
  double hi = 1.0;
  while (fn(hi) < y) {
    hi *= 2.0;
    if (hi > 1e300) {
      std::ostringstream os;
      os << "no upper bracket for inversion at s = " << y;
      fail(ErrorKind::Domain, os.str());
    }
  }
  while (hi > 1e-300 && fn(0.5 * hi) >= y) hi *= 0.5;
  double lo = 0.5 * hi;
  double flo = fn(lo) - y, fhi = fn(hi) - y;
  if (flo >= 0.0) return lo;

  const double ytol = 1e-15 * y;
  // Bisection until the bracket is relatively narrow.
  for (int it = 0; it < 12; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = fn(mid) - y;
    if (std::abs(fm) <= ytol) return mid;
    if (fm < 0.0) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
      fhi = fm;
    }
  }
  // Secant (Illinois variant keeps the bracket).
  int side = 0;
  double x = lo;
  for (int it = 0; it < 200; ++it) {
    x = (lo * fhi - hi * flo) / (fhi - flo);
    if (!(x > lo && x < hi)) x = 0.5 * (lo + hi);
    const double fx = fn(x) - y;
    if (std::abs(fx) <= ytol) return x;
    if (fx < 0.0) {
      lo = x;
      flo = fx;
      if (side == -1) fhi *= 0.5;
      side = -1;
    } else {
      hi = x;
      fhi = fx;
      if (side == 1) flo *= 0.5;
      side = 1;
    }
    if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * hi) break;
  }
  return std::abs(flo) < std::abs(fhi) ? lo : hi;
}

ConvexityProfile ConvexityProfile::power(double p, Mode mode, std::optional<double> alpha0) {
  if (!(p > 1.0) || !std::isfinite(p)) {
    std::ostringstream os;
    os << "power profile needs p > 1 (got " << p << ")";
    fail(ErrorKind::Parameter, os.str());
  }
  auto prof = custom("power", [p](double s) { return std::pow(s, p); },
                     [p](double s) { return p * std::pow(s, p - 1.0); }, mode, alpha0);
  prof.exponent_ = p;
  return prof;
}

ConvexityProfile ConvexityProfile::custom(std::string name, Fn G, Fn G_prime, Mode mode,
                                          std::optional<double> alpha0) {
  if (mode == Mode::Linear && !(alpha0 && *alpha0 > 0.0))
    fail(ErrorKind::Parameter, "linear-mode profile needs a positive alpha0");
  if (mode == Mode::Convex) alpha0.reset();
  ConvexityProfile prof;
  prof.mode_ = mode;
  prof.alpha0_ = alpha0;
  prof.name_ = std::move(name);
  prof.G_ = std::move(G);
  prof.Gp_ = std::move(G_prime);
  return prof;
}

double ConvexityProfile::G_inverse(double s) const { return invert_monotone(G_, s); }

double ConvexityProfile::G_prime_inverse(double s) const { return invert_monotone(Gp_, s); }

double ConvexityProfile::G_star(double s) const {
  const double x = G_prime_inverse(s);
  return s * x - G_(x);
}

double ConvexityProfile::K(double s) const {
  if (s <= 0.0) return 0.0;
  return s / G_inverse(s);
}

double ConvexityProfile::G0(double s) const {
  return mode_ == Mode::Linear ? s : s * Gp_(s);
}

GnEvaluator::GnEvaluator(ConvexityProfile profile, int n) : profile_(std::move(profile)), n_(n) {
  if (n < 1) fail(ErrorKind::Parameter, "G_n order must be >= 1");
}

double GnEvaluator::G1(double s) const {
  if (profile_.mode() == ConvexityProfile::Mode::Linear) return s;
  return invert_monotone([this](double x) { return profile_.G0(x); }, s);
}

std::vector<double> GnEvaluator::chain(double s) const {
  std::vector<double> out;
  out.reserve(n_);
  out.push_back(G1(s));
  for (int m = 2; m <= n_; ++m) out.push_back(G1(s * out.back()));
  return out;
}

double GnEvaluator::operator()(double s) const { return chain(s).back(); }

GnEvaluator build_Gn(const ConvexityProfile& profile, int n) { return GnEvaluator(profile, n); }

double eval_pn(double p, int n) {
  if (!(p > 1.0)) {
    std::ostringstream os;
    os << "p_n needs p > 1 (got " << p << ")";
    fail(ErrorKind::Domain, os.str());
  }
  if (n < 1) fail(ErrorKind::Domain, "p_n needs n >= 1");
  double acc = 0.0, term = 1.0;
  for (int m = 1; m <= n; ++m) {
    term /= p;
    acc += term;
  }
  return acc;
}

namespace {

// Integrand values below this are treated as the end of the support.
constexpr double kIntegrandFloor = 1e-14;
constexpr double kTailCap = 1e15;

// Weighted tail integral / supremum with a doubling-increment test: on a
// convergent power-law tail the increments I(2S) - I(S) shrink geometrically,
// on a divergent one they do not.
TailIntegral tail_integral(const std::function<double(double)>& fn, bool supremum) {
  // Truncation point: integrand below floor (scanning the composite grid).
  const auto grid = composite_sample_grid(kTailCap);
  std::size_t cut = grid.size() - 1;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid[i] > 1.0 && std::abs(fn(grid[i])) < kIntegrandFloor) {
      cut = i;
      break;
    }
  }
  const double S = grid[cut];

  auto eval_upto = [&](double upper) {
    double acc = 0.0;
    double prev = 0.0;
    for (std::size_t i = 1; i < grid.size() && prev < upper; ++i) {
      const double a = prev, b = std::min(grid[i], upper);
      if (supremum)
        acc = std::max({acc, std::abs(fn(a)), std::abs(fn(b))});
      else
        acc += gauss_legendre(fn, a, b);
      prev = b;
    }
    if (prev < upper) {  // beyond the sampled grid: keep growing geometrically
      double h = (grid.back() - grid[grid.size() - 2]);
      while (prev < upper) {
        h *= 1.1;
        const double b = std::min(prev + h, upper);
        if (supremum)
          acc = std::max(acc, std::abs(fn(b)));
        else
          acc += gauss_legendre(fn, prev, b);
        prev = b;
      }
    }
    return acc;
  };

  TailIntegral out;
  out.truncated_at = S;
  const double i1 = eval_upto(S), i2 = eval_upto(2 * S), i4 = eval_upto(4 * S);
  out.value = i4;
  if (!std::isfinite(i4)) return out;
  if (supremum) {
    out.finite = std::abs(i4 - i1) <= 0.01 * std::abs(i1);
    return out;
  }
  const double d1 = i2 - i1, d2 = i4 - i2;
  const double negligible = 1e-12 * std::max(std::abs(i4), 1e-300);
  if (std::abs(d1) <= negligible && std::abs(d2) <= negligible) {
    out.finite = true;
    return out;
  }
  const double rho = d2 / d1;
  if (!(rho < 0.98) || rho < 0.0) return out;
  // Geometric extrapolation of the remaining tail, then the 1% doubling test.
  const double e4 = i4 + d2 * rho / (1.0 - rho);
  const double e2 = i2 + d2 / (1.0 - rho);
  out.value = e4;
  out.finite = std::abs(e4 - e2) <= 0.01 * std::abs(e4);
  return out;
}

}  // namespace

AssumptionReport validate_assumptions(const Kernel& k, const ConvexityProfile& p, double tol) {
  AssumptionReport r;
  if (k.is_none()) return r;

  const double g0 = k.g(0.0);
  r.s_max = k.tail_cutoff(tol);
  const auto grid = composite_sample_grid(r.s_max);
  const double c0 = k.c0();
  constexpr double slack = 1e-12;

  r.g_positive = r.g_nonincreasing = r.g_prime_bounded = true;
  for (double s : grid) {
    const double g = k.g(s), gp = k.g_prime(s);
    if (!(g > 0.0)) r.g_positive = false;
    if (gp > slack * g) r.g_nonincreasing = false;
    if (-gp > c0 * g * (1.0 + slack)) r.g_prime_bounded = false;
  }
  r.tail_vanishes = k.g(r.s_max) < tol * g0 * (1.0 + slack);

  // f(s) against the quadrature of the g tail, out to where g is negligible.
  const double far = k.tail_cutoff(1e-16);
  auto far_grid = composite_sample_grid(far);
  std::vector<double> tail_q(far_grid.size(), 0.0);
  for (std::size_t i = far_grid.size() - 1; i-- > 0;)
    tail_q[i] = tail_q[i + 1] + gauss_legendre([&](double s) { return k.g(s); }, far_grid[i], far_grid[i + 1]);
  const double resid = k.f(far_grid.back());  // tail beyond the grid
  r.max_tail_error = 0.0;
  for (std::size_t i = 0; i < far_grid.size(); ++i) {
    if (far_grid[i] > r.s_max) break;
    r.max_tail_error = std::max(r.max_tail_error, std::abs(k.f(far_grid[i]) - tail_q[i] - resid));
  }
  r.g0_quadrature = tail_q[0] + resid;
  const double qtol = 1e-8 * std::max(1.0, k.f(0.0));
  r.f_matches_tail = r.max_tail_error <= qtol;
  r.g0_matches_f0 = std::abs(r.g0_quadrature - k.f(0.0)) <= qtol;

  r.g_conditions = r.g_positive && r.g_nonincreasing && r.g_prime_bounded && r.g0_matches_f0;
  r.f_conditions = r.g_positive && r.g_nonincreasing && r.g_prime_bounded && k.f(0.0) > 0.0 &&
                   k.f(far) < 1e-4 * k.f(0.0);

  if (p.mode() == ConvexityProfile::Mode::Linear) {
    const double a0 = *p.alpha0();
    bool ok = true;
    for (double s : grid)
      if (k.g_prime(s) > -a0 * k.g(s) * (1.0 - slack)) ok = false;
    r.linear_rate_holds = ok;
  }

  // Weighted conditions only make sense once g' < 0 strictly.
  auto ratio = [&](double s) {
    const double gp = -k.g_prime(s);
    if (!(gp > 0.0)) return 0.0;
    return k.g(s) / p.G_inverse(gp);
  };
  r.weighted_tail = tail_integral([&](double s) { return s * s * ratio(s); }, false);
  r.m0 = tail_integral(ratio, true);

  const bool base = r.g_conditions && r.tail_vanishes && r.f_matches_tail;
  if (p.mode() == ConvexityProfile::Mode::Linear)
    r.admissible = base && r.linear_rate_holds.value_or(false);
  else
    r.admissible = base && r.weighted_tail->finite && r.m0->finite;
  return r;
}

}  // namespace bhm
