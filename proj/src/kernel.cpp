#include "bhm/kernel.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include "bhm/error.hpp"
#include "bhm/quadrature.hpp"

namespace bhm {

namespace {

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    std::ostringstream os;
    os << name << " must be positive and finite (got " << v << ")";
    fail(ErrorKind::Parameter, os.str());
  }
}

}  // namespace

Kernel Kernel::none() {
  Kernel k;
  k.family_ = Family::None;
  k.name_ = "none";
  return k;
}

Kernel Kernel::custom(std::string name, Fn f, Fn g, Fn g_prime, double c0) {
  if (!f || !g || !g_prime) fail(ErrorKind::Parameter, "custom kernel needs f, g and g'");
  require_positive(c0, "c0");
  Kernel k;
  k.family_ = Family::Custom;
  k.name_ = std::move(name);
  k.c0_ = c0;
  k.f_custom_ = std::move(f);
  k.g_custom_ = std::move(g);
  k.gp_custom_ = std::move(g_prime);
  return k;
}

Kernel make_exponential_kernel(double d1, double q1) {
  require_positive(d1, "d1");
  require_positive(q1, "q1");
  Kernel k;
  k.family_ = Kernel::Family::Exponential;
  k.name_ = "exponential";
  k.terms_ = {{d1, q1}};
  k.c0_ = q1;
  return k;
}

Kernel make_polynomial_kernel(double d2, double q2) {
  require_positive(d2, "d2");
  require_positive(q2, "q2");
  if (!(q2 > 3.0)) {
    std::ostringstream os;
    os << "polynomial kernel requires q2 > 3 (got q2 = " << q2
       << "); otherwise the weighted tail integral of s^2 g / G^{-1}(-g') diverges "
          "for every power profile";
    fail(ErrorKind::Admissibility, os.str());
  }
  Kernel k;
  k.family_ = Kernel::Family::Polynomial;
  k.name_ = "polynomial";
  k.terms_ = {{d2, q2}};
  k.c0_ = q2;
  return k;
}

Kernel make_prony_kernel(std::span<const Kernel::Term> terms) {
  if (terms.empty()) fail(ErrorKind::Parameter, "prony kernel needs at least one term");
  Kernel k;
  k.family_ = Kernel::Family::Prony;
  k.name_ = "prony";
  for (const auto& t : terms) {
    require_positive(t.d, "prony d_k");
    require_positive(t.q, "prony q_k");
    k.terms_.push_back(t);
    k.c0_ = std::max(k.c0_, t.q);
  }
  return k;
}

std::string_view Kernel::family_name() const { return name_; }

double Kernel::f(double s) const {
  switch (family_) {
    case Family::None: return 0.0;
    case Family::Exponential:
    case Family::Prony: {
      double acc = 0.0;
      for (const auto& t : terms_) acc += t.d / t.q * std::exp(-t.q * s);
      return acc;
    }
    case Family::Polynomial: {
      const auto& t = terms_.front();
      return t.d * std::pow(1.0 + s, 1.0 - t.q) / (t.q - 1.0);
    }
    case Family::Custom: return f_custom_(s);
  }
  return 0.0;
}

double Kernel::g(double s) const {
  switch (family_) {
    case Family::None: return 0.0;
    case Family::Exponential:
    case Family::Prony: {
      double acc = 0.0;
      for (const auto& t : terms_) acc += t.d * std::exp(-t.q * s);
      return acc;
    }
    case Family::Polynomial: {
      const auto& t = terms_.front();
      return t.d * std::pow(1.0 + s, -t.q);
    }
    case Family::Custom: return g_custom_(s);
  }
  return 0.0;
}

double Kernel::g_prime(double s) const {
  switch (family_) {
    case Family::None: return 0.0;
    case Family::Exponential:
    case Family::Prony: {
      double acc = 0.0;
      for (const auto& t : terms_) acc -= t.q * t.d * std::exp(-t.q * s);
      return acc;
    }
    case Family::Polynomial: {
      const auto& t = terms_.front();
      return -t.q * t.d * std::pow(1.0 + s, -t.q - 1.0);
    }
    case Family::Custom: return gp_custom_(s);
  }
  return 0.0;
}

double Kernel::f_integral(double a, double b) const {
  switch (family_) {
    case Family::None: return 0.0;
    case Family::Exponential:
    case Family::Prony: {
      double acc = 0.0;
      for (const auto& t : terms_) {
        // (d/q^2)(e^{-qa} - e^{-qb}) written to keep precision for b - a small.
        acc += t.d / (t.q * t.q) * std::exp(-t.q * a) * -std::expm1(-t.q * (b - a));
      }
      return acc;
    }
    case Family::Polynomial: {
      const auto& t = terms_.front();
      const double c = t.d / ((t.q - 1.0) * (t.q - 2.0));
      return c * (std::pow(1.0 + a, 2.0 - t.q) - std::pow(1.0 + b, 2.0 - t.q));
    }
    case Family::Custom: return gauss_legendre(f_custom_, a, b);
  }
  return 0.0;
}

std::optional<double> Kernel::linear_rate() const {
  if (family_ != Family::Exponential && family_ != Family::Prony) return std::nullopt;
  double rate = terms_.front().q;
  for (const auto& t : terms_) rate = std::min(rate, t.q);
  return rate;
}

std::optional<double> Kernel::minimal_power_exponent() const {
  if (family_ != Family::Polynomial) return std::nullopt;
  const double q = terms_.front().q;
  return (q + 1.0) / (q - 3.0);
}

double Kernel::tail_cutoff(double rel_tol) const {
  if (is_none()) return 0.0;
  const double g0 = g(0.0);
  double lo = 0.0, hi = 1.0;
  while (g(hi) >= rel_tol * g0) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e15) fail(ErrorKind::Domain, "kernel tail does not fall below tolerance before s = 1e15");
  }
  for (int it = 0; it < 200 && hi - lo > 1e-12 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (g(mid) >= rel_tol * g0 ? lo : hi) = mid;
  }
  return hi;
}

}  // namespace bhm
