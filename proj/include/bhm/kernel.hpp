#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace bhm {

/// Relaxation pair (f, g = -f') of the memory term.
///
/// f is the memory weight entering the convolution form of the equation, g
/// its dissipation density. Built-in families have closed forms for f, g, g'
/// and for the primitive of f; custom kernels fall back to Gauss-Legendre
/// quadrature for the latter.
class Kernel {
 public:
  enum class Family { None, Exponential, Polynomial, Prony, Custom };

  struct Term {
    double d;
    double q;
  };

  using Fn = std::function<double(double)>;

  /// g == 0: the memory-free equation.
  static Kernel none();
  static Kernel custom(std::string name, Fn f, Fn g, Fn g_prime, double c0);

  double f(double s) const;
  double g(double s) const;
  double g_prime(double s) const;
  /// Integral of f over [a, b].
  double f_integral(double a, double b) const;

  /// Constant in 0 <= -g' <= c0 g.
  double c0() const { return c0_; }
  /// Total mass of g; equals f(0).
  double g0() const { return f(0.0); }

  Family family() const { return family_; }
  std::string_view family_name() const;
  bool is_none() const { return family_ == Family::None; }
  std::span<const Term> terms() const { return terms_; }

  /// Rate a0 with g' <= -a0 g when the family guarantees it (sums of
  /// exponentials); empty otherwise.
  std::optional<double> linear_rate() const;

  /// Smallest power p such that G(s) = s^p makes the weighted tail integral
  /// finite (polynomial family only).
  std::optional<double> minimal_power_exponent() const;

  /// First s >= 0 (on a doubling search) with g(s) < rel_tol * g(0).
  double tail_cutoff(double rel_tol) const;

 private:
  Kernel() = default;

  friend Kernel make_exponential_kernel(double, double);
  friend Kernel make_polynomial_kernel(double, double);
  friend Kernel make_prony_kernel(std::span<const Kernel::Term>);

  Family family_ = Family::None;
  std::string name_;
  std::vector<Term> terms_;  // exponential / polynomial store a single term
  double c0_ = 0.0;
  Fn f_custom_, g_custom_, gp_custom_;
};

/// g(s) = d1 exp(-q1 s).
Kernel make_exponential_kernel(double d1, double q1);
/// g(s) = d2 (1 + s)^(-q2), q2 > 3.
Kernel make_polynomial_kernel(double d2, double q2);
/// g(s) = sum_k d_k exp(-q_k s).
Kernel make_prony_kernel(std::span<const Kernel::Term> terms);

}  // namespace bhm
