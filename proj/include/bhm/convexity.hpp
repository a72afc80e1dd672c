#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "bhm/kernel.hpp"

namespace bhm {

/// Solve fn(x) = y for x >= 0 with fn increasing and fn(0) = 0.
///
/// The upper bracket starts at 1 and doubles until fn(hi) >= y; the root is
/// then narrowed by bisection and finished with safeguarded secant steps.
/// Throws a domain error naming y when no bracket exists below 1e300.
double invert_monotone(const std::function<double(double)>& fn, double y);

/// Strictly convex increasing G with G(0) = G'(0) = 0, plus the derived maps
/// used by the decay envelope.
class ConvexityProfile {
 public:
  enum class Mode {
    Linear,  // g' <= -a0 g holds; G0(s) = s
    Convex,  // weighted tail condition; G0(s) = s G'(s)
  };

  using Fn = std::function<double(double)>;

  /// G(s) = s^p, p > 1.
  static ConvexityProfile power(double p, Mode mode, std::optional<double> alpha0 = std::nullopt);
  static ConvexityProfile custom(std::string name, Fn G, Fn G_prime, Mode mode,
                                 std::optional<double> alpha0 = std::nullopt);

  Mode mode() const { return mode_; }
  std::optional<double> alpha0() const { return alpha0_; }
  std::optional<double> exponent() const { return exponent_; }
  const std::string& name() const { return name_; }

  double G(double s) const { return G_(s); }
  double G_prime(double s) const { return Gp_(s); }
  double G_inverse(double s) const;
  double G_prime_inverse(double s) const;
  /// Convex conjugate G*(s) = s (G')^{-1}(s) - G((G')^{-1}(s)).
  double G_star(double s) const;
  /// K(s) = s / G^{-1}(s), K(0) = 0.
  double K(double s) const;
  /// G0(s) = s (linear mode) or s G'(s) (convex mode).
  double G0(double s) const;

 private:
  ConvexityProfile() = default;

  Mode mode_ = Mode::Linear;
  std::optional<double> alpha0_;
  std::optional<double> exponent_;
  std::string name_;
  Fn G_, Gp_;
};

/// Evaluates G_n with G_1 = G0^{-1} and G_m(s) = G_1(s G_{m-1}(s)).
class GnEvaluator {
 public:
  GnEvaluator(ConvexityProfile profile, int n);

  int order() const { return n_; }
  const ConvexityProfile& profile() const { return profile_; }

  double G1(double s) const;
  double operator()(double s) const;
  /// G_1(s), ..., G_n(s).
  std::vector<double> chain(double s) const;

 private:
  ConvexityProfile profile_;
  int n_;
};

GnEvaluator build_Gn(const ConvexityProfile& profile, int n);

/// p_n = sum_{m=1}^n p^{-m}: the exponent of t^{-p_n} for G(s) = s^p.
double eval_pn(double p, int n);

struct TailIntegral {
  double value = 0.0;
  bool finite = false;
  double truncated_at = 0.0;
};

struct AssumptionReport {
  // Sampled kernel conditions.
  bool g_positive = false;
  bool g_nonincreasing = false;
  bool g_prime_bounded = false;      // -g' <= c0 g
  bool f_matches_tail = false;       // f(s) = int_s^inf g
  bool g0_matches_f0 = false;
  bool f_conditions = false;         // f' < 0, 0 <= f'' <= -c0 f', f(0) > 0, f -> 0
  bool g_conditions = false;         // g > 0, 0 <= -g' <= c0 g, g0 = f(0)
  bool tail_vanishes = false;        // g(s_max) < tol
  std::optional<bool> linear_rate_holds;  // g' <= -a0 g (linear mode only)
  std::optional<TailIntegral> weighted_tail;  // int s^2 g / G^{-1}(-g')
  std::optional<TailIntegral> m0;             // sup g / G^{-1}(-g')
  double s_max = 0.0;
  double g0_quadrature = 0.0;
  double max_tail_error = 0.0;
  bool admissible = false;
};

/// Sample-based check of the kernel/profile admissibility conditions.
AssumptionReport validate_assumptions(const Kernel& k, const ConvexityProfile& p,
                                      double tol = 1e-10);

}  // namespace bhm
