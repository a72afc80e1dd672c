#include <doctest.h>

#include <cmath>
#include <vector>

#include "bhm/convexity.hpp"
#include "bhm/error.hpp"
#include "bhm/kernel.hpp"
#include "oracles.hpp"

using namespace bhm;

namespace {

template <class F>
ErrorKind kind_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::Numeric;
}

}  // namespace

TEST_CASE("exponential kernel (1,1): values at zero and rates") {
  const Kernel k = make_exponential_kernel(1.0, 1.0);
  CHECK(k.g(0.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(k.g_prime(0.0) == doctest::Approx(-1.0).epsilon(1e-15));
  REQUIRE(k.linear_rate());
  CHECK(*k.linear_rate() == doctest::Approx(1.0));
  CHECK(k.c0() == doctest::Approx(1.0));
}

TEST_CASE("exponential kernel (1,1): mass of g equals f(0)") {
  const Kernel k = make_exponential_kernel(1.0, 1.0);
  const double mass = oracle::simpson([&](double s) { return k.g(s); }, 0.0, 60.0);
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(k.g0() == doctest::Approx(mass).epsilon(1e-10));
}

TEST_CASE("exponential kernel with zero rate is rejected") {
  CHECK(kind_of([] { make_exponential_kernel(2.0, 0.0); }) == ErrorKind::Parameter);
}

TEST_CASE("polynomial kernel (1,4)") {
  const Kernel k = make_polynomial_kernel(1.0, 4.0);
  REQUIRE(k.minimal_power_exponent());
  CHECK(*k.minimal_power_exponent() == doctest::Approx(5.0));
  // Tail of (1+s)^-4 beyond 2000 is below 1e-10.
  const double mass = oracle::simpson([&](double s) { return k.g(s); }, 0.0, 2000.0, 2000000);
  CHECK(mass == doctest::Approx(1.0 / 3.0).epsilon(1e-9));
  CHECK(k.f(0.0) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("polynomial kernel with q2 = 2 is inadmissible and cites q2 > 3") {
  try {
    make_polynomial_kernel(1.0, 2.0);
    FAIL("no error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Admissibility);
    CHECK(std::string(e.what()).find("q2 > 3") != std::string::npos);
  }
}

TEST_CASE("single-term prony series equals the exponential kernel") {
  const std::vector<Kernel::Term> one{{1.0, 1.0}};
  const Kernel p = make_prony_kernel(one);
  const Kernel e = make_exponential_kernel(1.0, 1.0);
  for (double s = 0.0; s <= 30.0; s += 0.37) {
    CHECK(p.g(s) == doctest::Approx(e.g(s)).epsilon(1e-15));
    CHECK(p.f(s) == doctest::Approx(e.f(s)).epsilon(1e-15));
    CHECK(p.g_prime(s) == doctest::Approx(e.g_prime(s)).epsilon(1e-15));
  }
}

TEST_CASE("two-term prony series: g(0) and total mass") {
  const std::vector<Kernel::Term> terms{{1.0, 1.0}, {1.0, 2.0}};
  const Kernel k = make_prony_kernel(terms);
  CHECK(k.g(0.0) == doctest::Approx(2.0));
  const double mass = oracle::simpson([&](double s) { return k.g(s); }, 0.0, 60.0);
  CHECK(mass == doctest::Approx(1.5).epsilon(1e-10));
  CHECK(k.g0() == doctest::Approx(1.5).epsilon(1e-14));
}

TEST_CASE("prony series with a negative rate is rejected") {
  const std::vector<Kernel::Term> bad{{1.0, 1.0}, {2.0, -1.0}};
  CHECK(kind_of([&] { make_prony_kernel(bad); }) == ErrorKind::Parameter);
}

TEST_CASE("f is the tail integral of g") {
  const Kernel k = make_polynomial_kernel(2.0, 5.0);
  for (double s : {0.0, 0.3, 4.0}) {
    const double tail = oracle::simpson([&](double x) { return k.g(x); }, s, 400.0, 400000);
    CHECK(k.f(s) == doctest::Approx(tail).epsilon(1e-8));
  }
}

TEST_CASE("tail cutoff lies where g has dropped below the tolerance") {
  const Kernel k = make_exponential_kernel(1.0, 1.0);
  const double s = k.tail_cutoff(1e-10);
  CHECK(k.g(s) < 1e-10);
  CHECK(s < 2.0 * std::log(1e10) + 1.0);
}

TEST_CASE("assumptions: exponential kernel with the linear profile") {
  const auto rep = validate_assumptions(make_exponential_kernel(1.0, 1.0),
                                        ConvexityProfile::power(2.0, ConvexityProfile::Mode::Linear, 1.0));
  REQUIRE(rep.linear_rate_holds);
  CHECK(*rep.linear_rate_holds);
  CHECK(rep.g_conditions);
  CHECK(rep.f_conditions);
  CHECK(rep.admissible);
}

TEST_CASE("assumptions: polynomial kernel (1,4) with G = s^6 has finite tail integrals") {
  const auto rep =
      validate_assumptions(make_polynomial_kernel(1.0, 4.0), ConvexityProfile::power(6.0, ConvexityProfile::Mode::Convex));
  REQUIRE(rep.weighted_tail);
  REQUIRE(rep.m0);
  CHECK(rep.weighted_tail->finite);
  CHECK(rep.m0->finite);
  CHECK(rep.admissible);
  // Independent check: with G^{-1}(y) = y^{1/6} and -g' = 4(1+s)^-5 the
  // integrand is s^2 (1+s)^-4 / (4(1+s)^-5)^{1/6} ~ s^{-7/6}.
  // The tail decays slowly, so integrate in u = log s up to s = e^60 and add
  // the remaining power-law tail in closed form.
  auto h = [](double s) { return s * s * std::pow(1 + s, -4.0) / std::pow(4.0 * std::pow(1 + s, -5.0), 1.0 / 6.0); };
  const double ref = oracle::simpson(h, 0.0, 1.0) +
                     oracle::simpson([&](double u) { return h(std::exp(u)) * std::exp(u); }, 0.0, 60.0, 200000) +
                     6.0 * std::pow(4.0, -1.0 / 6.0) * std::exp(-10.0);
  CHECK(rep.weighted_tail->value == doctest::Approx(ref).epsilon(0.01));
}

TEST_CASE("assumptions: polynomial kernel (1,4) with G = s^2 diverges") {
  const auto rep =
      validate_assumptions(make_polynomial_kernel(1.0, 4.0), ConvexityProfile::power(2.0, ConvexityProfile::Mode::Convex));
  REQUIRE(rep.weighted_tail);
  CHECK_FALSE(rep.weighted_tail->finite);
  CHECK_FALSE(rep.admissible);
}
