#include <doctest.h>

#include <cmath>
#include <functional>
#include <vector>

#include "bhm/decay.hpp"
#include "bhm/error.hpp"

using namespace bhm;
using Mode = ConvexityProfile::Mode;

namespace {

struct Series {
  std::vector<double> t, E;
};

Series sample(const std::function<double(double)>& f, double t1 = 100.0, double dt = 0.1) {
  Series s;
  for (double t = dt; t <= t1 + 1e-9; t += dt) {
    s.t.push_back(t);
    s.E.push_back(f(t));
  }
  return s;
}

}  // namespace

TEST_CASE("fit of an exact power law") {
  const auto s = sample([](double t) { return 5.0 / (t * t); });
  const auto fit = fit_decay(s.t, s.E, 10.0, 100.0);
  CHECK(fit.rate == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(fit.r_squared == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::exp(fit.intercept) == doctest::Approx(5.0).epsilon(1e-10));
  CHECK(fit.confident);
}

TEST_CASE("fit of exponential decay flags curvature") {
  const auto s = sample([](double t) { return std::exp(-t); });
  const auto fit = fit_decay(s.t, s.E, 10.0, 100.0);
  // The local log-log slope at the geometric midpoint sqrt(1000) is t itself.
  CHECK(fit.rate > 10.0);
  CHECK(fit.r_squared < 0.99);
}

TEST_CASE("fit of a constant energy") {
  const auto s = sample([](double) { return 3.0; });
  const auto fit = fit_decay(s.t, s.E, 10.0, 100.0);
  CHECK(fit.rate == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(fit.r_squared == 1.0);
}

TEST_CASE("fit errors") {
  const auto s = sample([](double t) { return 1.0 / t; });
  CHECK_THROWS_AS(fit_decay(s.t, s.E, 0.0, 100.0), Error);
  CHECK_THROWS_AS(fit_decay(s.t, s.E, 50.0, 20.0), Error);
  CHECK_THROWS_AS(fit_decay(s.t, s.E, 10.0, 10.5), Error);
  auto bad = s;
  bad.E[200] = 0.0;
  try {
    fit_decay(bad.t, bad.E, 10.0, 100.0);
    FAIL("no error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Data);
  }
}

TEST_CASE("envelope: E = 1/t needs alpha = 1 in linear mode") {
  const auto s = sample([](double t) { return 1.0 / t; });
  const auto env = check_envelope(s.t, s.E, build_Gn(ConvexityProfile::power(2.0, Mode::Linear, 1.0), 1), 10.0, 100.0);
  CHECK(env.holds);
  CHECK(env.alpha == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("envelope: t^{-3/4} against G_2 for G = s^2") {
  const auto s = sample([](double t) { return std::pow(t, -0.75); });
  const auto env = check_envelope(s.t, s.E, build_Gn(ConvexityProfile::power(2.0, Mode::Convex), 2), 10.0, 100.0);
  CHECK(env.holds);
  CHECK(std::isfinite(env.alpha));
  // E = alpha (alpha / 2t)^{3/4} exactly when alpha^{7/4} = 2^{3/4}.
  CHECK(env.alpha == doctest::Approx(std::pow(2.0, 3.0 / 7.0)).epsilon(1e-6));
}

TEST_CASE("envelope: a constant energy fails at any cap") {
  const auto s = sample([](double) { return 1.0; }, 1e4, 1.0);
  const auto gn = build_Gn(ConvexityProfile::power(2.0, Mode::Linear, 1.0), 1);
  for (double cap : {10.0, 50.0}) {
    const auto env = check_envelope(s.t, s.E, gn, 10.0, 1e4, cap);
    CHECK_FALSE(env.holds);
    CHECK(env.capped);
  }
}

TEST_CASE("envelope alpha is the smallest feasible value") {
  const auto s = sample([](double t) { return 4.0 / t; });
  const auto gn = build_Gn(ConvexityProfile::power(2.0, Mode::Linear, 1.0), 1);
  const auto env = check_envelope(s.t, s.E, gn, 10.0, 100.0);
  CHECK(env.alpha == doctest::Approx(2.0).epsilon(1e-6));
  for (std::size_t i = 0; i < s.t.size(); ++i)
    if (s.t[i] >= 10.0) CHECK(s.E[i] <= env.alpha * gn(env.alpha / s.t[i]) * (1 + 1e-9));
}
