#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "bhm/error.hpp"
#include "bhm/memory.hpp"
#include "bhm/profiles.hpp"
#include "oracles.hpp"

using namespace bhm;

namespace {

struct Setup {
  Grid grid = build_grid({1.0}, {16});
  Field phi = make_initial(grid, {});
};

SGridOptions uniform() {
  SGridOptions o;
  o.uniform_span = 1e9;
  return o;
}

}  // namespace

TEST_CASE("s-grid layout") {
  const SGrid sg(make_exponential_kernel(1.0, 1.0), 1e-2);
  const auto& s = sg.nodes();
  CHECK(s.front() == 0.0);
  CHECK(sg.uniform_cells() == 100);
  for (int m = 1; m <= sg.uniform_cells(); ++m) CHECK(s[m] - s[m - 1] == doctest::Approx(1e-2));
  for (int m = sg.uniform_cells() + 2; m <= sg.last(); ++m) CHECK(s[m] - s[m - 1] >= s[m - 1] - s[m - 2] - 1e-12);
  CHECK(make_exponential_kernel(1.0, 1.0).g(sg.s_max()) < 1e-10);
  CHECK_FALSE(sg.fully_uniform());
  CHECK(SGrid(make_exponential_kernel(1.0, 1.0), 1e-2, uniform()).fully_uniform());
}

TEST_CASE("s-grid weights against closed-form integrals of e^{-s}") {
  const SGrid sg(make_exponential_kernel(1.0, 1.0), 1e-2);
  const double sM = sg.s_max();
  double m1 = 0.0, a = 0.0;
  for (int m = 0; m <= sg.last(); ++m) {
    m1 += sg.energy_weights()[m] * sg.nodes()[m];
    a += sg.cell_masses()[m];
  }
  CHECK(m1 == doctest::Approx(1.0 - (1.0 + sM) * std::exp(-sM)).epsilon(1e-12));
  CHECK(a == doctest::Approx(1.0 - std::exp(-sM)).epsilon(1e-12));
  for (double w : sg.dissipation_weights()) CHECK(w <= 0.0);
  // g' = -g for this kernel, so the two weight sets are negatives.
  for (int m = 1; m <= sg.last(); ++m)
    CHECK(sg.dissipation_weights()[m] == doctest::Approx(-sg.energy_weights()[m]).epsilon(1e-9));
}

TEST_CASE("initial history: zero, constant and linear pasts") {
  Setup su;
  const SGrid sg(make_exponential_kernel(1.0, 1.0), 1e-3);
  const HistoryField zero = init_history([&](double) { return Field(Field::Zero(16)); }, su.grid, sg);
  CHECK(zero.values.norm() == 0.0);

  const HistoryField c = init_history([&](double) { return su.phi; }, su.grid, sg);
  for (int m = 0; m <= sg.last(); m += 97)
    CHECK((c.at(m) - sg.nodes()[m] * su.phi).norm() <= 1e-12 * (1.0 + sg.nodes()[m]) * su.phi.norm());

  const HistoryField lin = init_history([&](double tau) { return Field(tau * su.phi); }, su.grid, sg);
  for (int m = 0; m <= sg.last(); m += 97) {
    const double s = sg.nodes()[m];
    CHECK((lin.at(m) - 0.5 * s * s * su.phi).norm() <= 1e-6 * (1.0 + s * s) * su.phi.norm());
  }
}

TEST_CASE("advance_history: zero stays zero") {
  Setup su;
  const SGrid sg(make_exponential_kernel(1.0, 1.0), 1e-2);
  HistoryField h = init_history([&](double) { return Field(Field::Zero(16)); }, su.grid, sg);
  for (int n = 0; n < 10; ++n) advance_history(h, Field::Zero(16), 1e-2, sg);
  CHECK(h.values.norm() == 0.0);
}

TEST_CASE("advance_history: a steady solution is a fixed point") {
  Setup su;
  const SGrid sg(make_polynomial_kernel(1.0, 4.0), 1e-2);
  const HistoryField start = init_history([&](double) { return su.phi; }, su.grid, sg);
  HistoryField h = start;
  for (int n = 0; n < 100; ++n) advance_history(h, 1e-2 * su.phi, 1e-2, sg);
  CHECK((h.values - start.values).norm() <= 1e-12 * start.values.norm());
}

TEST_CASE("advance_history: one step from zero history") {
  Setup su;
  const SGrid sg(make_exponential_kernel(1.0, 1.0), 1e-2);
  HistoryField h = init_history([&](double) { return Field(Field::Zero(16)); }, su.grid, sg);
  const Field inc = 1e-2 * su.phi;
  advance_history(h, inc, 1e-2, sg);
  CHECK(h.at(0).norm() == 0.0);
  for (int m = 1; m <= sg.last(); ++m) CHECK((h.at(m) - inc).norm() <= 1e-15 * inc.norm());
}

TEST_CASE("advance_history rejects a mismatched step") {
  Setup su;
  const SGrid sg(make_exponential_kernel(1.0, 1.0), 1e-2);
  HistoryField h = init_history([&](double) { return su.phi; }, su.grid, sg);
  CHECK_THROWS_AS(advance_history(h, su.phi, 2e-2, sg), Error);
}

TEST_CASE("memory force of zero and of the constant history") {
  Setup su;
  const SGrid sg(make_exponential_kernel(1.0, 1.0), 1e-3);
  const HistoryField zero = init_history([&](double) { return Field(Field::Zero(16)); }, su.grid, sg);
  CHECK(memory_force(zero, sg, 0, su.grid).norm() == 0.0);

  const HistoryField h = init_history([&](double) { return su.phi; }, su.grid, sg);
  const double int_sg = oracle::simpson([](double s) { return s * std::exp(-s); }, 0.0, 80.0);
  CHECK(int_sg == doctest::Approx(1.0).epsilon(1e-9));
  const Field f0 = memory_force(h, sg, 0, su.grid);
  CHECK((f0 + int_sg * su.phi).norm() <= 1e-8 * su.phi.norm());

  const Field f2 = memory_force(h, sg, 2, su.grid);
  const Field want = -int_sg * apply_biharmonic(su.grid, su.phi);
  CHECK((f2 - want).norm() <= 1e-8 * want.norm());
}

TEST_CASE("direct convolution: zero slices and the constant past") {
  Setup su;
  const SGrid sg(make_exponential_kernel(1.0, 1.0), 1e-2);
  const YRingBuffer empty = init_ring([&](double) { return Field(Field::Zero(16)); }, Field::Zero(16), su.grid, sg);
  CHECK(memory_force_direct(empty, sg, 0, su.grid).norm() == 0.0);

  const YRingBuffer ring = init_ring([&](double) { return su.phi; }, su.phi, su.grid, sg);
  const double int_f = oracle::simpson([](double s) { return std::exp(-s); }, 0.0, 80.0);
  const Field direct = memory_force_direct(ring, sg, 0, su.grid);
  CHECK((direct + int_f * su.phi).norm() <= 1e-8 * su.phi.norm());
  const HistoryField h = init_history([&](double) { return su.phi; }, su.grid, sg);
  CHECK((direct - memory_force(h, sg, 0, su.grid)).norm() <= 1e-8 * su.phi.norm());
}

TEST_CASE("direct convolution needs a filled ring") {
  Setup su;
  const SGrid sg(make_exponential_kernel(1.0, 1.0), 1e-2);
  YRingBuffer ring(16, sg.ring_length());
  ring.push(su.phi);
  CHECK_THROWS_AS(memory_force_direct(ring, sg, 0, su.grid), Error);
}

TEST_CASE("backends agree on a random short history (Prony kernel)") {
  const std::vector<Kernel::Term> terms{{1.0, 1.0}, {0.5, 3.0}};
  const Grid grid = build_grid({1.0}, {24});
  const SGrid sg(make_prony_kernel(terms), 5e-2, uniform());
  std::mt19937_64 rng(9);
  std::normal_distribution<double> nd;
  // Random smooth-in-time past: a few random Fourier modes in tau per node.
  Eigen::MatrixXcd coef(grid.size(), 3);
  for (int i = 0; i < coef.size(); ++i) coef.data()[i] = cplx(nd(rng), nd(rng));
  auto past = [&](double tau) {
    Field y = Field::Zero(grid.size());
    for (int k = 0; k < 3; ++k) y += coef.col(k) * std::cos((k + 1) * 0.3 * tau) * std::exp(-0.2 * tau);
    return y;
  };
  const HistoryField h = init_history(past, grid, sg);
  const YRingBuffer ring = init_ring(past, past(0.0), grid, sg);
  for (int j = 0; j <= 2; ++j) {
    const Field a = memory_force(h, sg, j, grid), b = memory_force_direct(ring, sg, j, grid);
    CHECK((a - b).norm() <= 1e-6 * a.norm());
  }
}

TEST_CASE("ring buffer returns slices newest first") {
  YRingBuffer r(2, 3);
  for (int k = 1; k <= 4; ++k) r.push(Field::Constant(2, cplx(k, 0)));
  CHECK(r.filled() == 3);
  CHECK(r.slice(0)[0] == cplx(4, 0));
  CHECK(r.slice(2)[0] == cplx(2, 0));
  CHECK_THROWS_AS(r.slice(3), Error);
}
