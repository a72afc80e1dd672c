#include "bhm/evolution.hpp"

#include <cmath>
#include <sstream>
#include <vector>

#include "bhm/error.hpp"

namespace bhm {

Scheme parse_scheme(const std::string& name) {
  if (name == "strang_cn") return Scheme::StrangCN;
  if (name == "implicit_euler") return Scheme::ImplicitEuler;
  fail(ErrorKind::Config, "unknown scheme '" + name + "' (expected strang_cn or implicit_euler)");
}

const char* to_string(Scheme s) { return s == Scheme::StrangCN ? "strang_cn" : "implicit_euler"; }

SimState make_state(std::shared_ptr<const Grid> grid, std::shared_ptr<const SGrid> sgrid, int j,
                    const Field& y0, const HistoryFn& past, bool keep_ring) {
  if (j < 0 || j > 2) fail(ErrorKind::Parameter, "memory order j must be 0, 1 or 2");
  check_shape(*grid, y0, "make_state");
  SimState s;
  s.grid = std::move(grid);
  s.sgrid = std::move(sgrid);
  s.j = j;
  s.y = y0;
  s.eta = init_history(past, *s.grid, *s.sgrid);
  if (keep_ring) s.ring = init_ring(past, y0, *s.grid, *s.sgrid);
  return s;
}

namespace {

SpMatC identity(int n) {
  SpMatC I(n, n);
  I.setIdentity();
  return I;
}

// Dispersion operator i(Lap - Bih).
SpMatC dispersion(const Grid& grid) {
  return SpMatC((grid.laplacian() - grid.biharmonic()).cast<cplx>() * cplx(0.0, 1.0));
}

SpMatC memory_operator(const Grid& grid, int j) {
  switch (j) {
    case 0: return identity(grid.size());
    case 1: return SpMatC(-grid.laplacian().cast<cplx>());
    default: return SpMatC(grid.biharmonic().cast<cplx>());
  }
}

// b - A x accumulated in long double, rounded once.
Field extended_residual(const SpMatC& A, const Field& x, const Field& b) {
  using lc = std::complex<long double>;
  std::vector<lc> acc(b.data(), b.data() + b.size());
  for (int k = 0; k < A.outerSize(); ++k)
    for (SpMatC::InnerIterator it(A, k); it; ++it) acc[it.row()] -= lc(it.value()) * lc(x[it.col()]);
  Field r(b.size());
  for (int i = 0; i < r.size(); ++i) r[i] = cplx(static_cast<double>(acc[i].real()), static_cast<double>(acc[i].imag()));
  return r;
}

}  // namespace

LinearSolver::LinearSolver(SpMatC matrix, const StepParams& params)
    : A_(std::move(matrix)), tol_(params.tol), direct_(A_.rows() <= params.direct_max_unknowns) {
  A_.makeCompressed();
  if (direct_) {
    lu_.compute(A_);
    if (lu_.info() != Eigen::Success) fail(ErrorKind::Numeric, "sparse LU factorization failed");
  } else {
    it_.setTolerance(0.1 * params.tol);
    it_.setMaxIterations(params.max_iter);
    it_.compute(A_);
  }
}

Field LinearSolver::solve(const Field& rhs) const {
  Field x;
  if (direct_) {
    x = lu_.solve(rhs);
  } else {
    x = it_.solve(rhs);
  }
  const double bn = rhs.norm();
  if (direct_) {
    // Refinement with extended-precision residuals recovers the digits the
    // stiff dispersion costs the factorization.
    for (int pass = 0; pass < 3; ++pass) {
      const Field dx = lu_.solve(extended_residual(A_, x, rhs));
      x += dx;
      if (dx.norm() <= 1e-16 * x.norm()) break;
    }
  }
  const double res = (rhs - A_ * x).norm();
  if (!std::isfinite(res) || res > tol_ * std::max(bn, 1e-300)) {
    if (bn == 0.0 && res == 0.0) return x;
    std::ostringstream os;
    os << "linear solve failed: relative residual " << res / std::max(bn, 1e-300) << " > " << tol_;
    fail(ErrorKind::Numeric, os.str());
  }
  return x;
}

GeneratorImage apply_generator(const SimState& st) {
  const Grid& grid = *st.grid;
  const SGrid& sg = *st.sgrid;
  GeneratorImage out;
  const SpMatC L = dispersion(grid);
  out.y = L * st.y + memory_force(st.eta, sg, st.j, grid);
  out.eta.values = Eigen::MatrixXcd::Zero(st.eta.values.rows(), st.eta.values.cols());
  const auto& s = sg.nodes();
  for (int m = 1; m <= sg.last(); ++m)
    out.eta.values.col(m) = st.y - (st.eta.values.col(m) - st.eta.values.col(m - 1)) / (s[m] - s[m - 1]);
  return out;
}

Resolvent::Resolvent(const Grid& grid, const SGrid& sgrid, int j, double dt, const StepParams& params)
    : grid_(&grid), sgrid_(&sgrid), j_(j), dt_(dt) {
  if (!(dt > 0.0)) fail(ErrorKind::Parameter, "resolvent step must be positive");
  const int M = sgrid.last();
  const auto& s = sgrid.nodes();
  const auto& W = sgrid.energy_weights();
  alpha_.assign(M + 1, 0.0);
  ratio_.assign(M + 1, 0.0);
  double coupling = 0.0;
  for (int m = 1; m <= M; ++m) {
    ratio_[m] = dt / (s[m] - s[m - 1]);
    alpha_[m] = (dt + ratio_[m] * alpha_[m - 1]) / (1.0 + ratio_[m]);
    coupling += W[m] * alpha_[m];
  }
  const int n = grid.size();
  SpMatC A = identity(n) - dt * dispersion(grid) + (dt * coupling) * memory_operator(grid, j);
  solver_ = std::make_unique<LinearSolver>(std::move(A), params);
}

void Resolvent::solve(const Field& f1, const HistoryField& f2, Field& y, HistoryField& eta) const {
  const int M = sgrid_->last();
  const int n = grid_->size();
  if (f1.size() != n || f2.values.rows() != n || f2.nodes() != M + 1)
    fail(ErrorKind::Shape, "resolvent: right-hand side does not match the grids");
  const auto& W = sgrid_->energy_weights();
  // eta_m = alpha_m y + beta_m; beta_m stored in eta until y is known.
  eta.values.resize(n, M + 1);
  eta.values.col(0).setZero();
  Field wbeta = Field::Zero(n);
  for (int m = 1; m <= M; ++m) {
    eta.values.col(m) = (f2.values.col(m) + ratio_[m] * eta.values.col(m - 1)) / (1.0 + ratio_[m]);
    wbeta += W[m] * eta.values.col(m);
  }
  const Field rhs = f1 - dt_ * apply_memory_operator(*grid_, wbeta, j_);
  y = solver_->solve(rhs);
  for (int m = 1; m <= M; ++m) eta.values.col(m) += alpha_[m] * y;
}

SimState resolvent_solve(const SimState& state, const Field& f1, const HistoryField& f2, double dt,
                         const StepParams& params) {
  Resolvent r(*state.grid, *state.sgrid, state.j, dt, params);
  SimState out = state;
  r.solve(f1, f2, out.y, out.eta);
  return out;
}

Stepper::Stepper(const SimState& layout, const StepParams& params)
    : params_(params), j_(layout.j), dt_(layout.dt()), grid_(layout.grid), sgrid_(layout.sgrid) {
  if (!(params.tol > 0.0)) fail(ErrorKind::Parameter, "solver tolerance must be positive");
  const Grid& grid = *grid_;
  if (params.scheme == Scheme::StrangCN) {
    for (double a : sgrid_->cell_masses()) mass_ += a;
    SpMatC A = 2.0 * identity(grid.size()) - dt_ * dispersion(grid) +
               (0.5 * dt_ * dt_ * mass_) * memory_operator(grid, j_);
    cn_ = std::make_unique<LinearSolver>(std::move(A), params);
  } else {
    ie_ = std::make_unique<Resolvent>(grid, *sgrid_, j_, dt_, params);
  }
}

void Stepper::step(SimState& st) const {
  if (st.grid != grid_ || st.sgrid != sgrid_ || st.j != j_)
    fail(ErrorKind::State, "stepper used with a state of a different layout");
  const Grid& grid = *grid_;
  const SGrid& sg = *sgrid_;
  if (cn_) {
    shift_history(st.eta, sg);
    const Eigen::Map<const Eigen::VectorXd> a(sg.cell_masses().data(), sg.size());
    const Field pulled = st.eta.values * a.cast<cplx>();
    const Field rhs = 2.0 * st.y - dt_ * apply_memory_operator(grid, pulled, j_);
    const Field ybar = cn_->solve(rhs);
    st.y = 2.0 * ybar - st.y;
    const Field inc = dt_ * ybar;
    for (int m = 1; m <= sg.last(); ++m) st.eta.values.col(m) += inc;
  } else {
    const Field y_old = st.y;
    const HistoryField eta_old = st.eta;
    ie_->solve(y_old, eta_old, st.y, st.eta);
  }
  if (!st.y.allFinite()) fail(ErrorKind::Numeric, "non-finite solution after step");
  if (st.ring) st.ring->push(st.y);
  ++st.steps;
  st.t = st.steps * dt_;
}

SimState step(SimState state, const StepParams& params) {
  Stepper(state, params).step(state);
  return state;
}

}  // namespace bhm
