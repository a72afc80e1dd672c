#pragma once

#include <memory>
#include <optional>
#include <string>

#include <Eigen/SparseLU>
#include <Eigen/IterativeLinearSolvers>

#include "bhm/grid.hpp"
#include "bhm/memory.hpp"

namespace bhm {

enum class Scheme { StrangCN, ImplicitEuler };

Scheme parse_scheme(const std::string& name);
const char* to_string(Scheme s);

struct StepParams {
  Scheme scheme = Scheme::StrangCN;
  double tol = 1e-10;              // relative residual bound of each linear solve
  int max_iter = 2000;             // iterative solver cap
  int direct_max_unknowns = 200000;  // sparse LU up to this size, BiCGSTAB beyond
};

/// Discrete state (y, eta) with its grids. `ring` is only kept when the
/// direct convolution backend is wanted.
struct SimState {
  std::shared_ptr<const Grid> grid;
  std::shared_ptr<const SGrid> sgrid;
  int j = 0;
  double t = 0.0;
  long steps = 0;
  Field y;
  HistoryField eta;
  std::optional<YRingBuffer> ring;

  double dt() const { return sgrid->dt(); }
};

/// Builds a state from y(0) and the past y(-tau), tau > 0.
SimState make_state(std::shared_ptr<const Grid> grid, std::shared_ptr<const SGrid> sgrid, int j,
                    const Field& y0, const HistoryFn& past, bool keep_ring);

using SpMatC = Eigen::SparseMatrix<cplx>;

/// Factor-once complex sparse solver with a residual check.
class LinearSolver {
 public:
  LinearSolver(SpMatC matrix, const StepParams& params);
  Field solve(const Field& rhs) const;
  bool direct() const { return direct_; }

 private:
  SpMatC A_;
  double tol_;
  bool direct_;
  Eigen::SparseLU<SpMatC> lu_;
  mutable Eigen::BiCGSTAB<SpMatC, Eigen::DiagonalPreconditioner<cplx>> it_;
};

/// Generator of the semi-discrete system:
///   y'   = i(Lap - Bih) y - S_j sum_m W_m eta_m
///   eta' = y - (eta_m - eta_{m-1}) / (s_m - s_{m-1})
/// with S_j the positive operator of order j.
struct GeneratorImage {
  Field y;
  HistoryField eta;
};
GeneratorImage apply_generator(const SimState& state);

/// Solves (I - dt A) U = (f1, f2) by eliminating the history nodes
/// (eta_m = alpha_m y + beta_m) and one sparse solve for y.
class Resolvent {
 public:
  Resolvent(const Grid& grid, const SGrid& sgrid, int j, double dt, const StepParams& params);
  void solve(const Field& f1, const HistoryField& f2, Field& y, HistoryField& eta) const;

 private:
  const Grid* grid_;
  const SGrid* sgrid_;
  int j_;
  double dt_;
  std::vector<double> alpha_, ratio_;
  std::unique_ptr<LinearSolver> solver_;
};

SimState resolvent_solve(const SimState& state, const Field& f1, const HistoryField& f2, double dt,
                         const StepParams& params = {});

/// Time stepper bound to one state layout; the system matrix is factored once.
///
/// strang_cn: characteristic-midpoint Crank-Nicolson. With ybar the mean of
/// y^n and y^{n+1} and P_m the history shifted along s by dt:
///   eta^{n+1}_m = P_m + dt ybar
///   (y^{n+1} - y^n)/dt = L ybar - S_j sum_m a_m (P_m + eta^{n+1}_m)/2
/// where a_m is the g-mass of the cell left of s_m. The history enters at
/// cell midpoints, so the scheme is second order on the dt-spaced section,
/// and sum a_m |eta_m|^2 + |y|^2 never increases.
/// implicit_euler: one resolvent solve per step.
class Stepper {
 public:
  Stepper(const SimState& layout, const StepParams& params);
  void step(SimState& state) const;
  const StepParams& params() const { return params_; }

 private:
  StepParams params_;
  int j_;
  double dt_;
  std::shared_ptr<const Grid> grid_;
  std::shared_ptr<const SGrid> sgrid_;
  double mass_ = 0.0;  // sum a_m
  std::unique_ptr<LinearSolver> cn_;
  std::unique_ptr<Resolvent> ie_;
};

/// One step with a freshly built stepper (convenient, not fast).
SimState step(SimState state, const StepParams& params);

}  // namespace bhm
