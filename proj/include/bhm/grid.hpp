#pragma once

#include <array>
#include <complex>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace bhm {

using cplx = std::complex<double>;
/// Complex values at the interior grid points, x-index fastest.
using Field = Eigen::VectorXcd;
using SpMat = Eigen::SparseMatrix<double>;

/// Uniform rectangular grid on (0,L_1) x ... x (0,L_d), d in {1,2}, with
/// clamped boundary conditions u = grad u = 0.
///
/// Unknowns live at interior nodes x_i = i h, i = 1..N, h = L / (N + 1).
/// Operators:
///   laplacian    Dirichlet 3-point / 5-point stencil (boundary values 0).
///   biharmonic   clamped 5-point / 13-point stencil; the normal-derivative
///                condition is imposed by mirroring (ghost = interior mirror).
///                Assembled as L_c^T W L_c / V where L_c evaluates the
///                Laplacian at interior *and* boundary nodes with mirrored
///                ghosts and W holds trapezoid weights, so <B u, u> equals the
///                discrete ||Lap u||^2 exactly.
///   gradient     forward differences on the cell edges with zero extension;
///                ||grad u||^2 = <-laplacian u, u> exactly.
class Grid {
 public:
  Grid(std::vector<double> lengths, std::vector<int> counts);

  int dimension() const { return static_cast<int>(counts_.size()); }
  int size() const { return size_; }
  const std::vector<int>& counts() const { return counts_; }
  const std::vector<double>& lengths() const { return lengths_; }
  const std::vector<double>& spacing() const { return h_; }
  /// Volume weight prod h_i.
  double cell_volume() const { return volume_; }
  /// Coordinates of interior node `k`.
  std::array<double, 2> node(int k) const;

  const SpMat& laplacian() const { return lap_; }
  const SpMat& biharmonic() const { return bih_; }
  const SpMat& clamped_laplacian() const { return lap_ext_; }
  const Eigen::VectorXd& clamped_weights() const { return ext_w_; }
  const SpMat& gradient() const { return grad_; }

  bool same_as(const Grid& other) const;

 private:
  std::vector<double> lengths_;
  std::vector<int> counts_;
  std::vector<double> h_;
  int size_ = 0;
  double volume_ = 1.0;
  SpMat lap_, bih_, lap_ext_, grad_;
  Eigen::VectorXd ext_w_;
};

Grid build_grid(std::vector<double> lengths, std::vector<int> counts);

Field apply_laplacian(const Grid& grid, const Field& u);
Field apply_biharmonic(const Grid& grid, const Field& u);
/// Lap^j: identity, Laplacian, biharmonic for j = 0, 1, 2.
Field apply_power(const Grid& grid, const Field& u, int j);

/// Re sum u conj(v) times the volume weight.
double inner(const Grid& grid, const Field& u, const Field& v);
/// Squared norm ||Lap^{j/2} u||^2: L2 (j=0), gradient (j=1), Laplacian (j=2).
double norm_hj_squared(const Grid& grid, const Field& u, int j);
double norm_hj(const Grid& grid, const Field& u, int j);

/// 1 / lambda_min(-Laplacian) by inverse power iteration.
double poincare_constant(const Grid& grid, double rel_tol = 1e-12, int max_iter = 10000);

void check_shape(const Grid& grid, const Field& u, const char* what);

}  // namespace bhm
