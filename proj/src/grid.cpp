#include "bhm/grid.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/SparseCholesky>

#include "bhm/error.hpp"

namespace bhm {

namespace {

using Trip = Eigen::Triplet<double>;

struct Layout {
  int n1, n2;  // interior counts (n2 = 1 in 1D)
  bool two_d;

  // Interior index of extended node (I, J), or -1 on the boundary.
  int interior(int I, int J) const {
    if (I < 1 || I > n1) return -1;
    if (two_d) {
      if (J < 1 || J > n2) return -1;
      return (I - 1) + n1 * (J - 1);
    }
    return I - 1;
  }
  int ext_index(int I, int J) const { return two_d ? I + (n1 + 2) * J : I; }
  int ext_size() const { return two_d ? (n1 + 2) * (n2 + 2) : n1 + 2; }
};

}  // namespace

Grid::Grid(std::vector<double> lengths, std::vector<int> counts)
    : lengths_(std::move(lengths)), counts_(std::move(counts)) {
  if (counts_.empty() || counts_.size() > 2 || lengths_.size() != counts_.size())
    fail(ErrorKind::Parameter, "grid needs 1 or 2 dimensions with matching lengths and counts");
  for (std::size_t d = 0; d < counts_.size(); ++d) {
    if (!(lengths_[d] > 0.0) || !std::isfinite(lengths_[d]))
      fail(ErrorKind::Parameter, "grid lengths must be positive");
    if (counts_[d] < 8) {
      std::ostringstream os;
      os << "grid needs at least 8 interior points per dimension (got " << counts_[d] << ")";
      fail(ErrorKind::Resolution, os.str());
    }
    h_.push_back(lengths_[d] / (counts_[d] + 1));
    volume_ *= h_.back();
  }
  const bool two_d = counts_.size() == 2;
  const Layout lay{counts_[0], two_d ? counts_[1] : 1, two_d};
  size_ = lay.n1 * lay.n2;
  const double hx = h_[0], hy = two_d ? h_[1] : 1.0;
  const double ix2 = 1.0 / (hx * hx), iy2 = two_d ? 1.0 / (hy * hy) : 0.0;

  // Dirichlet Laplacian.
  {
    std::vector<Trip> t;
    for (int J = 1; J <= lay.n2; ++J) {
      for (int I = 1; I <= lay.n1; ++I) {
        const int Jn = two_d ? J : 0;
        const int row = lay.interior(I, Jn);
        t.emplace_back(row, row, -2.0 * ix2 - 2.0 * iy2);
        for (int di : {-1, 1}) {
          const int c = lay.interior(I + di, Jn);
          if (c >= 0) t.emplace_back(row, c, ix2);
        }
        if (two_d) {
          for (int dj : {-1, 1}) {
            const int c = lay.interior(I, J + dj);
            if (c >= 0) t.emplace_back(row, c, iy2);
          }
        }
      }
    }
    lap_.resize(size_, size_);
    lap_.setFromTriplets(t.begin(), t.end());
  }

  // Laplacian at interior and boundary nodes with mirrored ghosts.
  {
    std::vector<Trip> t;
    const int ext = lay.ext_size();
    ext_w_.resize(ext);
    const int Jmax = two_d ? lay.n2 + 1 : 0;
    for (int J = 0; J <= Jmax; ++J) {
      for (int I = 0; I <= lay.n1 + 1; ++I) {
        const int row = lay.ext_index(I, J);
        double w = volume_;
        if (I == 0 || I == lay.n1 + 1) w *= 0.5;
        if (two_d && (J == 0 || J == lay.n2 + 1)) w *= 0.5;
        ext_w_[row] = w;
        auto add = [&](int Ii, int Jj, double c) {
          if (Ii == -1) Ii = 1;
          if (Ii == lay.n1 + 2) Ii = lay.n1;
          if (two_d) {
            if (Jj == -1) Jj = 1;
            if (Jj == lay.n2 + 2) Jj = lay.n2;
          }
          const int col = lay.interior(Ii, Jj);
          if (col >= 0) t.emplace_back(row, col, c);
        };
        add(I - 1, J, ix2);
        add(I, J, -2.0 * ix2);
        add(I + 1, J, ix2);
        if (two_d) {
          add(I, J - 1, iy2);
          add(I, J, -2.0 * iy2);
          add(I, J + 1, iy2);
        }
      }
    }
    lap_ext_.resize(ext, size_);
    lap_ext_.setFromTriplets(t.begin(), t.end());
  }

  SpMat weighted = ext_w_.asDiagonal() * lap_ext_;
  bih_ = SpMat(lap_ext_.transpose() * weighted) / volume_;
  bih_.prune(0.0);

  // Forward differences on edges, zero extension.
  {
    std::vector<Trip> t;
    int row = 0;
    const int Jlo = two_d ? 1 : 0, Jhi = two_d ? lay.n2 : 0;
    for (int J = Jlo; J <= Jhi; ++J) {
      for (int I = 0; I <= lay.n1; ++I, ++row) {
        const int a = lay.interior(I, J), b = lay.interior(I + 1, J);
        if (b >= 0) t.emplace_back(row, b, 1.0 / hx);
        if (a >= 0) t.emplace_back(row, a, -1.0 / hx);
      }
    }
    if (two_d) {
      for (int J = 0; J <= lay.n2; ++J) {
        for (int I = 1; I <= lay.n1; ++I, ++row) {
          const int a = lay.interior(I, J), b = lay.interior(I, J + 1);
          if (b >= 0) t.emplace_back(row, b, 1.0 / hy);
          if (a >= 0) t.emplace_back(row, a, -1.0 / hy);
        }
      }
    }
    grad_.resize(row, size_);
    grad_.setFromTriplets(t.begin(), t.end());
  }
}

std::array<double, 2> Grid::node(int k) const {
  const int n1 = counts_[0];
  const int i = k % n1, j = k / n1;
  return {(i + 1) * h_[0], counts_.size() == 2 ? (j + 1) * h_[1] : 0.0};
}

bool Grid::same_as(const Grid& other) const {
  return counts_ == other.counts_ && lengths_ == other.lengths_;
}

Grid build_grid(std::vector<double> lengths, std::vector<int> counts) {
  return Grid(std::move(lengths), std::move(counts));
}

void check_shape(const Grid& grid, const Field& u, const char* what) {
  if (u.size() != grid.size()) {
    std::ostringstream os;
    os << what << ": field has " << u.size() << " entries, grid has " << grid.size();
    fail(ErrorKind::Shape, os.str());
  }
}

Field apply_laplacian(const Grid& grid, const Field& u) {
  check_shape(grid, u, "apply_laplacian");
  return grid.laplacian() * u;
}

Field apply_biharmonic(const Grid& grid, const Field& u) {
  check_shape(grid, u, "apply_biharmonic");
  return grid.biharmonic() * u;
}

Field apply_power(const Grid& grid, const Field& u, int j) {
  switch (j) {
    case 0: check_shape(grid, u, "apply_power"); return u;
    case 1: return apply_laplacian(grid, u);
    case 2: return apply_biharmonic(grid, u);
    default: fail(ErrorKind::Parameter, "memory order j must be 0, 1 or 2");
  }
}

double inner(const Grid& grid, const Field& u, const Field& v) {
  check_shape(grid, u, "inner");
  check_shape(grid, v, "inner");
  return u.dot(v).real() * grid.cell_volume();  // dot conjugates the first argument
}

double norm_hj_squared(const Grid& grid, const Field& u, int j) {
  check_shape(grid, u, "norm_hj");
  switch (j) {
    case 0: return grid.cell_volume() * u.squaredNorm();
    case 1: return grid.cell_volume() * (grid.gradient() * u).squaredNorm();
    case 2: {
      const Field lu = grid.clamped_laplacian() * u;
      return (grid.clamped_weights().array() * lu.array().abs2()).sum();
    }
    default: fail(ErrorKind::Parameter, "norm order j must be 0, 1 or 2");
  }
}

double norm_hj(const Grid& grid, const Field& u, int j) { return std::sqrt(norm_hj_squared(grid, u, j)); }

double poincare_constant(const Grid& grid, double rel_tol, int max_iter) {
  const SpMat A = -grid.laplacian();
  Eigen::SimplicialLDLT<SpMat> solver(A);
  if (solver.info() != Eigen::Success) fail(ErrorKind::Numeric, "Poincare: factorization failed");
  Eigen::VectorXd x = Eigen::VectorXd::Ones(grid.size());
  x.normalize();
  double lambda = x.dot(A * x);
  for (int it = 0; it < max_iter; ++it) {
    Eigen::VectorXd y = solver.solve(x);
    y.normalize();
    const double next = y.dot(A * y);
    x = y;
    if (std::abs(next - lambda) <= rel_tol * next) return 1.0 / next;
    lambda = next;
  }
  std::ostringstream os;
  os << "Poincare inverse iteration did not converge in " << max_iter << " iterations";
  fail(ErrorKind::Numeric, os.str());
}

}  // namespace bhm
