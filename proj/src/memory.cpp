#include "bhm/memory.hpp"

#include <cmath>
#include <sstream>

#include "bhm/error.hpp"

namespace bhm {

SGrid::SGrid(const Kernel& kernel, double dt, const SGridOptions& opt) : kernel_(kernel), dt_(dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) fail(ErrorKind::Parameter, "time step must be positive");
  if (!(opt.ratio >= 1.0)) fail(ErrorKind::Parameter, "s-grid ratio must be >= 1");
  if (!(opt.tail_tol > 0.0 && opt.tail_tol < 1.0)) fail(ErrorKind::Parameter, "s-grid tail tolerance must lie in (0,1)");
  if (!(opt.uniform_span >= 0.0)) fail(ErrorKind::Parameter, "s-grid uniform span must be >= 0");

  s_.push_back(0.0);
  if (!kernel.is_none()) {
    const double s_max = kernel.tail_cutoff(opt.tail_tol);
    const double span = std::min(opt.uniform_span, s_max);
    const int F = std::max(1, static_cast<int>(std::ceil(span / dt - 1e-9)));
    for (int m = 1; m <= F; ++m) s_.push_back(m * dt);
    uniform_cells_ = F;
    double h = dt;
    while (s_.back() < s_max) {
      h *= opt.ratio;
      s_.push_back(s_.back() + h);
    }
    if (opt.ratio == 1.0) uniform_cells_ = last();
  }

  const int M = last();
  w_.assign(M + 1, 0.0);
  wp_.assign(M + 1, 0.0);
  a_.assign(M + 1, 0.0);
  theta_.assign(M + 1, 1.0);
  if (M == 0) {
    conv_.assign(1, 0.0);
    return;
  }

  const double fM = kernel.f(s_.back());
  truncated_ = fM;
  // Cell averages of the truncated f and of g over [s_k, s_{k+1}].
  std::vector<double> avg_f(M), avg_g(M);
  for (int k = 0; k < M; ++k) {
    const double h = s_[k + 1] - s_[k];
    avg_f[k] = kernel.f_integral(s_[k], s_[k + 1]) / h - fM;
    avg_g[k] = (kernel.f(s_[k]) - kernel.f(s_[k + 1])) / h;
  }
  for (int m = 1; m < M; ++m) {
    w_[m] = avg_f[m - 1] - avg_f[m];
    wp_[m] = avg_g[m] - avg_g[m - 1];
  }
  w_[M] = avg_f[M - 1];
  wp_[M] = kernel.g(s_[M]) - avg_g[M - 1];
  for (int m = 1; m <= M; ++m) {
    a_[m] = kernel.f(s_[m - 1]) - kernel.f(s_[m]);
    theta_[m] = dt / (s_[m] - s_[m - 1]);
  }

  // Trapezoid weights of int_0^{s_max} (f - f(s_max)) y(t - s) ds on the
  // dt-spaced past slices.
  const double sM = s_.back();
  const int R = static_cast<int>(std::ceil(sM / dt - 1e-9));
  auto ft_integral = [&](double a, double b) { return kernel.f_integral(a, b) - fM * (b - a); };
  conv_.assign(R + 1, 0.0);
  for (int i = 0; i <= R; ++i) {
    const double lo = std::max(0.0, (i - 1) * dt);
    const double hi = std::min((i + 1) * dt, sM);
    if (hi > lo) conv_[i] = 0.5 * ft_integral(lo, hi);
  }
}

YRingBuffer::YRingBuffer(int field_size, int capacity) : data_(field_size, capacity) {
  if (capacity < 1) fail(ErrorKind::Parameter, "ring buffer capacity must be >= 1");
  data_.setZero();
}

void YRingBuffer::push(const Field& y) {
  if (y.size() != data_.rows()) fail(ErrorKind::Shape, "ring buffer: slice size mismatch");
  head_ = (head_ + 1) % capacity();
  data_.col(head_) = y;
  filled_ = std::min(filled_ + 1, capacity());
}

Eigen::Ref<const Eigen::VectorXcd> YRingBuffer::slice(int i) const {
  if (i < 0 || i >= filled_) {
    std::ostringstream os;
    os << "ring buffer: slice " << i << " not available (" << filled_ << " stored)";
    fail(ErrorKind::State, os.str());
  }
  const int col = ((head_ - i) % capacity() + capacity()) % capacity();
  return data_.col(col);
}

HistoryField init_history(const HistoryFn& past, const Grid& grid, const SGrid& sgrid) {
  HistoryField h;
  h.values = Eigen::MatrixXcd::Zero(grid.size(), sgrid.size());
  const double dt = sgrid.dt();
  const auto& s = sgrid.nodes();
  Field prev = past(0.0);
  check_shape(grid, prev, "init_history");
  Field acc = Field::Zero(grid.size());
  long i = 0;
  for (int m = 1; m <= sgrid.last(); ++m) {
    const double slack = 1e-9 * dt;
    while ((i + 1) * dt <= s[m] + slack) {
      Field next = past((i + 1) * dt);
      acc += (0.5 * dt) * (prev + next);
      prev = std::move(next);
      ++i;
    }
    const double rem = s[m] - i * dt;
    if (rem > slack)
      h.values.col(m) = acc + (0.5 * rem) * (prev + past(s[m]));
    else
      h.values.col(m) = acc;
  }
  return h;
}

YRingBuffer init_ring(const HistoryFn& past, const Field& y_now, const Grid& grid, const SGrid& sgrid) {
  check_shape(grid, y_now, "init_ring");
  const int cap = sgrid.ring_length();
  YRingBuffer ring(grid.size(), cap);
  for (int i = cap - 1; i >= 1; --i) ring.push(past(i * sgrid.dt()));
  ring.push(y_now);
  return ring;
}

void shift_history(HistoryField& h, const SGrid& sgrid) {
  const auto& theta = sgrid.shift_fractions();
  for (int m = sgrid.last(); m >= 1; --m) {
    const double th = theta[m];
    if (th == 1.0)
      h.values.col(m) = h.values.col(m - 1);
    else
      h.values.col(m) = (1.0 - th) * h.values.col(m) + th * h.values.col(m - 1);
  }
  h.values.col(0).setZero();
}

void advance_history(HistoryField& h, const Field& y_integral, double dt, const SGrid& sgrid) {
  if (std::abs(dt - sgrid.dt()) > 1e-12 * sgrid.dt()) {
    std::ostringstream os;
    os << "history step dt = " << dt << " does not match the s-grid spacing " << sgrid.dt();
    fail(ErrorKind::Config, os.str());
  }
  if (y_integral.size() != h.values.rows()) fail(ErrorKind::Shape, "advance_history: field size mismatch");
  shift_history(h, sgrid);
  for (int m = 1; m <= sgrid.last(); ++m) h.values.col(m) += y_integral;
}

Field apply_memory_operator(const Grid& grid, const Field& u, int j) {
  switch (j) {
    case 0: return u;
    case 1: return -(grid.laplacian() * u);
    case 2: return grid.biharmonic() * u;
    default: fail(ErrorKind::Parameter, "memory order j must be 0, 1 or 2");
  }
}

Field memory_force(const HistoryField& h, const SGrid& sgrid, int j, const Grid& grid) {
  if (h.values.rows() != grid.size() || h.nodes() != sgrid.size())
    fail(ErrorKind::Shape, "memory_force: history does not match the grids");
  const Eigen::Map<const Eigen::VectorXd> w(sgrid.energy_weights().data(), sgrid.size());
  const Field sum = h.values * w.cast<cplx>();
  return -apply_memory_operator(grid, sum, j);
}

Field memory_force_direct(const YRingBuffer& ring, const SGrid& sgrid, int j, const Grid& grid) {
  if (ring.filled() < sgrid.ring_length()) {
    std::ostringstream os;
    os << "ring buffer holds " << ring.filled() << " slices, direct convolution needs "
       << sgrid.ring_length();
    fail(ErrorKind::State, os.str());
  }
  const auto& c = sgrid.convolution_weights();
  Field sum = Field::Zero(grid.size());
  for (int i = 0; i < sgrid.ring_length(); ++i)
    if (c[i] != 0.0) sum += c[i] * ring.slice(i);
  return -apply_memory_operator(grid, sum, j);
}

}  // namespace bhm
