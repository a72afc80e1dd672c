#pragma once

#include <functional>
#include <vector>

#include "bhm/grid.hpp"
#include "bhm/kernel.hpp"

namespace bhm {

struct SGridOptions {
  double ratio = 1.05;          // geometric growth beyond the uniform section
  double tail_tol = 1e-10;      // s_max: g(s_max) < tail_tol * g(0)
  double uniform_span = 1.0;    // length of the dt-spaced section (capped at s_max)
};

/// Nodes 0 = s_0 < ... < s_M of the history variable and the quadrature
/// weights built from the kernel.
///
/// The first nodes are spaced exactly dt apart so the transport step is an
/// exact shift there. Beyond that the spacing grows geometrically.
class SGrid {
 public:
  SGrid(const Kernel& kernel, double dt, const SGridOptions& opt = {});

  const Kernel& kernel() const { return kernel_; }
  double dt() const { return dt_; }
  int last() const { return static_cast<int>(s_.size()) - 1; }
  int size() const { return static_cast<int>(s_.size()); }
  const std::vector<double>& nodes() const { return s_; }
  double s_max() const { return s_.back(); }
  /// Number of dt-spaced cells at the start of the grid.
  int uniform_cells() const { return uniform_cells_; }
  bool fully_uniform() const { return uniform_cells_ == last(); }

  /// Hat-function weights against g: sum_m W_m |v(s_m)|^2 ~ int g |v|^2.
  const std::vector<double>& energy_weights() const { return w_; }
  /// Hat-function weights against g' (all <= 0).
  const std::vector<double>& dissipation_weights() const { return wp_; }
  /// a_m = f(s_{m-1}) - f(s_m), the mass of g on the cell left of node m.
  const std::vector<double>& cell_masses() const { return a_; }
  /// dt / (s_m - s_{m-1}); 1 on the uniform section.
  const std::vector<double>& shift_fractions() const { return theta_; }

  /// Weights of the direct convolution over past slices y(t - i dt),
  /// i = 0..ring_length()-1.
  const std::vector<double>& convolution_weights() const { return conv_; }
  int ring_length() const { return static_cast<int>(conv_.size()); }

  /// Mass of g beyond s_max, f(s_max).
  double truncated_mass() const { return truncated_; }

 private:
  Kernel kernel_;
  double dt_;
  int uniform_cells_ = 0;
  std::vector<double> s_, w_, wp_, a_, theta_, conv_;
  double truncated_ = 0.0;
};

/// eta(x_i, s_m) stored as columns: column m holds the field at s_m.
struct HistoryField {
  Eigen::MatrixXcd values;

  int nodes() const { return static_cast<int>(values.cols()); }
  Field at(int m) const { return values.col(m); }
};

/// Past slices y(t - i dt), newest first.
class YRingBuffer {
 public:
  YRingBuffer(int field_size, int capacity);

  int capacity() const { return static_cast<int>(data_.cols()); }
  int filled() const { return filled_; }
  /// Makes `y` the newest slice.
  void push(const Field& y);
  /// y(t - i dt).
  Eigen::Ref<const Eigen::VectorXcd> slice(int i) const;

 private:
  Eigen::MatrixXcd data_;
  int head_ = -1;
  int filled_ = 0;
};

/// Past values y(x, -tau) for tau >= 0 as a function of tau.
using HistoryFn = std::function<Field(double tau)>;

/// eta^0(s_m) = int_0^{s_m} y(-tau) dtau by the composite trapezoid rule with
/// step dt (a shorter last piece on the geometric section).
HistoryField init_history(const HistoryFn& past, const Grid& grid, const SGrid& sgrid);

/// Ring holding y(-i dt) for i >= 1 and `y_now` as slice 0.
YRingBuffer init_ring(const HistoryFn& past, const Field& y_now, const Grid& grid, const SGrid& sgrid);

/// Characteristic shift eta(s_m) <- eta(s_m - dt) in place, using linear
/// interpolation on the geometric section. Column 0 stays zero.
void shift_history(HistoryField& h, const SGrid& sgrid);

/// Shift, then add `y_integral` (the step's integral of y) to every s > 0.
void advance_history(HistoryField& h, const Field& y_integral, double dt, const SGrid& sgrid);

/// (-1)^{j+1} Lap^j sum_m W_m eta(s_m).
Field memory_force(const HistoryField& h, const SGrid& sgrid, int j, const Grid& grid);

/// The same force from the f-convolution of the stored past slices.
Field memory_force_direct(const YRingBuffer& ring, const SGrid& sgrid, int j, const Grid& grid);

/// Applies the positive operator paired with the memory order:
/// identity (j=0), -Laplacian (j=1), biharmonic (j=2).
Field apply_memory_operator(const Grid& grid, const Field& u, int j);

}  // namespace bhm
