#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <vector>

namespace bhm {

/// 8-point Gauss-Legendre on [a, b].
inline double gauss_legendre(const std::function<double(double)>& fn, double a, double b) {
  static constexpr std::array<double, 4> x = {0.1834346424956498, 0.5255324099163290,
                                              0.7966664774136267, 0.9602898564975363};
  static constexpr std::array<double, 4> w = {0.3626837833783620, 0.3137066458778873,
                                              0.2223810344533745, 0.1012285362903763};
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) acc += w[i] * (fn(c - h * x[i]) + fn(c + h * x[i]));
  return acc * h;
}

/// Composite 8-point Gauss-Legendre over consecutive nodes.
inline double composite_gauss(const std::function<double(double)>& fn, const std::vector<double>& nodes) {
  double acc = 0.0;
  for (std::size_t i = 1; i < nodes.size(); ++i) acc += gauss_legendre(fn, nodes[i - 1], nodes[i]);
  return acc;
}

/// Uniform on [0, 1] with `per_unit` cells, then geometric with `ratio`
/// until `s_max`. Used for sampling kernels and tail integrals.
inline std::vector<double> composite_sample_grid(double s_max, double ratio = 1.1, int per_unit = 100) {
  std::vector<double> s;
  const double h0 = 1.0 / per_unit;
  for (int i = 0; i <= per_unit; ++i) s.push_back(i * h0);
  double h = h0;
  while (s.back() < s_max) {
    h *= ratio;
    s.push_back(s.back() + h);
  }
  return s;
}

}  // namespace bhm
