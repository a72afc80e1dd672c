#include "bhm/profiles.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "bhm/error.hpp"

namespace bhm {

InitialShape parse_initial_shape(const std::string& name) {
  if (name == "poly_bump") return InitialShape::PolyBump;
  if (name == "sine_bump") return InitialShape::SineBump;
  if (name == "gaussian_clamped") return InitialShape::GaussianClamped;
  if (name == "random_smooth") return InitialShape::RandomSmooth;
  fail(ErrorKind::Config,
       "unknown initial_profile '" + name + "' (poly_bump, sine_bump, gaussian_clamped, random_smooth)");
}

const char* to_string(InitialShape s) {
  switch (s) {
    case InitialShape::PolyBump: return "poly_bump";
    case InitialShape::SineBump: return "sine_bump";
    case InitialShape::GaussianClamped: return "gaussian_clamped";
    case InitialShape::RandomSmooth: return "random_smooth";
  }
  return "?";
}

HistoryShape parse_history_shape(const std::string& name) {
  if (name == "zero") return HistoryShape::Zero;
  if (name == "constant") return HistoryShape::Constant;
  if (name == "exponential") return HistoryShape::Exponential;
  fail(ErrorKind::Config, "unknown history '" + name + "' (zero, constant, exponential)");
}

const char* to_string(HistoryShape s) {
  switch (s) {
    case HistoryShape::Zero: return "zero";
    case HistoryShape::Constant: return "constant";
    case HistoryShape::Exponential: return "exponential";
  }
  return "?";
}

Field make_initial(const Grid& grid, const InitialSpec& spec) {
  if (!(spec.width > 0.0)) fail(ErrorKind::Parameter, "initial width must be positive");
  const auto& L = grid.lengths();
  constexpr int kModes = 4;
  std::vector<cplx> coef;
  if (spec.shape == InitialShape::RandomSmooth) {
    std::mt19937_64 rng(spec.seed);
    std::normal_distribution<double> nd;
    for (int i = 0; i < kModes * grid.dimension(); ++i) {
      const double re = nd(rng), im = nd(rng);
      coef.emplace_back(re, im);
    }
  }
  Field u(grid.size());
  for (int k = 0; k < grid.size(); ++k) {
    const auto x = grid.node(k);
    cplx v = 1.0;
    for (int d = 0; d < grid.dimension(); ++d) {
      const double xi = x[d], Li = L[d];
      const double clamp = xi * xi * (Li - xi) * (Li - xi);
      switch (spec.shape) {
        case InitialShape::PolyBump: v *= clamp; break;
        case InitialShape::SineBump: {
          const double sn = std::sin(std::numbers::pi * xi / Li);
          v *= sn * sn;
          break;
        }
        case InitialShape::GaussianClamped: {
          const double z = (xi - spec.center * Li) / (spec.width * Li);
          v *= clamp * std::exp(-0.5 * z * z);
          break;
        }
        case InitialShape::RandomSmooth: {
          cplx s = 0.0;
          for (int m = 0; m < kModes; ++m) s += coef[d * kModes + m] * std::sin((m + 1) * std::numbers::pi * xi / Li);
          v *= clamp * s;
          break;
        }
      }
    }
    u[k] = v;
  }
  const double n = norm_hj(grid, u, 0);
  if (!(n > 0.0)) fail(ErrorKind::Parameter, "initial profile vanishes on this grid");
  return u * (spec.amplitude / n);
}

HistoryFn make_history(const Field& phi, const HistorySpec& spec) {
  switch (spec.shape) {
    case HistoryShape::Zero: return [n = phi.size()](double) { return Field(Field::Zero(n)); };
    case HistoryShape::Constant: return [phi](double) { return phi; };
    case HistoryShape::Exponential:
      return [phi, r = spec.rate](double tau) { return Field(std::exp(-r * tau) * phi); };
  }
  return {};
}

HistoryFn make_history_second_derivative(const Field& phi, const HistorySpec& spec) {
  if (spec.shape == HistoryShape::Exponential)
    return [phi, r = spec.rate](double tau) { return Field(r * r * std::exp(-r * tau) * phi); };
  return [n = phi.size()](double) { return Field(Field::Zero(n)); };
}

}  // namespace bhm
