#pragma once

#include <string>

#include "bhm/memory.hpp"

namespace bhm {

/// Built-in initial data. Every shape vanishes with its gradient on the
/// boundary, so it is compatible with the clamped conditions.
enum class InitialShape {
  PolyBump,         // prod x^2 (L - x)^2
  SineBump,         // prod sin^2(pi x / L)
  GaussianClamped,  // Gaussian times the polynomial clamp factor
  RandomSmooth,     // clamp factor times four random complex sine modes (seeded)
};

struct InitialSpec {
  InitialShape shape = InitialShape::PolyBump;
  double amplitude = 1.0;  // L2 norm of the result
  double center = 0.5;     // Gaussian centre, as a fraction of each length
  double width = 0.1;      // Gaussian width, as a fraction of each length
  unsigned long seed = 0;  // random_smooth only
};

InitialShape parse_initial_shape(const std::string& name);
const char* to_string(InitialShape s);

/// Samples the profile at the interior nodes and scales it to the requested
/// discrete L2 norm.
Field make_initial(const Grid& grid, const InitialSpec& spec);

/// Past values y(-tau) = psi(tau) phi for tau > 0.
enum class HistoryShape {
  Zero,         // psi = 0: the system starts from rest in the past
  Constant,     // psi = 1
  Exponential,  // psi = exp(-rate tau)
};

struct HistorySpec {
  HistoryShape shape = HistoryShape::Zero;
  double rate = 1.0;
};

HistoryShape parse_history_shape(const std::string& name);
const char* to_string(HistoryShape s);

HistoryFn make_history(const Field& phi, const HistorySpec& spec);
/// Second derivative in tau of the same history.
HistoryFn make_history_second_derivative(const Field& phi, const HistorySpec& spec);

}  // namespace bhm
