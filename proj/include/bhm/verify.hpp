#pragma once

#include <string>
#include <vector>

namespace bhm {

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

/// kernels, operators, memory, identities, decay.
const std::vector<std::string>& suite_names();

/// Runs one named bundle of invariant checks. Unknown names raise a config
/// error.
std::vector<CheckResult> run_suite(const std::string& name);

/// Central-difference dE/dt against the dissipation rate for the exponential
/// kernel, j = 0, at several step sizes.
struct OrderStudy {
  std::vector<double> dts;
  std::vector<double> residuals;  // max |dE/dt - D| over the probe times
  double order = 0.0;             // least-squares slope of log residual vs log dt
  bool strictly_decreasing = true;
};
OrderStudy dissipation_order_study(const std::vector<double>& dts, double T = 0.2, double probe_spacing = 0.01);

/// Largest relative gap between the history-variable force and the direct
/// convolution over `steps` steps of a random smooth state (Prony kernel).
double backend_equivalence_study(int steps, double dt = 1e-2, unsigned seed = 7);

}  // namespace bhm
