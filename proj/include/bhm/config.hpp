#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "bhm/convexity.hpp"
#include "bhm/evolution.hpp"
#include "bhm/kernel.hpp"
#include "bhm/profiles.hpp"

namespace bhm {

/// Effective experiment parameters after defaults are applied.
struct ExperimentConfig {
  std::string name = "experiment";

  std::vector<double> lengths{1.0};
  std::vector<int> counts{64};
  int j = 0;

  std::string kernel = "exponential";  // none | exponential | polynomial | prony
  double d1 = 1.0, q1 = 1.0;
  double d2 = 1.0, q2 = 4.0;
  std::vector<Kernel::Term> prony_terms{{1.0, 1.0}};

  std::string profile_mode = "auto";  // auto | linear | convex
  double profile_p = 0.0;             // 0: chosen from the kernel
  double alpha0 = 0.0;                // 0: the kernel's own rate

  InitialSpec initial;
  HistorySpec history;

  double dt = 1e-3;
  double T = 1.0;
  int record_stride = 1;
  int snapshot_stride = 0;
  bool higher_energies = false;
  bool monitors = true;
  bool compare_backends = false;

  StepParams solver;
  SGridOptions sgrid;

  std::optional<double> fit_t0, fit_t1;  // default window [T/10, T]
  int gn_order = 1;
  double eps0 = 0.0;  // 0: 1 / (2 E(0))
  double conservation_tol = 1e-10;

  std::string output_dir;  // default: the config name
  unsigned long seed = 0;
};

/// Reads flat `key = value` lines; `#` starts a comment. Unknown keys,
/// duplicates and malformed values raise a config error naming the key.
ExperimentConfig parse_config(const std::filesystem::path& path);
ExperimentConfig parse_config_text(const std::string& text, const std::string& name = "experiment");

/// Range checks and kernel admissibility; throws config / admissibility errors.
void validate_config(const ExperimentConfig& cfg);

/// Every effective parameter as (key, value), in a fixed order.
std::vector<std::pair<std::string, std::string>> echo_config(const ExperimentConfig& cfg);

Kernel build_kernel(const ExperimentConfig& cfg);
/// The profile implied by the config (mode and exponent resolved).
ConvexityProfile build_profile(const ExperimentConfig& cfg, const Kernel& kernel);

/// Resolves the output directory against $BHM_OUTPUT_ROOT (or the working
/// directory when unset).
std::filesystem::path output_directory(const ExperimentConfig& cfg);

/// Shortest round-trip decimal form of a double.
std::string format_double(double v);

}  // namespace bhm
