#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "bhm/config.hpp"
#include "bhm/decay.hpp"
#include "bhm/run.hpp"

namespace bhm {

/// Process exit codes of the command-line tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitVerification = 1,
  kExitConfig = 2,
  kExitNumeric = 3,
};

/// Exit code for a library error kind.
int exit_code_for(ErrorKind kind);

struct DecaySection {
  std::optional<DecayFit> fit;
  std::optional<EnvelopeCheck> envelope;
  std::string skipped;  // reason when the analysis could not run
};

struct ExperimentResult {
  int exit_code = kExitOk;
  std::filesystem::path csv_path, report_path;
  Trajectory trajectory;
  DecaySection decay;
  std::optional<AssumptionReport> assumptions;
  std::vector<std::string> checks;  // "PASS ..." / "FAIL ..." lines of the report
};

/// Builds the grids, kernel and initial state described by `cfg`.
SimState build_initial_state(const ExperimentConfig& cfg);
RunSpec build_run_spec(const ExperimentConfig& cfg);

/// Decay fit and envelope check over a trajectory, per the config window.
DecaySection analyse_decay(const ExperimentConfig& cfg, const Trajectory& tr);

/// CSV with header t,E,D,E1,E2,mon_eq30,mon_eq37,mon_eq43,mon_eq49.
void write_energy_csv(std::ostream& out, const Trajectory& tr);

/// Runs the experiment and writes energies.csv and report.txt into the
/// output directory.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

struct SweepEntry {
  std::filesystem::path config;
  int exit_code = 0;
  std::string message;
};

/// Runs every *.cfg in `dir` (sorted by name) on `workers` threads.
std::vector<SweepEntry> sweep(const std::filesystem::path& dir, unsigned workers = 0);

}  // namespace bhm
