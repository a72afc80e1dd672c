// Command-line front end: simulate, verify, sweep.
#include <iostream>
#include <thread>

#include <CLI11.hpp>

#include "bhm/config.hpp"
#include "bhm/error.hpp"
#include "bhm/experiment.hpp"
#include "bhm/verify.hpp"

namespace {

int simulate(const std::string& path) {
  try {
    const bhm::ExperimentConfig cfg = bhm::parse_config(path);
    bhm::validate_config(cfg);
    const auto res = bhm::run_experiment(cfg);
    for (const auto& line : res.checks) std::cout << line << '\n';
    if (res.trajectory.error) std::cerr << "error: " << *res.trajectory.error << '\n';
    std::cout << "csv: " << res.csv_path.string() << "\nreport: " << res.report_path.string() << '\n';
    return res.exit_code;
  } catch (const bhm::Error& e) {
    std::cerr << bhm::to_string(e.kind()) << " error: " << e.what() << '\n';
    return bhm::exit_code_for(e.kind());
  }
}

int verify(const std::string& suite) {
  try {
    const auto checks = bhm::run_suite(suite);
    bool ok = true;
    for (const auto& c : checks) {
      std::cout << (c.pass ? "PASS " : "FAIL ") << c.name;
      if (!c.detail.empty()) std::cout << " [" << c.detail << ']';
      std::cout << '\n';
      ok = ok && c.pass;
    }
    return ok ? bhm::kExitOk : bhm::kExitVerification;
  } catch (const bhm::Error& e) {
    std::cerr << e.what() << '\n';
    return bhm::exit_code_for(e.kind());
  }
}

int sweep(const std::string& dir, unsigned workers) {
  try {
    const auto entries = bhm::sweep(dir, workers);
    int worst = bhm::kExitOk;
    for (const auto& e : entries) {
      std::cout << e.exit_code << ' ' << e.config.string();
      if (!e.message.empty()) std::cout << ": " << e.message;
      std::cout << '\n';
      worst = std::max(worst, e.exit_code);
    }
    return worst;
  } catch (const bhm::Error& e) {
    std::cerr << e.what() << '\n';
    return bhm::exit_code_for(e.kind());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Biharmonic Schrodinger equation with memory damping: simulation and checks"};
  app.require_subcommand(1);

  std::string config, suite, dir;
  unsigned workers = 0;
  auto* sim = app.add_subcommand("simulate", "run one experiment config");
  sim->add_option("config", config, "config file")->required();
  auto* ver = app.add_subcommand("verify", "run a verification suite");
  ver->add_option("suite", suite, "kernels | operators | memory | identities | decay")->required();
  auto* swp = app.add_subcommand("sweep", "run every *.cfg in a directory");
  swp->add_option("dir", dir, "config directory")->required();
  swp->add_option("-j,--workers", workers, "worker threads (0: hardware concurrency)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : bhm::kExitConfig;
  }
  if (*sim) return simulate(config);
  if (*ver) return verify(suite);
  return sweep(dir, workers);
}
