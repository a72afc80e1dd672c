#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "bhm/config.hpp"
#include "bhm/error.hpp"
#include "bhm/experiment.hpp"
#include "bhm/verify.hpp"

using namespace bhm;
namespace fs = std::filesystem;

namespace {

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

// Points the output root at a fresh temporary directory for one test.
struct ScratchRoot {
  fs::path dir;
  ScratchRoot() {
    dir = fs::temp_directory_path() / ("bhm_unit_" + std::to_string(::getpid()));
    fs::remove_all(dir);
    fs::create_directories(dir);
    ::setenv("BHM_OUTPUT_ROOT", dir.c_str(), 1);
  }
  ~ScratchRoot() {
    ::unsetenv("BHM_OUTPUT_ROOT");
    fs::remove_all(dir);
  }
};

ErrorKind kind_of(const std::string& text) {
  try {
    parse_config_text(text);
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::State;  // no error
}

}  // namespace

TEST_CASE("minimal config: defaults filled and every effective value echoed once") {
  const auto cfg = parse_config_text("dimension = 1\nlengths = 1\ncounts = 64\nkernel = exponential\nT = 0.5\n", "m");
  CHECK(cfg.dt == 1e-3);
  CHECK(cfg.j == 0);
  CHECK(cfg.record_stride == 1);
  const auto echo = echo_config(cfg);
  std::set<std::string> keys;
  for (const auto& [k, v] : echo) {
    CHECK(keys.insert(k).second);
    CHECK_FALSE(v.empty());
  }
  for (const char* k : {"dimension", "lengths", "counts", "j", "kernel", "dt", "T", "scheme", "sgrid_ratio",
                        "sgrid_tail_tol", "fit_t0", "fit_t1", "gn_order", "eps0", "output_dir", "seed"})
    CHECK(keys.count(k) == 1);
}

TEST_CASE("echo round-trips through the parser") {
  const auto cfg = parse_config_text("lengths = 1, 2\ncounts = 16, 20\nkernel = prony\nprony_terms = 1:1, 0.5:3\nj = 2\n"
                                     "dt = 0.01\nT = 1\nhistory = exponential\nhistory_rate = 2\n",
                                     "rt");
  std::ostringstream text;
  for (const auto& [k, v] : echo_config(cfg)) text << k << " = " << v << '\n';
  const auto again = parse_config_text(text.str(), "rt");
  CHECK(echo_config(again) == echo_config(cfg));
}

TEST_CASE("j = 3 is a config error naming j") {
  try {
    parse_config_text("kernel = exponential\nj = 3\n");
    FAIL("no error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Config);
    CHECK(std::string(e.what()).find("'j'") != std::string::npos);
  }
}

TEST_CASE("polynomial kernel with q2 = 2 is an admissibility error") {
  try {
    parse_config_text("kernel = polynomial\nq2 = 2\n");
    FAIL("no error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Admissibility);
    CHECK(std::string(e.what()).find("q2 > 3") != std::string::npos);
  }
}

TEST_CASE("malformed configs") {
  CHECK(kind_of("bogus = 1\n") == ErrorKind::Config);
  CHECK(kind_of("dt = 0.1\ndt = 0.2\n") == ErrorKind::Config);
  CHECK(kind_of("dt = fast\n") == ErrorKind::Config);
  CHECK(kind_of("no equals sign\n") == ErrorKind::Config);
  CHECK(kind_of("dimension = 2\nlengths = 1, 2, 3\ncounts = 16\n") == ErrorKind::Config);
  // A single length or count is shared by both axes.
  CHECK(parse_config_text("dimension = 2\nlengths = 1\ncounts = 16\n").counts.size() == 2);
  CHECK(kind_of("# only a comment\n\n") == ErrorKind::State);
}

TEST_CASE("output directory honours the environment override") {
  ExperimentConfig cfg;
  cfg.output_dir = "runs/a";
  ::setenv("BHM_OUTPUT_ROOT", "/tmp/elsewhere", 1);
  CHECK(output_directory(cfg) == fs::path("/tmp/elsewhere/runs/a"));
  ::unsetenv("BHM_OUTPUT_ROOT");
  cfg.output_dir = "/abs/path";
  CHECK(output_directory(cfg) == fs::path("/abs/path"));
}

TEST_CASE("shortest round-trip formatting") {
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(1e-10) == "1e-10");
  CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
}

TEST_CASE("no-memory experiment reports a passing conservation check") {
  ScratchRoot root;
  const auto cfg = parse_config_text("lengths = 1\ncounts = 64\nkernel = none\ndt = 1e-3\nT = 0.2\nrecord_stride = 20\n",
                                     "cons");
  const auto res = run_experiment(cfg);
  CHECK(res.exit_code == kExitOk);
  const std::string report = read_file(res.report_path);
  CHECK(report.find("PASS conservation") != std::string::npos);
  CHECK(report.find("dt = 0.001") != std::string::npos);
}

TEST_CASE("decay experiment reports slope, alpha and the envelope verdict") {
  ScratchRoot root;
  const auto cfg = parse_config_text("lengths = 10\ncounts = 48\nkernel = exponential\ndt = 0.02\nT = 100\n"
                                     "record_stride = 5\nfit_t0 = 10\nfit_t1 = 100\n",
                                     "decay");
  const auto res = run_experiment(cfg);
  CHECK(res.exit_code == kExitOk);
  const std::string report = read_file(res.report_path);
  for (const char* key : {"rate = ", "alpha = ", "envelope_holds = ", "r_squared = "})
    CHECK_MESSAGE(report.find(key) != std::string::npos, key);
  REQUIRE(res.decay.fit);
  CHECK(res.decay.fit->rate > 0.8);
}

TEST_CASE("T = 0 writes a single CSV row") {
  ScratchRoot root;
  const auto res = run_experiment(parse_config_text("kernel = exponential\nT = 0\n", "zero"));
  std::istringstream in(read_file(res.csv_path));
  std::string line;
  int rows = 0;
  std::getline(in, line);
  CHECK(line == "t,E,D,E1,E2,mon_eq30,mon_eq37,mon_eq43,mon_eq49");
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 1);
}

TEST_CASE("identical configs give byte-identical CSV") {
  ScratchRoot root;
  const std::string text = "kernel = exponential\nj = 1\ncounts = 24\ndt = 1e-3\nT = 0.05\nhigher_energies = true\n";
  auto a = parse_config_text(text, "a");
  auto b = parse_config_text(text, "b");
  const auto ra = run_experiment(a), rb = run_experiment(b);
  CHECK(read_file(ra.csv_path) == read_file(rb.csv_path));
}

TEST_CASE("sweep runs every config in a directory") {
  ScratchRoot root;
  const fs::path dir = root.dir / "cfgs";
  fs::create_directories(dir);
  std::ofstream(dir / "a.cfg") << "kernel = none\nT = 0.01\n";
  std::ofstream(dir / "b.cfg") << "kernel = exponential\nT = 0.01\n";
  std::ofstream(dir / "c.cfg") << "kernel = exponential\nj = 7\n";
  std::ofstream(dir / "notes.txt") << "ignored\n";
  const auto entries = sweep(dir, 2);
  REQUIRE(entries.size() == 3);
  CHECK(entries[0].exit_code == kExitOk);
  CHECK(entries[1].exit_code == kExitOk);
  CHECK(entries[2].exit_code == kExitConfig);
  CHECK(fs::exists(root.dir / "a" / "energies.csv"));
}

TEST_CASE("verification suite names") {
  CHECK(suite_names().size() == 5);
  CHECK_THROWS_AS(run_suite("nonsense"), Error);
  for (const auto& c : run_suite("kernels")) CHECK_MESSAGE(c.pass, c.name);
}
