#include "bhm/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "bhm/error.hpp"

namespace bhm {

namespace fs = std::filesystem;

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(trim(item));
  return out;
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value, const char* expected) {
  fail(ErrorKind::Config, "invalid value '" + value + "' for key '" + key + "' (expected " + expected + ")");
}

[[noreturn]] void out_of_range(const std::string& key, const std::string& why) {
  fail(ErrorKind::Config, "key '" + key + "' out of range: " + why);
}

double to_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  const char* b = v.data();
  const char* e = b + v.size();
  auto res = std::from_chars(b, e, out);
  if (res.ec != std::errc() || res.ptr != e || !std::isfinite(out)) bad_value(key, v, "a finite number");
  return out;
}

long to_long(const std::string& key, const std::string& v) {
  long out = 0;
  const char* b = v.data();
  const char* e = b + v.size();
  auto res = std::from_chars(b, e, out);
  if (res.ec != std::errc() || res.ptr != e) bad_value(key, v, "an integer");
  return out;
}

int to_int(const std::string& key, const std::string& v) {
  const long x = to_long(key, v);
  if (x < -1000000000L || x > 1000000000L) bad_value(key, v, "an integer of moderate size");
  return static_cast<int>(x);
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "yes" || v == "1" || v == "on") return true;
  if (v == "false" || v == "no" || v == "0" || v == "off") return false;
  bad_value(key, v, "true or false");
}

std::string join_doubles(const std::vector<double>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) out += (i ? ", " : "") + format_double(xs[i]);
  return out;
}

using Setter = std::function<void(ExperimentConfig&, const std::string& key, const std::string& value)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"dimension",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         const int d = to_int(k, v);
         if (d != 1 && d != 2) out_of_range(k, "dimension must be 1 or 2");
         c.lengths.resize(d, c.lengths.empty() ? 1.0 : c.lengths.front());
         c.counts.resize(d, c.counts.empty() ? 64 : c.counts.front());
       }},
      {"lengths",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.lengths.clear();
         for (const auto& x : split(v, ',')) c.lengths.push_back(to_double(k, x));
       }},
      {"counts",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.counts.clear();
         for (const auto& x : split(v, ',')) c.counts.push_back(to_int(k, x));
       }},
      {"j", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.j = to_int(k, v); }},
      {"kernel", [](ExperimentConfig& c, const std::string&, const std::string& v) { c.kernel = v; }},
      {"d1", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.d1 = to_double(k, v); }},
      {"q1", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.q1 = to_double(k, v); }},
      {"d2", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.d2 = to_double(k, v); }},
      {"q2", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.q2 = to_double(k, v); }},
      {"prony_terms",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.prony_terms.clear();
         for (const auto& item : split(v, ',')) {
           const auto parts = split(item, ':');
           if (parts.size() != 2) bad_value(k, v, "a list of d:q pairs");
           c.prony_terms.push_back({to_double(k, parts[0]), to_double(k, parts[1])});
         }
       }},
      {"profile_mode", [](ExperimentConfig& c, const std::string&, const std::string& v) { c.profile_mode = v; }},
      {"profile_p",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.profile_p = to_double(k, v); }},
      {"alpha0", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.alpha0 = to_double(k, v); }},
      {"initial_profile",
       [](ExperimentConfig& c, const std::string&, const std::string& v) { c.initial.shape = parse_initial_shape(v); }},
      {"initial_amplitude",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.initial.amplitude = to_double(k, v); }},
      {"initial_center",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.initial.center = to_double(k, v); }},
      {"initial_width",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.initial.width = to_double(k, v); }},
      {"history",
       [](ExperimentConfig& c, const std::string&, const std::string& v) { c.history.shape = parse_history_shape(v); }},
      {"history_rate",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.history.rate = to_double(k, v); }},
      {"dt", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.dt = to_double(k, v); }},
      {"T", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.T = to_double(k, v); }},
      {"record_stride",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.record_stride = to_int(k, v); }},
      {"snapshot_stride",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.snapshot_stride = to_int(k, v); }},
      {"higher_energies",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.higher_energies = to_bool(k, v); }},
      {"monitors", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.monitors = to_bool(k, v); }},
      {"compare_backends",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.compare_backends = to_bool(k, v); }},
      {"scheme", [](ExperimentConfig& c, const std::string&, const std::string& v) { c.solver.scheme = parse_scheme(v); }},
      {"solver_tol",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.solver.tol = to_double(k, v); }},
      {"solver_max_iter",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.solver.max_iter = to_int(k, v); }},
      {"direct_solver_max_unknowns",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.solver.direct_max_unknowns = to_int(k, v);
       }},
      {"sgrid_ratio",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.sgrid.ratio = to_double(k, v); }},
      {"sgrid_tail_tol",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.sgrid.tail_tol = to_double(k, v); }},
      {"sgrid_uniform_span",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.sgrid.uniform_span = to_double(k, v); }},
      {"fit_t0", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.fit_t0 = to_double(k, v); }},
      {"fit_t1", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.fit_t1 = to_double(k, v); }},
      {"gn_order", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.gn_order = to_int(k, v); }},
      {"eps0", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.eps0 = to_double(k, v); }},
      {"conservation_tol",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.conservation_tol = to_double(k, v); }},
      {"output_dir", [](ExperimentConfig& c, const std::string&, const std::string& v) { c.output_dir = v; }},
      {"seed",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         const long s = to_long(k, v);
         if (s < 0) out_of_range(k, "seed must be >= 0");
         c.seed = static_cast<unsigned long>(s);
       }},
  };
  return table;
}

}  // namespace

ExperimentConfig parse_config_text(const std::string& text, const std::string& name) {
  ExperimentConfig cfg;
  cfg.name = name;
  std::map<std::string, std::string> seen;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  // `dimension` resizes the lists, so it is applied before the other keys.
  std::vector<std::pair<std::string, std::string>> entries;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      std::ostringstream os;
      os << "line " << lineno << ": expected 'key = value', got '" << line << "'";
      fail(ErrorKind::Config, os.str());
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (!setters().count(key)) fail(ErrorKind::Config, "unknown key '" + key + "'");
    if (seen.count(key)) fail(ErrorKind::Config, "duplicate key '" + key + "'");
    if (value.empty()) fail(ErrorKind::Config, "missing value for key '" + key + "'");
    seen[key] = value;
    entries.emplace_back(key, value);
  }
  if (seen.count("dimension")) setters().at("dimension")(cfg, "dimension", seen["dimension"]);
  for (const auto& [k, v] : entries)
    if (k != "dimension") setters().at(k)(cfg, k, v);
  if (seen.count("dimension")) {
    const auto d = static_cast<std::size_t>(to_int("dimension", seen["dimension"]));
    if (cfg.lengths.size() == 1 && d == 2) cfg.lengths.push_back(cfg.lengths.front());
    if (cfg.counts.size() == 1 && d == 2) cfg.counts.push_back(cfg.counts.front());
    if (cfg.lengths.size() != d) out_of_range("lengths", "needs one entry per dimension");
    if (cfg.counts.size() != d) out_of_range("counts", "needs one entry per dimension");
  }
  if (cfg.output_dir.empty()) cfg.output_dir = name;
  validate_config(cfg);
  return cfg;
}

ExperimentConfig parse_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Config, "cannot open config file '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), path.stem().string());
}

Kernel build_kernel(const ExperimentConfig& cfg) {
  try {
    if (cfg.kernel == "none") return Kernel::none();
    if (cfg.kernel == "exponential") return make_exponential_kernel(cfg.d1, cfg.q1);
    if (cfg.kernel == "polynomial") return make_polynomial_kernel(cfg.d2, cfg.q2);
    if (cfg.kernel == "prony") return make_prony_kernel(cfg.prony_terms);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Parameter) fail(ErrorKind::Config, std::string("kernel parameters: ") + e.what());
    throw;
  }
  fail(ErrorKind::Config, "unknown kernel '" + cfg.kernel + "' (none, exponential, polynomial, prony)");
}

namespace {

struct ResolvedProfile {
  ConvexityProfile::Mode mode;
  double p;
  double alpha0;
};

ResolvedProfile resolve_profile(const ExperimentConfig& cfg, const Kernel& k) {
  ResolvedProfile r{};
  if (cfg.profile_mode == "linear")
    r.mode = ConvexityProfile::Mode::Linear;
  else if (cfg.profile_mode == "convex")
    r.mode = ConvexityProfile::Mode::Convex;
  else if (cfg.profile_mode == "auto")
    r.mode = (k.is_none() || k.linear_rate()) ? ConvexityProfile::Mode::Linear : ConvexityProfile::Mode::Convex;
  else
    fail(ErrorKind::Config, "invalid value '" + cfg.profile_mode + "' for key 'profile_mode' (auto, linear, convex)");
  r.p = cfg.profile_p;
  if (r.p == 0.0) r.p = k.minimal_power_exponent() ? std::floor(*k.minimal_power_exponent()) + 1.0 : 2.0;
  r.alpha0 = cfg.alpha0;
  if (r.alpha0 == 0.0) r.alpha0 = k.linear_rate().value_or(1.0);
  return r;
}

}  // namespace

ConvexityProfile build_profile(const ExperimentConfig& cfg, const Kernel& k) {
  const auto r = resolve_profile(cfg, k);
  return ConvexityProfile::power(r.p, r.mode, r.mode == ConvexityProfile::Mode::Linear ? std::optional(r.alpha0)
                                                                                      : std::nullopt);
}

void validate_config(const ExperimentConfig& c) {
  if (c.lengths.empty() || c.lengths.size() > 2) out_of_range("lengths", "one or two entries");
  if (c.counts.size() != c.lengths.size()) out_of_range("counts", "must match the number of lengths");
  for (double L : c.lengths)
    if (!(L > 0.0)) out_of_range("lengths", "lengths must be positive");
  for (int n : c.counts)
    if (n < 8) out_of_range("counts", "at least 8 interior points per dimension");
  if (c.j < 0 || c.j > 2) out_of_range("j", "memory order j must be 0, 1 or 2");
  if (!(c.dt > 0.0)) out_of_range("dt", "must be positive");
  if (!(c.T >= 0.0)) out_of_range("T", "must be >= 0");
  if (std::abs(c.T / c.dt - std::round(c.T / c.dt)) > 1e-6) out_of_range("T", "must be a whole number of steps dt");
  if (c.record_stride < 1) out_of_range("record_stride", "must be >= 1");
  if (c.snapshot_stride < 0) out_of_range("snapshot_stride", "must be >= 0");
  if (!(c.solver.tol > 0.0)) out_of_range("solver_tol", "must be positive");
  if (c.solver.max_iter < 1) out_of_range("solver_max_iter", "must be >= 1");
  if (c.solver.direct_max_unknowns < 0) out_of_range("direct_solver_max_unknowns", "must be >= 0");
  if (!(c.sgrid.ratio >= 1.0)) out_of_range("sgrid_ratio", "must be >= 1");
  if (!(c.sgrid.tail_tol > 0.0 && c.sgrid.tail_tol < 1.0)) out_of_range("sgrid_tail_tol", "must lie in (0, 1)");
  if (!(c.sgrid.uniform_span > 0.0)) out_of_range("sgrid_uniform_span", "must be positive");
  if (c.gn_order < 1) out_of_range("gn_order", "must be >= 1");
  if (!(c.eps0 >= 0.0)) out_of_range("eps0", "must be >= 0 (0 selects 1/(2E(0)))");
  if (!(c.conservation_tol > 0.0)) out_of_range("conservation_tol", "must be positive");
  if (!(c.initial.amplitude > 0.0)) out_of_range("initial_amplitude", "must be positive");
  if (!(c.initial.width > 0.0)) out_of_range("initial_width", "must be positive");
  if (!(c.initial.center > 0.0 && c.initial.center < 1.0)) out_of_range("initial_center", "must lie in (0, 1)");
  if (!(c.history.rate >= 0.0)) out_of_range("history_rate", "must be >= 0");
  if (c.fit_t0 && !(*c.fit_t0 > 0.0)) out_of_range("fit_t0", "must be positive");
  if (c.fit_t0 && c.fit_t1 && !(*c.fit_t1 > *c.fit_t0)) out_of_range("fit_t1", "must exceed fit_t0");
  if (c.profile_p != 0.0 && !(c.profile_p > 1.0)) out_of_range("profile_p", "power exponent must exceed 1");
  if (!(c.alpha0 >= 0.0)) out_of_range("alpha0", "must be >= 0 (0 selects the kernel rate)");
  const Kernel k = build_kernel(c);
  (void)build_profile(c, k);
  if (c.compare_backends && k.is_none()) out_of_range("compare_backends", "needs a memory kernel");
}

std::vector<std::pair<std::string, std::string>> echo_config(const ExperimentConfig& c) {
  const Kernel k = build_kernel(c);
  const auto prof = resolve_profile(c, k);
  std::vector<std::pair<std::string, std::string>> e;
  auto add = [&](std::string key, std::string v) { e.emplace_back(std::move(key), std::move(v)); };
  auto b = [](bool x) { return std::string(x ? "true" : "false"); };
  add("dimension", std::to_string(c.lengths.size()));
  add("lengths", join_doubles(c.lengths));
  std::string counts;
  for (std::size_t i = 0; i < c.counts.size(); ++i) counts += (i ? ", " : "") + std::to_string(c.counts[i]);
  add("counts", counts);
  add("j", std::to_string(c.j));
  add("kernel", c.kernel);
  add("d1", format_double(c.d1));
  add("q1", format_double(c.q1));
  add("d2", format_double(c.d2));
  add("q2", format_double(c.q2));
  std::string terms;
  for (std::size_t i = 0; i < c.prony_terms.size(); ++i)
    terms += (i ? ", " : "") + format_double(c.prony_terms[i].d) + ":" + format_double(c.prony_terms[i].q);
  add("prony_terms", terms);
  add("profile_mode", prof.mode == ConvexityProfile::Mode::Linear ? "linear" : "convex");
  add("profile_p", format_double(prof.p));
  add("alpha0", format_double(prof.alpha0));
  add("initial_profile", to_string(c.initial.shape));
  add("initial_amplitude", format_double(c.initial.amplitude));
  add("initial_center", format_double(c.initial.center));
  add("initial_width", format_double(c.initial.width));
  add("history", to_string(c.history.shape));
  add("history_rate", format_double(c.history.rate));
  add("dt", format_double(c.dt));
  add("T", format_double(c.T));
  add("record_stride", std::to_string(c.record_stride));
  add("snapshot_stride", std::to_string(c.snapshot_stride));
  add("higher_energies", b(c.higher_energies));
  add("monitors", b(c.monitors));
  add("compare_backends", b(c.compare_backends));
  add("scheme", to_string(c.solver.scheme));
  add("solver_tol", format_double(c.solver.tol));
  add("solver_max_iter", std::to_string(c.solver.max_iter));
  add("direct_solver_max_unknowns", std::to_string(c.solver.direct_max_unknowns));
  add("sgrid_ratio", format_double(c.sgrid.ratio));
  add("sgrid_tail_tol", format_double(c.sgrid.tail_tol));
  add("sgrid_uniform_span", format_double(c.sgrid.uniform_span));
  add("fit_t0", format_double(c.fit_t0.value_or(0.1 * c.T)));
  add("fit_t1", format_double(c.fit_t1.value_or(c.T)));
  add("gn_order", std::to_string(c.gn_order));
  add("eps0", format_double(c.eps0));
  add("conservation_tol", format_double(c.conservation_tol));
  add("output_dir", c.output_dir);
  add("seed", std::to_string(c.seed));
  return e;
}

fs::path output_directory(const ExperimentConfig& cfg) {
  const fs::path dir = cfg.output_dir.empty() ? fs::path(cfg.name) : fs::path(cfg.output_dir);
  if (dir.is_absolute()) return dir;
  const char* root = std::getenv("BHM_OUTPUT_ROOT");
  return (root && *root) ? fs::path(root) / dir : dir;
}

}  // namespace bhm
