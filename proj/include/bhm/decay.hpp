#pragma once

#include <optional>
#include <vector>

#include "bhm/convexity.hpp"

namespace bhm {

/// Least-squares fit of log E against log t on [T0, T1].
struct DecayFit {
  double t0 = 0.0, t1 = 0.0;
  double rate = 0.0;       // minus the log-log slope
  double intercept = 0.0;  // log E at t = 1
  double r_squared = 0.0;
  int points = 0;          // points used after geometric subsampling
  bool confident = false;  // r_squared >= 0.9
};

/// Records in the window are thinned to roughly geometrically spaced times so
/// every decade weighs the same. Needs at least 10 records in the window and
/// E > 0 on all of them.
DecayFit fit_decay(const std::vector<double>& t, const std::vector<double>& E, double T0, double T1,
                   int targets = 64);

struct EnvelopeCheck {
  double alpha = 0.0;  // smallest alpha found (the cap when nothing works)
  bool holds = false;
  bool capped = false;  // no alpha up to the cap satisfies the envelope
  double cap = 0.0;
};

/// Smallest alpha with E(t) <= alpha G_n(alpha / t) at every record in
/// [T0, T1]. The cap defaults to 1e6 E(T0).
EnvelopeCheck check_envelope(const std::vector<double>& t, const std::vector<double>& E, const GnEvaluator& gn,
                             double T0, double T1, std::optional<double> cap = std::nullopt);

}  // namespace bhm
