#include "bhm/decay.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "bhm/error.hpp"

namespace bhm {

namespace {

std::vector<std::size_t> window_indices(const std::vector<double>& t, const std::vector<double>& E, double T0,
                                        double T1) {
  if (t.size() != E.size()) fail(ErrorKind::Data, "time and energy series differ in length");
  if (!(T0 > 0.0) || !(T1 > T0)) {
    std::ostringstream os;
    os << "fit window [" << T0 << ", " << T1 << "] must satisfy 0 < T0 < T1";
    fail(ErrorKind::Window, os.str());
  }
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < t.size(); ++i)
    if (t[i] >= T0 && t[i] <= T1) idx.push_back(i);
  for (auto i : idx) {
    if (!(E[i] > 0.0)) {
      std::ostringstream os;
      os << "energy " << E[i] << " at t = " << t[i] << " is not positive";
      fail(ErrorKind::Data, os.str());
    }
  }
  return idx;
}

}  // namespace

DecayFit fit_decay(const std::vector<double>& t, const std::vector<double>& E, double T0, double T1, int targets) {
  const auto idx = window_indices(t, E, T0, T1);
  if (idx.size() < 10) {
    std::ostringstream os;
    os << "fit window [" << T0 << ", " << T1 << "] holds " << idx.size() << " records, need at least 10";
    fail(ErrorKind::Window, os.str());
  }
  // Nearest record (in log t) to each geometric target, duplicates dropped.
  std::vector<std::size_t> pick;
  const double l0 = std::log(t[idx.front()]), l1 = std::log(t[idx.back()]);
  std::size_t cursor = 0;
  for (int k = 0; k < targets; ++k) {
    const double target = targets > 1 ? l0 + (l1 - l0) * k / (targets - 1) : l0;
    while (cursor + 1 < idx.size() &&
           std::abs(std::log(t[idx[cursor + 1]]) - target) <= std::abs(std::log(t[idx[cursor]]) - target))
      ++cursor;
    if (pick.empty() || pick.back() != idx[cursor]) pick.push_back(idx[cursor]);
  }

  const double n = static_cast<double>(pick.size());
  double sx = 0, sy = 0;
  for (auto i : pick) {
    sx += std::log(t[i]);
    sy += std::log(E[i]);
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0, syy = 0;
  for (auto i : pick) {
    const double dx = std::log(t[i]) - mx, dy = std::log(E[i]) - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (!(sxx > 0.0)) fail(ErrorKind::Window, "fit window spans a single time");
  const double slope = sxy / sxx;
  DecayFit fit;
  fit.t0 = T0;
  fit.t1 = T1;
  fit.rate = -slope;
  fit.intercept = my - slope * mx;
  double ss_res = 0.0;
  for (auto i : pick) {
    const double r = std::log(E[i]) - (fit.intercept + slope * std::log(t[i]));
    ss_res += r * r;
  }
  // A flat series leaves only rounding in syy; call that a perfect fit.
  const bool flat = syy <= 1e-24 * n * std::max(1.0, my * my);
  fit.r_squared = flat ? 1.0 : std::max(0.0, 1.0 - ss_res / syy);
  fit.points = static_cast<int>(pick.size());
  fit.confident = fit.r_squared >= 0.9;
  return fit;
}

EnvelopeCheck check_envelope(const std::vector<double>& t, const std::vector<double>& E, const GnEvaluator& gn,
                             double T0, double T1, std::optional<double> cap) {
  const auto idx = window_indices(t, E, T0, T1);
  if (idx.empty()) fail(ErrorKind::Window, "envelope window holds no records");
  EnvelopeCheck out;
  out.cap = cap.value_or(1e6 * E[idx.front()]);

  auto works = [&](double alpha) {
    for (auto i : idx)
      if (E[i] > alpha * gn(alpha / t[i])) return false;
    return true;
  };

  double lo, hi = 1.0;
  if (works(hi)) {
    lo = 0.5 * hi;
    while (works(lo)) {
      hi = lo;
      lo *= 0.5;
      if (lo < 1e-300) {
        out.alpha = hi;
        out.holds = true;
        return out;
      }
    }
  } else {
    lo = hi;
    hi *= 2.0;
    while (!works(hi)) {
      lo = hi;
      if (hi >= out.cap) {
        out.alpha = out.cap;
        out.capped = true;
        return out;
      }
      hi = std::min(2.0 * hi, out.cap);
    }
  }
  for (int it = 0; it < 200 && hi - lo > 1e-14 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (works(mid) ? hi : lo) = mid;
  }
  out.alpha = hi;
  out.holds = hi <= out.cap;
  out.capped = !out.holds;
  return out;
}

}  // namespace bhm
