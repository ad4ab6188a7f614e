#include "edml/softest.hpp"

#include <cmath>
#include <limits>

namespace edml {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

bool SoftObservations::is_flat() const {
  if (alpha != 1.0 || beta != 1.0) return false;
  for (double k : kappas)
    if (k != 1.0) return false;
  return true;
}

double log_objective(double p, const SoftObservations& obs) {
  double lp = 0.0;
  if (obs.alpha > 1.0) lp += (obs.alpha - 1.0) * std::log(p);
  if (obs.beta > 1.0) lp += (obs.beta - 1.0) * std::log(1.0 - p);
  for (double k : obs.kappas)
    lp += std::isinf(k) ? std::log(p) : std::log((k - 1.0) * p + 1.0);
  return lp;
}

double d_log_objective(double p, const SoftObservations& obs) {
  double d = (obs.alpha - 1.0) / p - (obs.beta - 1.0) / (1.0 - p);
  for (double k : obs.kappas)
    d += std::isinf(k) ? 1.0 / p : (k - 1.0) / ((k - 1.0) * p + 1.0);
  return d;
}

double d2_log_objective(double p, const SoftObservations& obs) {
  double d = -(obs.alpha - 1.0) / (p * p) -
             (obs.beta - 1.0) / ((1.0 - p) * (1.0 - p));
  for (double k : obs.kappas) {
    const double s =
        std::isinf(k) ? 1.0 / p : (k - 1.0) / ((k - 1.0) * p + 1.0);
    d -= s * s;
  }
  return d;
}

double solve_mode(const SoftObservations& obs) {
  if (obs.is_flat()) return 0.5;  // every p maximizes; symmetric pick

  constexpr double eps = 1e-12;
  double lo = eps, hi = 1.0 - eps;
  if (d_log_objective(lo, obs) <= 0.0) return 0.0;
  if (d_log_objective(hi, obs) >= 0.0) return 1.0;

  // d1 is strictly decreasing, so the sign change brackets the mode.
  for (int it = 0; it < 200 && hi - lo > eps; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (d_log_objective(mid, obs) > 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace edml
