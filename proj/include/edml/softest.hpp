#pragma once

#include <vector>

namespace edml {

// Soft observations on a single binary random variable, each quantified by
// a Bayes factor. kappa = 0 and kappa = +inf are hard observations
// (infinity is the stored value, not a large float); kappa = 1 is neutral.
struct SoftObservations {
  std::vector<double> kappas;
  double alpha = 1.0;
  double beta = 1.0;

  bool is_flat() const;
};

// Log of the unnormalized posterior over the parameter p:
//   (alpha-1) log p + (beta-1) log(1-p) + sum_i log(kappa_i p - p + 1),
// where a kappa = inf term contributes log p by convention.
double log_objective(double p, const SoftObservations& obs);

// Exact first and second derivatives of log_objective on (0,1).
double d_log_objective(double p, const SoftObservations& obs);
double d2_log_objective(double p, const SoftObservations& obs);

// Global maximizer of log_objective over [0,1]. The objective is strictly
// log-concave unless it is flat (all kappa = 1, alpha = beta = 1), which
// returns 0.5. Bisection on the derivative to interval width 1e-12.
double solve_mode(const SoftObservations& obs);

}  // namespace edml
