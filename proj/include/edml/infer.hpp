#pragma once

#include <stdexcept>
#include <vector>

#include "edml/model.hpp"

namespace edml {

struct ZeroProbabilityError : std::runtime_error {
  int example_index;
  explicit ZeroProbabilityError(int index)
      : std::runtime_error("example has zero probability under current "
                           "parameters (index " +
                           std::to_string(index) + ")"),
        example_index(index) {}
};

// Per-example family posteriors. For variable v with parent bits u:
//   joint[v][u * 2 + x]  = Pr(X=x, U=u | d)   (x in {0,1})
//   parent[v][u]         = Pr(U=u | d)
struct FamilyMarginals {
  std::vector<std::vector<double>> joint;
  std::vector<std::vector<double>> parent;
  double prob_evidence = 0.0;

  double pr_xu(int v, int u_bits) const { return joint[v][u_bits * 2 + 1]; }
  double pr_nxu(int v, int u_bits) const { return joint[v][u_bits * 2]; }
  double pr_u(int v, int u_bits) const { return parent[v][u_bits]; }
};

// Exact Pr(d) by variable elimination. Missing cells are unobserved.
double prob_evidence(const Network& net, const Example& example);

// Exact family posteriors for every (variable, parent instantiation).
// Throws ZeroProbabilityError (with example_index) when Pr(d) = 0.
FamilyMarginals family_marginals(const Network& net, const Example& example,
                                 int example_index = -1);

// Log-likelihood / log-posterior over distinct examples weighted by
// multiplicity. Returns -inf when some example is impossible or a prior
// term with exponent > 1 hits a boundary parameter.
double log_likelihood(const Network& net, const Dataset& data);
double log_posterior(const Network& net, const Dataset& data,
                     const BetaPriors& priors);

}  // namespace edml
