#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "edml/infer.hpp"
#include "edml/model.hpp"
#include "edml/softest.hpp"

namespace edml::verify {

// Full joint over all variables, indexed with variable 0 as bit 0.
// Independent of the elimination machinery: a plain product-of-CPTs sweep.
struct JointTable {
  std::vector<double> table;
};

JointTable brute_force_joint(const Network& net);  // <= 20 variables
double brute_force_evidence(const Network& net, const Example& example);
FamilyMarginals brute_force_marginals(const Network& net,
                                      const Example& example);

// Bayes factor for (X, u) under one example, computed by enumerating an
// explicitly built example island: the base network plus one generator
// root G with Pr(g) = theta_{x|u}, where X copies G exactly when its
// parents take value u. kappa = Pr(d | g) / Pr(d | not g).
double island_bayes_factor(const Network& net, const Example& example,
                           int variable, int u_bits);

// Per-parameter counts for the closed-form estimators.
struct ClosedFormCounts {
  // Indexed [v][u_bits].
  std::vector<std::vector<long>> d_xu;      // examples containing xu
  std::vector<std::vector<long>> d_u;       // examples containing u
  std::vector<std::vector<long>> d_u_obs;   // u present and X observed
  std::vector<std::vector<long>> d_u_miss;  // u present and X missing
};

ClosedFormCounts count_families(const Network& structure, const Dataset& data);

// theta_{x|u} = D#(xu)/D#(u); requires a complete dataset and D#(u) > 0
// for every parameter.
Network closed_form_complete(const Dataset& data, const Network& structure);

// theta_{x|u} = D#(xu)/D+#(u); requires that only leaf variables are ever
// missing and D+#(u) > 0 for every parameter.
Network closed_form_leaf_missing(const Dataset& data,
                                 const Network& structure);

bool is_leaf_missing(const Network& structure, const Dataset& data);

// Closed-form single EM step on a leaf-missing dataset:
// (D#(xu) + D-#(u) Pr(x|u)) / D#(u).
Network em_one_step_leaf_missing(const Network& net, const Dataset& data);

// Grid-search mode: 1e4-point coarse scan over [0,1], then two refinement
// rounds of 1e3 points around the argmax. Resolution <= 1e-9.
double grid_mode_oracle(const SoftObservations& obs);

// Random instances for the verification suites.
Network random_network(std::mt19937_64& rng, int num_vars, int max_parents);
Example random_partial_example(std::mt19937_64& rng, int num_vars);
SoftObservations random_soft_observations(std::mt19937_64& rng);

struct SuiteReport {
  std::string name;
  int instances = 0;
  double max_discrepancy = 0.0;
  bool passed = false;
};

SuiteReport suite_infer(uint64_t seed, int instances = 500);
SuiteReport suite_island(uint64_t seed, int instances = 100);
SuiteReport suite_mode(uint64_t seed, int instances = 1000);
SuiteReport suite_closed_form(uint64_t seed, int instances = 20);

}  // namespace edml::verify
