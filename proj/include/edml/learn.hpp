#pragma once

#include <cstdint>
#include <vector>

#include "edml/infer.hpp"
#include "edml/model.hpp"

namespace edml {

// Bayes factors kappa_{x|u} for one example: slice[v][u_bits].
// kappa = 1 whenever the example is inconsistent with u; for a complete
// example each entry is 0, 1, or +inf.
using BayesFactorSlice = std::vector<std::vector<double>>;

enum class Algorithm { EM, EDML };

struct LearnConfig {
  Algorithm algorithm = Algorithm::EM;
  double alpha = 2.0;
  double beta = 2.0;
  double damping = 0.5;       // EDML only; 1.0 = undamped
  int max_iterations = 1024;
  double stop_delta = 1e-6;   // max |theta change|; <= 0 disables
  uint64_t seed = 0;
  bool explicit_seed = false;  // use the structure network's theta as seed
  bool parallel = true;        // OpenMP over distinct examples
};

struct TraceRow {
  int iteration = 0;
  double log_posterior = 0.0;
  double max_delta = 0.0;
  double elapsed_s = 0.0;
};

using Trace = std::vector<TraceRow>;

// Parameter clamp keeping the Eq-1 divisions well defined.
constexpr double kThetaClamp = 1e-9;

// Family marginals for every distinct example, first-occurrence order.
// The parallel path gives bit-identical results to the serial one: the
// per-example computations are independent and the reduction order is
// fixed by slot.
std::vector<FamilyMarginals> marginals_sweep(
    const Network& net, const std::vector<WeightedExample>& examples,
    bool parallel);

Network em_iteration(const Network& net, const Dataset& data,
                     const BetaPriors& priors, bool parallel = false);

BayesFactorSlice edml_bayes_factors(const Network& net, const Example& example,
                                    int example_index = -1);

Network edml_iteration(const Network& net, const Dataset& data,
                       const BetaPriors& priors, double damping,
                       bool parallel = false);

// Seed theta values drawn uniformly from [0.05, 0.95].
Network random_seed(const Network& structure, uint64_t seed);

struct LearnResult {
  Network network;
  Trace trace;
};

LearnResult run(const LearnConfig& config, const Network& structure,
                const Dataset& data);

}  // namespace edml
