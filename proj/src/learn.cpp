#include "edml/learn.hpp"

#include "edml/softest.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <random>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace edml {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

double clamp_theta(double p) {
  return std::clamp(p, kThetaClamp, 1.0 - kThetaClamp);
}

// Parent bits of v under a (partial) example, or -1 if a parent is missing.
int parent_bits(const Network& net, const Example& ex, int v) {
  int bits = 0;
  const auto& ps = net.parents(v);
  for (size_t j = 0; j < ps.size(); ++j) {
    if (ex[ps[j]] == Value::Missing) return -1;
    if (ex[ps[j]] == Value::Positive) bits |= 1 << j;
  }
  return bits;
}

}  // namespace

std::vector<FamilyMarginals> marginals_sweep(
    const Network& net, const std::vector<WeightedExample>& examples,
    bool parallel) {
  std::vector<FamilyMarginals> out(examples.size());
  int failed_index = -1;
#pragma omp parallel for schedule(dynamic) if (parallel)
  for (int i = 0; i < static_cast<int>(examples.size()); ++i) {
    try {
      out[i] = family_marginals(net, examples[i].example, i);
    } catch (const ZeroProbabilityError&) {
#pragma omp critical
      if (failed_index == -1 || i < failed_index) failed_index = i;
    }
  }
  if (failed_index != -1) throw ZeroProbabilityError(failed_index);
  return out;
}

Network em_iteration(const Network& net, const Dataset& data,
                     const BetaPriors& priors, bool parallel) {
  const auto distinct = distinct_examples(data);
  const auto marginals = marginals_sweep(net, distinct, parallel);

  Network next = net;
  for (int v = 0; v < net.num_variables(); ++v) {
    for (int u = 0; u < net.num_parent_states(v); ++u) {
      double num = priors.a(v, u) - 1.0;
      double den = priors.a(v, u) + priors.b(v, u) - 2.0;
      for (size_t i = 0; i < distinct.size(); ++i) {
        num += distinct[i].count * marginals[i].pr_xu(v, u);
        den += distinct[i].count * marginals[i].pr_u(v, u);
      }
      if (den > 0.0) next.set_theta(v, u, clamp_theta(num / den));
      // den == 0 only when alpha+beta = 2 and u never has mass: keep old.
    }
  }
  return next;
}

namespace {

BayesFactorSlice bayes_factors_from(const Network& net,
                                    const FamilyMarginals& fm,
                                    const Example& example) {
  BayesFactorSlice slice(net.num_variables());
  for (int v = 0; v < net.num_variables(); ++v) {
    const int states = net.num_parent_states(v);
    slice[v].assign(states, 1.0);
    const int observed_u = parent_bits(net, example, v);
    for (int u = 0; u < states; ++u) {
      if (observed_u != -1 && observed_u != u) continue;  // inconsistent: 1
      const double pu = fm.pr_u(v, u);
      const double t = net.theta(v, u);
      double num = fm.pr_xu(v, u) / t - pu + 1.0;
      double den = fm.pr_nxu(v, u) / (1.0 - t) - pu + 1.0;
      // Exact-zero detection under floating point keeps complete examples
      // in {0, 1, inf}.
      if (std::abs(num) <= 1e-12) num = 0.0;
      if (std::abs(den) <= 1e-12) den = 0.0;
      double kappa;
      if (den == 0.0)
        kappa = num == 0.0 ? 1.0 : kInf;
      else
        kappa = std::max(num, 0.0) / den;
      slice[v][u] = kappa;
    }
  }
  return slice;
}

}  // namespace

BayesFactorSlice edml_bayes_factors(const Network& net, const Example& example,
                                    int example_index) {
  return bayes_factors_from(net, family_marginals(net, example, example_index),
                            example);
}

Network edml_iteration(const Network& net, const Dataset& data,
                       const BetaPriors& priors, double damping,
                       bool parallel) {
  const auto distinct = distinct_examples(data);
  const auto marginals = marginals_sweep(net, distinct, parallel);

  std::vector<BayesFactorSlice> slices(distinct.size());
  for (size_t i = 0; i < distinct.size(); ++i)
    slices[i] = bayes_factors_from(net, marginals[i], distinct[i].example);

  Network next = net;
  for (int v = 0; v < net.num_variables(); ++v) {
    for (int u = 0; u < net.num_parent_states(v); ++u) {
      SoftObservations obs;
      obs.alpha = priors.a(v, u);
      obs.beta = priors.b(v, u);
      for (size_t i = 0; i < distinct.size(); ++i) {
        const double kappa = slices[i][v][u];
        if (kappa == 1.0) continue;  // neutral
        obs.kappas.insert(obs.kappas.end(), distinct[i].count, kappa);
      }
      const double mode = solve_mode(obs);
      const double updated =
          (1.0 - damping) * net.theta(v, u) + damping * mode;
      next.set_theta(v, u, clamp_theta(updated));
    }
  }
  return next;
}

Network random_seed(const Network& structure, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.05, 0.95);
  Network net = structure;
  for (int v = 0; v < net.num_variables(); ++v)
    for (int u = 0; u < net.num_parent_states(v); ++u)
      net.set_theta(v, u, unif(rng));
  return net;
}

LearnResult run(const LearnConfig& config, const Network& structure,
                const Dataset& data) {
  const auto priors =
      BetaPriors::uniform(structure, config.alpha, config.beta);
  Network net = config.explicit_seed ? structure
                                     : random_seed(structure, config.seed);

  const auto t0 = std::chrono::steady_clock::now();
  const auto now_s = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         t0)
        .count();
  };

  Trace trace;
  trace.push_back({0, log_posterior(net, data, priors), 0.0, now_s()});

  for (int it = 1; it <= config.max_iterations; ++it) {
    Network next =
        config.algorithm == Algorithm::EM
            ? em_iteration(net, data, priors, config.parallel)
            : edml_iteration(net, data, priors, config.damping,
                             config.parallel);
    double max_delta = 0.0;
    for (int v = 0; v < net.num_variables(); ++v)
      for (int u = 0; u < net.num_parent_states(v); ++u)
        max_delta = std::max(max_delta,
                             std::abs(next.theta(v, u) - net.theta(v, u)));
    net = std::move(next);
    trace.push_back({it, log_posterior(net, data, priors), max_delta,
                     now_s()});
    if (config.stop_delta > 0.0 && max_delta < config.stop_delta) break;
  }
  return {std::move(net), std::move(trace)};
}

}  // namespace edml
