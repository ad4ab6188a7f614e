#include "edml/infer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "edml/factor.hpp"

namespace edml {

namespace {

Factor cpt_factor(const Network& net, int v) {
  const auto& ps = net.parents(v);
  Factor f;
  f.scope.push_back(v);
  f.scope.insert(f.scope.end(), ps.begin(), ps.end());
  f.table.resize(size_t{2} << ps.size());
  for (int u = 0; u < net.num_parent_states(v); ++u) {
    const double p = net.theta(v, u);
    // Scope order is (v, parents...): v is bit 0.
    size_t idx = 0;
    for (size_t j = 0; j < ps.size(); ++j)
      idx |= static_cast<size_t>((u >> j) & 1) << (j + 1);
    f.table[idx] = 1.0 - p;
    f.table[idx | 1] = p;
  }
  // Canonical ascending scope.
  std::vector<int> sorted = f.scope;
  std::sort(sorted.begin(), sorted.end());
  if (sorted != f.scope) f = multiply(f, Factor::constant(1.0));
  return f;
}

// CPT factors with observed variables outside `keep` restricted away and
// observed variables inside `keep` turned into indicator factors.
std::vector<Factor> evidence_factors(const Network& net,
                                     const Example& example,
                                     const std::vector<int>& keep) {
  std::vector<Factor> factors;
  for (int v = 0; v < net.num_variables(); ++v) {
    Factor f = cpt_factor(net, v);
    // Restrict observed variables not kept in the query scope.
    for (int w : std::vector<int>(f.scope)) {
      if (example[w] == Value::Missing) continue;
      if (std::find(keep.begin(), keep.end(), w) != keep.end()) continue;
      f = restrict_to(f, w, example[w] == Value::Positive ? 1 : 0);
    }
    factors.push_back(std::move(f));
  }
  for (int w : keep) {
    if (example[w] == Value::Missing) continue;
    Factor ind;
    ind.scope = {w};
    ind.table = {0.0, 0.0};
    ind.table[example[w] == Value::Positive ? 1 : 0] = 1.0;
    factors.push_back(std::move(ind));
  }
  return factors;
}

}  // namespace

double prob_evidence(const Network& net, const Example& example) {
  Factor f = eliminate_all_but(evidence_factors(net, example, {}), {});
  return f.table[0];
}

FamilyMarginals family_marginals(const Network& net, const Example& example,
                                 int example_index) {
  FamilyMarginals fm;
  fm.prob_evidence = prob_evidence(net, example);
  if (!(fm.prob_evidence > 0.0)) throw ZeroProbabilityError(example_index);

  fm.joint.resize(net.num_variables());
  fm.parent.resize(net.num_variables());
  for (int v = 0; v < net.num_variables(); ++v) {
    const auto& ps = net.parents(v);
    std::vector<int> family;
    family.push_back(v);
    family.insert(family.end(), ps.begin(), ps.end());
    std::vector<int> keep = family;
    std::sort(keep.begin(), keep.end());

    Factor joint = eliminate_all_but(evidence_factors(net, example, keep),
                                     keep);
    const int states = net.num_parent_states(v);
    fm.joint[v].assign(states * 2, 0.0);
    fm.parent[v].assign(states, 0.0);
    // Map (x, u_bits) to an index in joint's ascending scope.
    const auto pos_of = [&](int var) {
      return static_cast<int>(std::find(joint.scope.begin(),
                                        joint.scope.end(), var) -
                              joint.scope.begin());
    };
    const int vpos = pos_of(v);
    std::vector<int> ppos(ps.size());
    for (size_t j = 0; j < ps.size(); ++j) ppos[j] = pos_of(ps[j]);
    for (int u = 0; u < states; ++u) {
      for (int x = 0; x < 2; ++x) {
        size_t idx = static_cast<size_t>(x) << vpos;
        for (size_t j = 0; j < ps.size(); ++j)
          idx |= static_cast<size_t>((u >> j) & 1) << ppos[j];
        const double p = joint.table[idx] / fm.prob_evidence;
        fm.joint[v][u * 2 + x] = std::clamp(p, 0.0, 1.0);
      }
      fm.parent[v][u] = std::min(1.0, fm.joint[v][u * 2] + fm.joint[v][u * 2 + 1]);
    }
  }
  return fm;
}

double log_likelihood(const Network& net, const Dataset& data) {
  double ll = 0.0;
  for (const auto& [ex, count] : distinct_examples(data)) {
    const double p = prob_evidence(net, ex);
    if (!(p > 0.0)) return -std::numeric_limits<double>::infinity();
    ll += count * std::log(p);
  }
  return ll;
}

double log_posterior(const Network& net, const Dataset& data,
                     const BetaPriors& priors) {
  double lp = log_likelihood(net, data);
  for (int v = 0; v < net.num_variables(); ++v) {
    for (int u = 0; u < net.num_parent_states(v); ++u) {
      const double t = net.theta(v, u);
      const double a = priors.a(v, u), b = priors.b(v, u);
      if (a > 1.0) lp += (a - 1.0) * std::log(t);
      if (b > 1.0) lp += (b - 1.0) * std::log(1.0 - t);
    }
  }
  return lp;
}

}  // namespace edml
