#include "edml/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "edml/learn.hpp"

namespace edml::verify {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

bool consistent(const Example& ex, size_t assignment) {
  for (size_t v = 0; v < ex.size(); ++v) {
    if (ex[v] == Value::Missing) continue;
    const size_t bit = (assignment >> v) & 1;
    if ((ex[v] == Value::Positive) != (bit == 1)) return false;
  }
  return true;
}

double joint_entry(const Network& net, size_t assignment) {
  double p = 1.0;
  for (int v = 0; v < net.num_variables(); ++v) {
    int u = 0;
    const auto& ps = net.parents(v);
    for (size_t j = 0; j < ps.size(); ++j)
      if ((assignment >> ps[j]) & 1) u |= 1 << j;
    const double t = net.theta(v, u);
    p *= ((assignment >> v) & 1) ? t : 1.0 - t;
  }
  return p;
}

}  // namespace

JointTable brute_force_joint(const Network& net) {
  const int n = net.num_variables();
  if (n > 20) throw std::invalid_argument("brute force capped at 20 variables");
  JointTable jt;
  jt.table.resize(size_t{1} << n);
  for (size_t a = 0; a < jt.table.size(); ++a)
    jt.table[a] = joint_entry(net, a);
  return jt;
}

double brute_force_evidence(const Network& net, const Example& example) {
  const auto jt = brute_force_joint(net);
  double p = 0.0;
  for (size_t a = 0; a < jt.table.size(); ++a)
    if (consistent(example, a)) p += jt.table[a];
  return p;
}

FamilyMarginals brute_force_marginals(const Network& net,
                                      const Example& example) {
  const auto jt = brute_force_joint(net);
  FamilyMarginals fm;
  fm.prob_evidence = 0.0;
  fm.joint.resize(net.num_variables());
  fm.parent.resize(net.num_variables());
  for (int v = 0; v < net.num_variables(); ++v) {
    fm.joint[v].assign(net.num_parent_states(v) * 2, 0.0);
    fm.parent[v].assign(net.num_parent_states(v), 0.0);
  }
  for (size_t a = 0; a < jt.table.size(); ++a) {
    if (!consistent(example, a)) continue;
    const double p = jt.table[a];
    fm.prob_evidence += p;
    for (int v = 0; v < net.num_variables(); ++v) {
      int u = 0;
      const auto& ps = net.parents(v);
      for (size_t j = 0; j < ps.size(); ++j)
        if ((a >> ps[j]) & 1) u |= 1 << j;
      fm.joint[v][u * 2 + ((a >> v) & 1)] += p;
    }
  }
  if (!(fm.prob_evidence > 0.0)) throw ZeroProbabilityError(-1);
  for (int v = 0; v < net.num_variables(); ++v)
    for (int u = 0; u < net.num_parent_states(v); ++u) {
      fm.joint[v][u * 2] /= fm.prob_evidence;
      fm.joint[v][u * 2 + 1] /= fm.prob_evidence;
      fm.parent[v][u] = fm.joint[v][u * 2] + fm.joint[v][u * 2 + 1];
    }
  return fm;
}

double island_bayes_factor(const Network& net, const Example& example,
                           int variable, int u_bits) {
  const int n = net.num_variables();
  if (n + 1 > 20) throw std::invalid_argument("island capped at 20 variables");
  // Assignment bit n is the generator G. Pr(d, G=g) summed by enumeration;
  // X's CPT row at parents = u is replaced by the copy of G.
  double with_g[2] = {0.0, 0.0};
  for (size_t a = 0; a < (size_t{1} << (n + 1)); ++a) {
    if (!consistent(example, a)) continue;
    const int g = static_cast<int>((a >> n) & 1);
    double p = g ? net.theta(variable, u_bits)
                 : 1.0 - net.theta(variable, u_bits);
    for (int v = 0; v < n; ++v) {
      int u = 0;
      const auto& ps = net.parents(v);
      for (size_t j = 0; j < ps.size(); ++j)
        if ((a >> ps[j]) & 1) u |= 1 << j;
      const int x = static_cast<int>((a >> v) & 1);
      if (v == variable && u == u_bits)
        p *= x == g ? 1.0 : 0.0;  // selector: copy the generator
      else
        p *= x ? net.theta(v, u) : 1.0 - net.theta(v, u);
    }
    with_g[g] += p;
  }
  const double pg = net.theta(variable, u_bits);
  double num = with_g[1] / pg;            // Pr(d | g)
  double den = with_g[0] / (1.0 - pg);    // Pr(d | not g)
  if (den == 0.0) return num == 0.0 ? 1.0 : kInf;
  return num / den;
}

ClosedFormCounts count_families(const Network& structure,
                                const Dataset& data) {
  ClosedFormCounts c;
  const int n = structure.num_variables();
  c.d_xu.resize(n);
  c.d_u.resize(n);
  c.d_u_obs.resize(n);
  c.d_u_miss.resize(n);
  for (int v = 0; v < n; ++v) {
    const int states = structure.num_parent_states(v);
    c.d_xu[v].assign(states, 0);
    c.d_u[v].assign(states, 0);
    c.d_u_obs[v].assign(states, 0);
    c.d_u_miss[v].assign(states, 0);
  }
  for (const auto& ex : data.examples) {
    for (int v = 0; v < n; ++v) {
      int u = 0;
      bool u_set = true;
      const auto& ps = structure.parents(v);
      for (size_t j = 0; j < ps.size(); ++j) {
        if (ex[ps[j]] == Value::Missing) { u_set = false; break; }
        if (ex[ps[j]] == Value::Positive) u |= 1 << j;
      }
      if (!u_set) continue;
      ++c.d_u[v][u];
      if (ex[v] == Value::Missing) {
        ++c.d_u_miss[v][u];
      } else {
        ++c.d_u_obs[v][u];
        if (ex[v] == Value::Positive) ++c.d_xu[v][u];
      }
    }
  }
  return c;
}

namespace {

bool is_complete(const Dataset& data) {
  for (const auto& ex : data.examples)
    for (Value val : ex)
      if (val == Value::Missing) return false;
  return true;
}

}  // namespace

bool is_leaf_missing(const Network& structure, const Dataset& data) {
  std::vector<bool> has_child(structure.num_variables(), false);
  for (int v = 0; v < structure.num_variables(); ++v)
    for (int p : structure.parents(v)) has_child[p] = true;
  for (const auto& ex : data.examples)
    for (int v = 0; v < structure.num_variables(); ++v)
      if (ex[v] == Value::Missing && has_child[v]) return false;
  return true;
}

Network closed_form_complete(const Dataset& data, const Network& structure) {
  if (!is_complete(data))
    throw std::invalid_argument("dataset is not complete");
  const auto c = count_families(structure, data);
  Network net = structure;
  for (int v = 0; v < structure.num_variables(); ++v)
    for (int u = 0; u < structure.num_parent_states(v); ++u) {
      if (c.d_u[v][u] == 0)
        throw std::invalid_argument("undefined parameter (no examples): " +
                                    structure.name(v) + " u=" +
                                    std::to_string(u));
      net.set_theta(v, u,
                    static_cast<double>(c.d_xu[v][u]) / c.d_u[v][u]);
    }
  return net;
}

Network closed_form_leaf_missing(const Dataset& data,
                                 const Network& structure) {
  if (!is_leaf_missing(structure, data))
    throw std::invalid_argument("a non-leaf variable has a missing value");
  const auto c = count_families(structure, data);
  Network net = structure;
  for (int v = 0; v < structure.num_variables(); ++v)
    for (int u = 0; u < structure.num_parent_states(v); ++u) {
      if (c.d_u_obs[v][u] == 0)
        throw std::invalid_argument("undefined parameter (no observed "
                                    "examples): " +
                                    structure.name(v) + " u=" +
                                    std::to_string(u));
      net.set_theta(v, u,
                    static_cast<double>(c.d_xu[v][u]) / c.d_u_obs[v][u]);
    }
  return net;
}

Network em_one_step_leaf_missing(const Network& net, const Dataset& data) {
  if (!is_leaf_missing(net, data))
    throw std::invalid_argument("a non-leaf variable has a missing value");
  const auto c = count_families(net, data);
  Network next = net;
  for (int v = 0; v < net.num_variables(); ++v)
    for (int u = 0; u < net.num_parent_states(v); ++u) {
      if (c.d_u[v][u] == 0) continue;  // no mass: EM leaves it unchanged
      const double t =
          (c.d_xu[v][u] + c.d_u_miss[v][u] * net.theta(v, u)) /
          c.d_u[v][u];
      next.set_theta(v, u, t);
    }
  return next;
}

double grid_mode_oracle(const SoftObservations& obs) {
  double lo = 0.0, hi = 1.0;
  double best_p = 0.0;
  for (int round = 0; round < 3; ++round) {
    const int points = round == 0 ? 10000 : 1000;
    double best = -kInf;
    best_p = lo;
    for (int i = 0; i <= points; ++i) {
      const double p = lo + (hi - lo) * i / points;
      const double val = log_objective(p, obs);
      if (val > best) {
        best = val;
        best_p = p;
      }
    }
    const double step = (hi - lo) / points;
    lo = std::max(0.0, best_p - step);
    hi = std::min(1.0, best_p + step);
  }
  return best_p;
}

Network random_network(std::mt19937_64& rng, int num_vars, int max_parents) {
  std::uniform_real_distribution<double> unif_theta(0.05, 0.95);
  std::vector<std::string> names;
  std::vector<std::vector<int>> parents(num_vars);
  std::vector<std::vector<double>> theta(num_vars);
  for (int v = 0; v < num_vars; ++v)
    names.push_back("V" + std::to_string(v));
  for (int v = 1; v < num_vars; ++v) {
    const int k = std::uniform_int_distribution<int>(
        0, std::min(v, max_parents))(rng);
    std::vector<int> pool(v);
    for (int i = 0; i < v; ++i) pool[i] = i;
    std::shuffle(pool.begin(), pool.end(), rng);
    parents[v].assign(pool.begin(), pool.begin() + k);
    std::sort(parents[v].begin(), parents[v].end());
  }
  for (int v = 0; v < num_vars; ++v) {
    theta[v].resize(size_t{1} << parents[v].size());
    for (auto& t : theta[v]) t = unif_theta(rng);
  }
  return Network(std::move(names), std::move(parents), std::move(theta));
}

Example random_partial_example(std::mt19937_64& rng, int num_vars) {
  std::uniform_int_distribution<int> tri(0, 2);
  Example ex(num_vars);
  for (auto& v : ex) {
    switch (tri(rng)) {
      case 0: v = Value::Negative; break;
      case 1: v = Value::Positive; break;
      default: v = Value::Missing; break;
    }
  }
  return ex;
}

SoftObservations random_soft_observations(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  SoftObservations obs;
  const int n = std::uniform_int_distribution<int>(1, 30)(rng);
  for (int i = 0; i < n; ++i) {
    const double r = unif(rng);
    if (r < 0.05)
      obs.kappas.push_back(0.0);
    else if (r < 0.10)
      obs.kappas.push_back(std::numeric_limits<double>::infinity());
    else
      obs.kappas.push_back(std::pow(10.0, -3.0 + 6.0 * unif(rng)));
  }
  obs.alpha = 1.0 + 4.0 * unif(rng);
  obs.beta = 1.0 + 4.0 * unif(rng);
  return obs;
}

SuiteReport suite_infer(uint64_t seed, int instances) {
  std::mt19937_64 rng(seed);
  SuiteReport rep{"infer", instances, 0.0, false};
  for (int i = 0; i < instances; ++i) {
    const int n = std::uniform_int_distribution<int>(1, 12)(rng);
    const Network net = random_network(rng, n, 3);
    const Example ex = random_partial_example(rng, n);
    const double bf_p = brute_force_evidence(net, ex);
    const double ve_p = prob_evidence(net, ex);
    rep.max_discrepancy = std::max(rep.max_discrepancy, std::abs(bf_p - ve_p));
    if (!(bf_p > 0.0)) continue;
    const auto bf = brute_force_marginals(net, ex);
    const auto ve = family_marginals(net, ex);
    for (int v = 0; v < n; ++v)
      for (int u = 0; u < net.num_parent_states(v); ++u) {
        rep.max_discrepancy = std::max(
            {rep.max_discrepancy,
             std::abs(bf.pr_xu(v, u) - ve.pr_xu(v, u)),
             std::abs(bf.pr_nxu(v, u) - ve.pr_nxu(v, u)),
             std::abs(bf.pr_u(v, u) - ve.pr_u(v, u))});
      }
  }
  rep.passed = rep.max_discrepancy <= 1e-10;
  return rep;
}

SuiteReport suite_island(uint64_t seed, int instances) {
  std::mt19937_64 rng(seed);
  SuiteReport rep{"island", instances, 0.0, false};
  for (int i = 0; i < instances; ++i) {
    const int n = std::uniform_int_distribution<int>(2, 6)(rng);
    const Network net = random_network(rng, n, 3);
    Example ex = random_partial_example(rng, n);
    if (!(brute_force_evidence(net, ex) > 0.0))
      ex.assign(n, Value::Missing);
    const int v = std::uniform_int_distribution<int>(0, n - 1)(rng);
    const int u = std::uniform_int_distribution<int>(
        0, net.num_parent_states(v) - 1)(rng);
    const double k_island = island_bayes_factor(net, ex, v, u);
    const double k_eq1 = edml_bayes_factors(net, ex)[v][u];
    double diff;
    if (std::isinf(k_island) || std::isinf(k_eq1))
      diff = std::isinf(k_island) && std::isinf(k_eq1) ? 0.0 : kInf;
    else
      diff = std::abs(k_island - k_eq1) /
             std::max(1.0, std::max(k_island, k_eq1));
    rep.max_discrepancy = std::max(rep.max_discrepancy, diff);
  }
  rep.passed = rep.max_discrepancy <= 1e-9;
  return rep;
}

SuiteReport suite_mode(uint64_t seed, int instances) {
  std::mt19937_64 rng(seed);
  SuiteReport rep{"mode", instances, 0.0, false};
  for (int i = 0; i < instances; ++i) {
    const auto obs = random_soft_observations(rng);
    const double diff =
        std::abs(solve_mode(obs) - grid_mode_oracle(obs));
    rep.max_discrepancy = std::max(rep.max_discrepancy, diff);
  }
  rep.passed = rep.max_discrepancy <= 1e-6;
  return rep;
}

SuiteReport suite_closed_form(uint64_t seed, int instances) {
  std::mt19937_64 rng(seed);
  SuiteReport rep{"closed-form", instances, 0.0, false};
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int i = 0; i < instances; ++i) {
    // Keep families small so every parent instantiation shows up.
    const int n = std::uniform_int_distribution<int>(2, 6)(rng);
    Network structure = random_network(rng, n, 2);
    for (int v = 0; v < n; ++v)
      for (int u = 0; u < structure.num_parent_states(v); ++u)
        structure.set_theta(v, u, 0.2 + 0.6 * unif(rng));

    Dataset complete;
    ClosedFormCounts counts;
    bool ok = false;
    for (int attempt = 0; attempt < 50 && !ok; ++attempt) {
      complete = simulate_dataset(structure, 200, {}, rng());
      counts = count_families(structure, complete);
      ok = true;
      for (int v = 0; v < n && ok; ++v)
        for (int u = 0; u < structure.num_parent_states(v); ++u)
          if (counts.d_u[v][u] == 0) { ok = false; break; }
    }
    if (!ok) continue;

    const auto priors = BetaPriors::uniform(structure, 1.0, 1.0);
    const Network oracle = closed_form_complete(complete, structure);
    const Network seeded = random_seed(structure, rng());
    const Network em1 = em_iteration(seeded, complete, priors);
    const Network ed1 = edml_iteration(seeded, complete, priors, 1.0);
    for (int v = 0; v < n; ++v)
      for (int u = 0; u < structure.num_parent_states(v); ++u) {
        rep.max_discrepancy = std::max(
            {rep.max_discrepancy,
             std::abs(em1.theta(v, u) - oracle.theta(v, u)),
             std::abs(ed1.theta(v, u) - oracle.theta(v, u))});
      }

    // Leaf-missing variant: blank some leaf values, EDML(1) hits the
    // Prop-2 estimate and EM's first step matches the closed formula.
    std::vector<bool> has_child(n, false);
    for (int v = 0; v < n; ++v)
      for (int p : structure.parents(v)) has_child[p] = true;
    Dataset leafmiss = complete;
    for (auto& ex : leafmiss.examples)
      for (int v = 0; v < n; ++v)
        if (!has_child[v] && unif(rng) < 0.3) ex[v] = Value::Missing;
    const auto lm_counts = count_families(structure, leafmiss);
    bool lm_ok = true;
    for (int v = 0; v < n && lm_ok; ++v)
      for (int u = 0; u < structure.num_parent_states(v); ++u)
        if (lm_counts.d_u_obs[v][u] == 0) { lm_ok = false; break; }
    if (!lm_ok) continue;

    const Network lm_oracle = closed_form_leaf_missing(leafmiss, structure);
    const Network lm_ed1 = edml_iteration(seeded, leafmiss, priors, 1.0);
    const Network em_oracle = em_one_step_leaf_missing(seeded, leafmiss);
    const Network lm_em1 = em_iteration(seeded, leafmiss, priors);
    for (int v = 0; v < n; ++v)
      for (int u = 0; u < structure.num_parent_states(v); ++u) {
        rep.max_discrepancy = std::max(
            {rep.max_discrepancy,
             std::abs(lm_ed1.theta(v, u) - lm_oracle.theta(v, u)),
             std::abs(lm_em1.theta(v, u) - em_oracle.theta(v, u))});
      }
  }
  rep.passed = rep.max_discrepancy <= 1e-9;
  return rep;
}

}  // namespace edml::verify
