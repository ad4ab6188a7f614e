#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "edml/infer.hpp"
#include "edml/verify.hpp"

using namespace edml;

namespace {

Network fig2_network() {
  return parse_network(
      "var H\nvar S\nvar E\n"
      "parents S H\nparents E H\n"
      "cpt H 0.5\n"
      "cpt S 0 0.3\ncpt S 1 0.8\n"
      "cpt E 0 0.2\ncpt E 1 0.9\n");
}

}  // namespace

TEST_CASE("prob_evidence basics") {
  const auto net = parse_network("var X\ncpt X 0.6\n");
  CHECK(prob_evidence(net, {Value::Missing}) == doctest::Approx(1.0));
  CHECK(prob_evidence(net, {Value::Negative}) == doctest::Approx(0.4));

  const auto chain = parse_network(
      "var H\nvar E\nparents E H\ncpt H 0.3\ncpt E 0 0.2\ncpt E 1 0.9\n");
  // 0.3*0.9 + 0.7*0.2
  CHECK(prob_evidence(chain, {Value::Missing, Value::Positive}) ==
        doctest::Approx(0.41).epsilon(1e-12));
}

TEST_CASE("family marginals on deterministic evidence") {
  const auto net = fig2_network();
  const int s = net.index_of("S"), h = net.index_of("H");
  const Example d = {Value::Positive, Value::Positive, Value::Negative};
  const auto fm = family_marginals(net, d);
  CHECK(fm.pr_xu(s, 1) == doctest::Approx(1.0));  // S=s with H=h in d
  CHECK(fm.pr_u(s, 1) == doctest::Approx(1.0));
  CHECK(fm.pr_xu(s, 0) == doctest::Approx(0.0));  // u = h-bar not in d
  CHECK(fm.pr_u(s, 0) == doctest::Approx(0.0));
  CHECK(fm.pr_xu(h, 0) == doctest::Approx(1.0));
}

TEST_CASE("all-missing example: posterior equals prior for a root") {
  const auto net = fig2_network();
  const auto fm = family_marginals(
      net, {Value::Missing, Value::Missing, Value::Missing});
  CHECK(fm.prob_evidence == doctest::Approx(1.0));
  CHECK(fm.pr_xu(net.index_of("H"), 0) == doctest::Approx(0.5));
}

TEST_CASE("posterior of hidden cause given S = s is 8/11") {
  const auto net = fig2_network();
  const Example d = {Value::Missing, Value::Positive, Value::Missing};
  const auto fm = family_marginals(net, d);
  CHECK(fm.pr_xu(net.index_of("H"), 0) ==
        doctest::Approx(8.0 / 11.0).epsilon(1e-12));
}

TEST_CASE("zero-probability evidence raises with the example index") {
  const auto net = parse_network("var X\ncpt X 1.0\n");
  CHECK_THROWS_AS(family_marginals(net, {Value::Negative}, 7),
                  ZeroProbabilityError);
  try {
    family_marginals(net, {Value::Negative}, 7);
  } catch (const ZeroProbabilityError& e) {
    CHECK(e.example_index == 7);
  }
}

TEST_CASE("log-likelihood and log-posterior") {
  const auto net = parse_network("var X\ncpt X 0.5\n");
  const Dataset empty = parse_dataset("X\n");
  CHECK(log_likelihood(net, empty) == doctest::Approx(0.0));

  const Dataset four = parse_dataset("X\n1\n1\n0\n0\n");
  CHECK(log_likelihood(net, four) ==
        doctest::Approx(4 * std::log(0.5)).epsilon(1e-12));

  const auto priors = BetaPriors::uniform(net, 2.0, 2.0);
  CHECK(log_posterior(net, four, priors) ==
        doctest::Approx(4 * std::log(0.5) + 2 * std::log(0.5)));

  const auto impossible = parse_network("var X\ncpt X 1.0\n");
  CHECK(log_likelihood(impossible, parse_dataset("X\n0\n")) ==
        -std::numeric_limits<double>::infinity());
}

TEST_CASE("family marginals internal consistency on random instances") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = std::uniform_int_distribution<int>(1, 8)(rng);
    const auto net = verify::random_network(rng, n, 3);
    auto ex = verify::random_partial_example(rng, n);
    if (!(prob_evidence(net, ex) > 0.0)) continue;
    const auto fm = family_marginals(net, ex);
    for (int v = 0; v < n; ++v) {
      double total = 0.0;
      for (int u = 0; u < net.num_parent_states(v); ++u) {
        CHECK(fm.pr_xu(v, u) + fm.pr_nxu(v, u) ==
              doctest::Approx(fm.pr_u(v, u)).epsilon(1e-10));
        total += fm.pr_u(v, u);
      }
      CHECK(total == doctest::Approx(1.0).epsilon(1e-10));
    }
  }
}

TEST_CASE("agrees with brute force and matches full-joint log-likelihood") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = std::uniform_int_distribution<int>(1, 10)(rng);
    const auto net = verify::random_network(rng, n, 3);
    const auto ex = verify::random_partial_example(rng, n);
    CHECK(prob_evidence(net, ex) ==
          doctest::Approx(verify::brute_force_evidence(net, ex))
              .epsilon(1e-12));
  }
}
