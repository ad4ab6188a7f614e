#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace edml {

// Cell state of one variable in one example.
enum class Value : uint8_t { Negative = 0, Positive = 1, Missing = 2 };

using Example = std::vector<Value>;

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// DAG over binary variables with one parameter theta_{x|u} per
// (variable, parent instantiation). Parent instantiations are keyed by a
// bit pattern over declared parent order: bit j is 1 iff parent j is
// positive.
class Network {
 public:
  Network(std::vector<std::string> variables,
          std::vector<std::vector<int>> parents,
          std::vector<std::vector<double>> theta);

  int num_variables() const { return static_cast<int>(names_.size()); }
  const std::vector<std::string>& names() const { return names_; }
  const std::string& name(int v) const { return names_[v]; }
  int index_of(const std::string& name) const;

  const std::vector<int>& parents(int v) const { return parents_[v]; }
  int num_parent_states(int v) const {
    return 1 << static_cast<int>(parents_[v].size());
  }
  // Pr(X=positive | parents = u_bits)
  double theta(int v, int u_bits) const { return theta_[v][u_bits]; }
  void set_theta(int v, int u_bits, double p) { theta_[v][u_bits] = p; }

  int num_parameters() const;
  // Variables in a topological order (parents before children).
  const std::vector<int>& topological_order() const { return topo_; }

 private:
  std::vector<std::string> names_;
  std::vector<std::vector<int>> parents_;
  std::vector<std::vector<double>> theta_;
  std::unordered_map<std::string, int> index_;
  std::vector<int> topo_;
};

// Multiset of examples over a fixed variable header.
struct Dataset {
  std::vector<std::string> header;
  std::vector<Example> examples;

  int num_examples() const { return static_cast<int>(examples.size()); }
};

struct WeightedExample {
  Example example;
  int count = 0;
};

// Beta prior exponents, one pair per (variable, parent instantiation).
// alpha = beta = 1 is maximum likelihood; alpha = beta = 2 is Laplace
// smoothing.
struct BetaPriors {
  std::vector<std::vector<double>> alpha;
  std::vector<std::vector<double>> beta;

  static BetaPriors uniform(const Network& net, double a, double b);
  double a(int v, int u_bits) const { return alpha[v][u_bits]; }
  double b(int v, int u_bits) const { return beta[v][u_bits]; }
};

Network parse_network(const std::string& text);
std::string serialize_network(const Network& net);

Dataset parse_dataset(const std::string& text);
std::string serialize_dataset(const Dataset& data);

// Distinct examples with multiplicities, in first-occurrence order.
std::vector<WeightedExample> distinct_examples(const Dataset& data);

// Forward sampling in topological order; hidden variables are replaced by
// Missing. Deterministic in (net, n, hidden, seed): example i is drawn from
// its own stream derived from the master seed, so results do not depend on
// evaluation order.
Dataset simulate_dataset(const Network& net, int n,
                         const std::vector<std::string>& hidden,
                         uint64_t seed);

}  // namespace edml
