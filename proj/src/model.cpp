#include "edml/model.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <sstream>

namespace edml {

Network::Network(std::vector<std::string> variables,
                 std::vector<std::vector<int>> parents,
                 std::vector<std::vector<double>> theta)
    : names_(std::move(variables)),
      parents_(std::move(parents)),
      theta_(std::move(theta)) {
  const int n = static_cast<int>(names_.size());
  for (int v = 0; v < n; ++v) {
    if (!index_.emplace(names_[v], v).second)
      throw ParseError("duplicate variable: " + names_[v]);
  }
  for (int v = 0; v < n; ++v) {
    if (theta_[v].size() != static_cast<size_t>(1) << parents_[v].size())
      throw ParseError("CPT size mismatch for " + names_[v]);
    for (double p : theta_[v])
      if (!(p >= 0.0 && p <= 1.0))
        throw ParseError("parameter out of [0,1] for " + names_[v]);
  }
  // Kahn's algorithm; leftover nodes mean a cycle.
  std::vector<int> indeg(n, 0);
  std::vector<std::vector<int>> children(n);
  for (int v = 0; v < n; ++v)
    for (int p : parents_[v]) {
      children[p].push_back(v);
      ++indeg[v];
    }
  std::vector<int> queue;
  for (int v = 0; v < n; ++v)
    if (indeg[v] == 0) queue.push_back(v);
  for (size_t head = 0; head < queue.size(); ++head) {
    int v = queue[head];
    topo_.push_back(v);
    for (int c : children[v])
      if (--indeg[c] == 0) queue.push_back(c);
  }
  if (static_cast<int>(topo_.size()) != n)
    throw ParseError("cycle detected in parent graph");
}

int Network::index_of(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) throw ParseError("unknown variable: " + name);
  return it->second;
}

int Network::num_parameters() const {
  int k = 0;
  for (int v = 0; v < num_variables(); ++v) k += num_parent_states(v);
  return k;
}

BetaPriors BetaPriors::uniform(const Network& net, double a, double b) {
  BetaPriors pr;
  for (int v = 0; v < net.num_variables(); ++v) {
    pr.alpha.emplace_back(net.num_parent_states(v), a);
    pr.beta.emplace_back(net.num_parent_states(v), b);
  }
  return pr;
}

namespace {

std::vector<std::string> tokenize(const std::string& line) {
  std::istringstream in(line);
  std::vector<std::string> toks;
  std::string t;
  while (in >> t) {
    if (t[0] == '#') break;
    toks.push_back(t);
  }
  return toks;
}

}  // namespace

Network parse_network(const std::string& text) {
  std::vector<std::string> names;
  std::map<std::string, int> index;
  std::vector<std::vector<std::string>> parent_names;
  std::map<std::string, std::map<std::string, double>> cpt_lines;

  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    auto toks = tokenize(line);
    if (toks.empty()) continue;
    if (toks[0] == "var") {
      if (toks.size() != 2) throw ParseError("malformed var line: " + line);
      if (index.count(toks[1]))
        throw ParseError("duplicate variable: " + toks[1]);
      index[toks[1]] = static_cast<int>(names.size());
      names.push_back(toks[1]);
      parent_names.emplace_back();
    } else if (toks[0] == "parents") {
      if (toks.size() < 3) throw ParseError("malformed parents line: " + line);
      auto it = index.find(toks[1]);
      if (it == index.end())
        throw ParseError("parents for undeclared variable: " + toks[1]);
      parent_names[it->second].assign(toks.begin() + 2, toks.end());
    } else if (toks[0] == "cpt") {
      if (toks.size() == 3) {
        cpt_lines[toks[1]][""] = std::stod(toks[2]);
      } else if (toks.size() == 4) {
        cpt_lines[toks[1]][toks[2]] = std::stod(toks[3]);
      } else {
        throw ParseError("malformed cpt line: " + line);
      }
    } else {
      throw ParseError("unknown directive: " + toks[0]);
    }
  }

  std::vector<std::vector<int>> parents(names.size());
  std::vector<std::vector<double>> theta(names.size());
  for (size_t v = 0; v < names.size(); ++v) {
    for (const auto& p : parent_names[v]) {
      auto it = index.find(p);
      if (it == index.end())
        throw ParseError("undeclared parent " + p + " of " + names[v]);
      parents[v].push_back(it->second);
    }
    const int k = static_cast<int>(parents[v].size());
    const int states = 1 << k;
    theta[v].assign(states, -1.0);
    auto it = cpt_lines.find(names[v]);
    if (it == cpt_lines.end()) throw ParseError("missing cpt for " + names[v]);
    for (const auto& [pattern, p] : it->second) {
      int bits = 0;
      if (k == 0) {
        if (!pattern.empty()) throw ParseError("root cpt takes no bitpattern");
      } else {
        if (static_cast<int>(pattern.size()) != k)
          throw ParseError("bitpattern arity mismatch for " + names[v]);
        for (int j = 0; j < k; ++j) {
          if (pattern[j] == '1')
            bits |= 1 << j;
          else if (pattern[j] != '0')
            throw ParseError("bad bitpattern " + pattern);
        }
      }
      if (!(p >= 0.0 && p <= 1.0))
        throw ParseError("cpt entry out of range for " + names[v]);
      theta[v][bits] = p;
    }
    for (int bits = 0; bits < states; ++bits)
      if (theta[v][bits] < 0.0)
        throw ParseError("missing cpt entry for " + names[v]);
  }
  return Network(std::move(names), std::move(parents), std::move(theta));
}

std::string serialize_network(const Network& net) {
  std::ostringstream out;
  out.precision(14);
  for (int v = 0; v < net.num_variables(); ++v) out << "var " << net.name(v) << "\n";
  for (int v = 0; v < net.num_variables(); ++v) {
    const auto& ps = net.parents(v);
    if (!ps.empty()) {
      out << "parents " << net.name(v);
      for (int p : ps) out << ' ' << net.name(p);
      out << "\n";
    }
    for (int bits = 0; bits < net.num_parent_states(v); ++bits) {
      out << "cpt " << net.name(v);
      if (!ps.empty()) {
        out << ' ';
        for (size_t j = 0; j < ps.size(); ++j)
          out << ((bits >> j) & 1 ? '1' : '0');
      }
      out << ' ' << net.theta(v, bits) << "\n";
    }
  }
  return out.str();
}

Dataset parse_dataset(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw ParseError("empty dataset file");
  Dataset data;
  {
    std::istringstream hdr(line);
    std::string cell;
    while (std::getline(hdr, cell, ',')) data.header.push_back(cell);
  }
  const size_t arity = data.header.size();
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    Example ex;
    std::istringstream row(line);
    std::string cell;
    while (std::getline(row, cell, ',')) {
      if (cell == "1")
        ex.push_back(Value::Positive);
      else if (cell == "0")
        ex.push_back(Value::Negative);
      else if (cell == "?")
        ex.push_back(Value::Missing);
      else
        throw ParseError("unknown cell token: " + cell);
    }
    if (ex.size() != arity)
      throw ParseError("row arity mismatch: " + line);
    data.examples.push_back(std::move(ex));
  }
  return data;
}

std::string serialize_dataset(const Dataset& data) {
  std::ostringstream out;
  for (size_t i = 0; i < data.header.size(); ++i)
    out << (i ? "," : "") << data.header[i];
  out << "\n";
  for (const auto& ex : data.examples) {
    for (size_t i = 0; i < ex.size(); ++i) {
      if (i) out << ',';
      switch (ex[i]) {
        case Value::Positive: out << '1'; break;
        case Value::Negative: out << '0'; break;
        case Value::Missing: out << '?'; break;
      }
    }
    out << "\n";
  }
  return out.str();
}

std::vector<WeightedExample> distinct_examples(const Dataset& data) {
  std::vector<WeightedExample> out;
  std::map<Example, int> seen;  // example -> slot in out
  for (const auto& ex : data.examples) {
    auto it = seen.find(ex);
    if (it == seen.end()) {
      seen.emplace(ex, static_cast<int>(out.size()));
      out.push_back({ex, 1});
    } else {
      ++out[it->second].count;
    }
  }
  return out;
}

namespace {

// splitmix64, used to derive independent per-example stream seeds.
uint64_t mix64(uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

Dataset simulate_dataset(const Network& net, int n,
                         const std::vector<std::string>& hidden,
                         uint64_t seed) {
  std::vector<bool> is_hidden(net.num_variables(), false);
  for (const auto& h : hidden) is_hidden[net.index_of(h)] = true;

  Dataset data;
  data.header = net.names();
  data.examples.resize(n);
  for (int i = 0; i < n; ++i) {
    std::mt19937_64 rng(mix64(seed ^ mix64(static_cast<uint64_t>(i) + 1)));
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    Example ex(net.num_variables(), Value::Missing);
    for (int v : net.topological_order()) {
      int bits = 0;
      const auto& ps = net.parents(v);
      for (size_t j = 0; j < ps.size(); ++j)
        if (ex[ps[j]] == Value::Positive) bits |= 1 << j;
      ex[v] = unif(rng) < net.theta(v, bits) ? Value::Positive
                                             : Value::Negative;
    }
    for (int v = 0; v < net.num_variables(); ++v)
      if (is_hidden[v]) ex[v] = Value::Missing;
    data.examples[i] = std::move(ex);
  }
  return data;
}

}  // namespace edml
