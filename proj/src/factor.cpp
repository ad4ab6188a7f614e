#include "edml/factor.hpp"

#include <algorithm>
#include <stdexcept>

namespace edml {

namespace {

// For each bit position of the result scope, the bit it contributes to in a
// factor's own index (or -1 if the variable is absent).
std::vector<int> bit_map(const std::vector<int>& result_scope,
                         const std::vector<int>& scope) {
  std::vector<int> map(result_scope.size(), -1);
  for (size_t i = 0; i < result_scope.size(); ++i) {
    auto it = std::find(scope.begin(), scope.end(), result_scope[i]);
    if (it != scope.end())
      map[i] = static_cast<int>(it - scope.begin());
  }
  return map;
}

}  // namespace

Factor multiply(const Factor& a, const Factor& b) {
  std::vector<int> scope = a.scope;
  for (int v : b.scope)
    if (std::find(scope.begin(), scope.end(), v) == scope.end())
      scope.push_back(v);
  std::sort(scope.begin(), scope.end());

  const auto amap = bit_map(scope, a.scope);
  const auto bmap = bit_map(scope, b.scope);
  Factor out{scope, std::vector<double>(size_t{1} << scope.size())};
  for (size_t idx = 0; idx < out.table.size(); ++idx) {
    size_t ai = 0, bi = 0;
    for (size_t i = 0; i < scope.size(); ++i) {
      const size_t bit = (idx >> i) & 1;
      if (amap[i] >= 0) ai |= bit << amap[i];
      if (bmap[i] >= 0) bi |= bit << bmap[i];
    }
    out.table[idx] = a.table[ai] * b.table[bi];
  }
  return out;
}

Factor sum_out(const Factor& f, int var) {
  auto it = std::find(f.scope.begin(), f.scope.end(), var);
  if (it == f.scope.end()) return f;
  const int pos = static_cast<int>(it - f.scope.begin());
  Factor out;
  out.scope = f.scope;
  out.scope.erase(out.scope.begin() + pos);
  out.table.assign(f.table.size() >> 1, 0.0);
  const size_t lo_mask = (size_t{1} << pos) - 1;
  for (size_t idx = 0; idx < out.table.size(); ++idx) {
    const size_t base = (idx & lo_mask) | ((idx & ~lo_mask) << 1);
    out.table[idx] = f.table[base] + f.table[base | (size_t{1} << pos)];
  }
  return out;
}

Factor restrict_to(const Factor& f, int var, int value) {
  auto it = std::find(f.scope.begin(), f.scope.end(), var);
  if (it == f.scope.end()) return f;
  const int pos = static_cast<int>(it - f.scope.begin());
  Factor out;
  out.scope = f.scope;
  out.scope.erase(out.scope.begin() + pos);
  out.table.assign(f.table.size() >> 1, 0.0);
  const size_t lo_mask = (size_t{1} << pos) - 1;
  for (size_t idx = 0; idx < out.table.size(); ++idx) {
    const size_t src = (idx & lo_mask) | ((idx & ~lo_mask) << 1) |
                       (static_cast<size_t>(value) << pos);
    out.table[idx] = f.table[src];
  }
  return out;
}

Factor eliminate_all_but(std::vector<Factor> factors,
                         const std::vector<int>& keep) {
  // Collect the variables to eliminate.
  std::vector<int> elim;
  for (const auto& f : factors)
    for (int v : f.scope)
      if (std::find(keep.begin(), keep.end(), v) == keep.end() &&
          std::find(elim.begin(), elim.end(), v) == elim.end())
        elim.push_back(v);
  std::sort(elim.begin(), elim.end());

  while (!elim.empty()) {
    // Min-fill: for each candidate, count neighbor pairs not already
    // covered by a common factor. Ties break to the smallest index.
    int best = -1;
    long best_fill = -1;
    for (int v : elim) {
      std::vector<int> nbrs;
      for (const auto& f : factors) {
        if (std::find(f.scope.begin(), f.scope.end(), v) == f.scope.end())
          continue;
        for (int w : f.scope)
          if (w != v && std::find(nbrs.begin(), nbrs.end(), w) == nbrs.end())
            nbrs.push_back(w);
      }
      long fill = 0;
      for (size_t i = 0; i < nbrs.size(); ++i)
        for (size_t j = i + 1; j < nbrs.size(); ++j) {
          bool covered = false;
          for (const auto& f : factors) {
            if (std::find(f.scope.begin(), f.scope.end(), nbrs[i]) !=
                    f.scope.end() &&
                std::find(f.scope.begin(), f.scope.end(), nbrs[j]) !=
                    f.scope.end()) {
              covered = true;
              break;
            }
          }
          if (!covered) ++fill;
        }
      if (best == -1 || fill < best_fill) {
        best = v;
        best_fill = fill;
      }
    }

    // Multiply all factors mentioning `best`, sum it out, put the result
    // back. Product order is the factors' position order, which is fixed
    // by construction.
    Factor prod = Factor::constant(1.0);
    std::vector<Factor> rest;
    for (auto& f : factors) {
      if (std::find(f.scope.begin(), f.scope.end(), best) != f.scope.end())
        prod = multiply(prod, f);
      else
        rest.push_back(std::move(f));
    }
    rest.push_back(sum_out(prod, best));
    factors = std::move(rest);
    elim.erase(std::find(elim.begin(), elim.end(), best));
  }

  Factor result = Factor::constant(1.0);
  for (const auto& f : factors) result = multiply(result, f);
  return result;
}

}  // namespace edml
