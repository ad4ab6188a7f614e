#pragma once

#include <vector>

namespace edml {

// Table over an ordered scope of binary variables. Entry index packs the
// scope values with scope[0] as the least significant bit.
struct Factor {
  std::vector<int> scope;
  std::vector<double> table;

  static Factor constant(double c) { return Factor{{}, {c}}; }
  int scope_size() const { return static_cast<int>(scope.size()); }
};

Factor multiply(const Factor& a, const Factor& b);
Factor sum_out(const Factor& f, int var);
// Fix var to value and drop it from the scope.
Factor restrict_to(const Factor& f, int var, int value);

// Eliminates every variable not in `keep` from the product of `factors`,
// using min-fill ordering with smallest-index tie-breaking. Returns the
// product of whatever remains, with scope ordered ascending.
Factor eliminate_all_but(std::vector<Factor> factors,
                         const std::vector<int>& keep);

}  // namespace edml
