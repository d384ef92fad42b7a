#pragma once

#include <cstddef>
#include <vector>

#include "lbbn/model.hpp"

namespace lbbn {

// Dense nonnegative table over an ordered scope of network node indices,
// mixed-radix with the first scope variable most significant.
struct Factor {
  std::vector<std::size_t> scope;
  std::vector<std::size_t> cards;
  std::vector<double> table;

  // A scalar factor (empty scope) of the given value.
  static Factor constant(double value) { return {{}, {}, {value}}; }

  bool contains(std::size_t var) const;
  double total() const;
};

// Factor over (parents..., node) holding the node's CPT.
Factor cpt_factor(const Network& net, std::size_t node);

Factor multiply(const Factor& a, const Factor& b);
Factor sum_out(const Factor& f, std::size_t var);
// Slice var at the given state; var leaves the scope.
Factor reduce(const Factor& f, std::size_t var, std::size_t state);

}  // namespace lbbn
