#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace lbbn {

using Rational = boost::multiprecision::cpp_rational;

inline constexpr int kDefaultIdmHyperparameter = 2;

// Expert statements favouring each state, with the IDM hyperparameter d.
struct StatementCounts {
  std::vector<std::uint64_t> counts;
  Rational d = kDefaultIdmHyperparameter;

  std::uint64_t total() const;
};

// Imprecise Dirichlet model bounds, kept exact.
struct IdmBounds {
  std::vector<Rational> lower;
  std::vector<Rational> upper;
  Rational ignorance;  // d / (d + n), the same for every state

  std::vector<double> lower_values() const;
  std::vector<double> upper_values() const;
  double ignorance_value() const;
};

// lower_i = n_i / (d + n), upper_i = (n_i + d) / (d + n). Throws
// InvalidArgument when d <= 0 or there are no states.
IdmBounds idm_bounds(const StatementCounts& counts);

// Parses "2", "1.5" or "3/2" into an exact rational. Throws InvalidArgument.
Rational parse_rational(std::string_view text);

double to_double(const Rational& r);

}  // namespace lbbn
