#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lbbn/model.hpp"

namespace lbbn {

// Rows with less free mass than this have a single distinct vertex.
inline constexpr double kVertexMassFloor = 1e-12;
inline constexpr double kDefaultOracleCap = 1e7;

// Vertices of {p : p >= lower, sum p = 1}: vertex j puts all free mass on
// state j.
struct CredalRowVertices {
  std::vector<double> lower;
  double free_mass = 0.0;

  std::size_t size() const noexcept { return lower.size(); }
  // Number of vertices the enumeration has to visit.
  std::size_t distinct() const noexcept { return free_mass < kVertexMassFloor ? 1 : lower.size(); }
  double value(std::size_t vertex, std::size_t state) const {
    return lower[state] + (vertex == state ? free_mass : 0.0);
  }
  std::vector<double> vertex(std::size_t j) const;
};

CredalRowVertices credal_row_vertices(std::span<const double> lower);

struct RowRef {
  std::string node;
  std::size_t row = 0;
  std::size_t vertices = 1;  // distinct vertices enumerated for this row
};

struct ExactBounds {
  std::string node;
  std::vector<std::string> labels;
  std::vector<double> exact_lower;
  std::vector<double> exact_upper;
  // Rows that take part in the extremisation, and per query state the vertex
  // index chosen for each of them at the attaining combination.
  std::vector<RowRef> rows;
  std::vector<std::vector<std::size_t>> argmin;
  std::vector<std::vector<std::size_t>> argmax;
  // Vertex combinations enumerated (the query's own rows are optimised in
  // closed form and do not multiply this count).
  double combinations = 0.0;
};

struct OracleOptions {
  double cap = kDefaultOracleCap;
};

// Combination count exact_bounds would enumerate for this query.
double oracle_combinations(const LowerBoundNetwork& net, std::string_view query, const Evidence& evidence);

// Exact lower and upper bounds of P(query | evidence) over the credal sets of
// the relevant CPT rows, for prognostic queries. Throws NonPrognosticQuery or
// OracleInfeasible.
ExactBounds exact_bounds(const LowerBoundNetwork& net, std::string_view query, const Evidence& evidence,
                         OracleOptions options = {});

struct ChainBound {
  std::string node;
  std::vector<std::string> labels;
  std::vector<double> lower;
};

// Exact lower bounds of the end node of a binary chain by repeated head-node
// removal. Throws RegimeError outside that regime.
ChainBound node_removal(const LowerBoundNetwork& chain);

}  // namespace lbbn
