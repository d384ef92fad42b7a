#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lbbn/model.hpp"
#include "lbbn/transform.hpp"

namespace lbbn {

// Posterior over a node's full state space (including N on an LBBN node).
struct Distribution {
  std::string node;
  std::vector<std::string> labels;
  std::vector<double> p;
};

struct PrognosticCheck {
  bool prognostic = false;
  std::string violator;     // first violating node, empty when prognostic
  std::string explanation;
};

// True iff every evidence node is an ancestor of the query and every parent
// of an evidence node is observed. Throws UnknownNodeError.
PrognosticCheck is_prognostic(const Network& net, std::string_view query, const Evidence& evidence);

// Exact P(query | evidence) by variable elimination over the barren-pruned
// network, min-degree order. Throws InconsistentEvidence when the evidence
// has probability zero.
Distribution eliminate(const StandardNetwork& net, std::string_view query, const Evidence& evidence);

// Same, with an explicit elimination order that must list every node other
// than the query and the evidence exactly once. No pruning is applied.
Distribution eliminate(const StandardNetwork& net, std::string_view query, const Evidence& evidence,
                       std::span<const std::string> order);

// Order the min-degree heuristic picks for this query (pruned network).
std::vector<std::string> elimination_order(const StandardNetwork& net, std::string_view query,
                                           const Evidence& evidence);

struct BoundedMarginal {
  std::string node;
  std::vector<std::string> labels;  // original states, N excluded
  std::vector<double> lower;
  std::vector<double> induced_upper;
  double ignorance = 0.0;
  // False only for queries forced through outside the prognostic regime.
  bool guaranteed = true;
};

struct BoundsOptions {
  // Compute non-prognostic queries anyway; the result is marked unguaranteed.
  bool allow_non_prognostic = false;
};

// Approximate lower bounds from the transformed network plus the induced
// upper bounds. Throws NonPrognosticQuery unless allowed by the options.
BoundedMarginal lbbn_bounds(const LowerBoundNetwork& net, std::string_view query,
                            const Evidence& evidence, BoundsOptions options = {});

// Bounds from a distribution over S + {N}.
BoundedMarginal bounds_from_lbbn_marginal(const Distribution& d);

}  // namespace lbbn
