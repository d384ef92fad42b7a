#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "lbbn/model.hpp"

namespace lbbn {

// Which construction rule produced a cell of the transformed CPT.
enum class CellRule {
  kDirectCopy,       // no parent is N: copy of the lower bound
  kMinOverNParents,  // some parents are N: min over their concrete states
  kFreeMass,         // the N column: one minus the concrete entries
};

const char* to_string(CellRule rule) noexcept;

struct CellProvenance {
  CellRule rule = CellRule::kDirectCopy;
  // Row of the lower-bound CPT the value was taken from; empty for free mass.
  std::optional<std::size_t> source_row;
};

// provenance[node][row][state], aligned with network.cpt(node).rows.
using CptProvenance = std::vector<std::vector<CellProvenance>>;

struct LbbnArtifact {
  StandardNetwork network;
  std::vector<CptProvenance> provenance;
};

// Parent assignment in which some positions are left open ("ignorant").
// fixed[k] holds the state for position k, or nullopt when k is ignorant.
using PartialAssignment = std::vector<std::optional<std::size_t>>;

struct MinResult {
  double value;
  std::size_t row;  // attaining row of the lower-bound CPT
};

// Minimum lower bound of child_state over every concrete completion of the
// open positions. Throws InvalidArgument on out-of-range indices.
MinResult min_over_ignorant_parents(const LowerBoundNetwork& net, std::size_t node,
                                    std::size_t child_state, const PartialAssignment& fixed);

// Convenience form keyed by an explicit set of ignorant parent positions.
double min_over_ignorant_parents(const LowerBoundNetwork& net, std::size_t node,
                                 std::size_t child_state, std::span<const std::size_t> fixed_states,
                                 std::span<const std::size_t> ignorant_positions);

// Builds the standard network over S_i + {N}. Throws ValidationError when the
// input is invalid.
LbbnArtifact to_lbbn(const LowerBoundNetwork& net);

}  // namespace lbbn
