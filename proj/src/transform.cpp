#include "lbbn/transform.hpp"

#include <algorithm>
#include <limits>

#include "lbbn/errors.hpp"

namespace lbbn {

const char* to_string(CellRule rule) noexcept {
  switch (rule) {
    case CellRule::kDirectCopy: return "direct-copy";
    case CellRule::kMinOverNParents: return "min-over-N-parents";
    case CellRule::kFreeMass: return "free-mass";
  }
  return "?";
}

MinResult min_over_ignorant_parents(const LowerBoundNetwork& net, std::size_t node,
                                    std::size_t child_state, const PartialAssignment& fixed) {
  if (node >= net.size()) throw InvalidArgument("node index out of range");
  const auto& parents = net.parents(node);
  if (fixed.size() != parents.size())
    throw InvalidArgument("partial assignment size mismatch for node " + net.node(node).id);
  if (child_state >= net.cardinality(node))
    throw InvalidArgument("child state out of range for node " + net.node(node).id);

  std::vector<std::size_t> open;
  std::vector<std::size_t> states(parents.size(), 0);
  for (std::size_t k = 0; k < parents.size(); ++k) {
    if (fixed[k]) {
      if (*fixed[k] >= net.cardinality(parents[k]))
        throw InvalidArgument("parent state out of range for node " + net.node(node).id);
      states[k] = *fixed[k];
    } else {
      open.push_back(k);
    }
  }

  const auto& rows = net.cpt(node).rows;
  MinResult best{std::numeric_limits<double>::infinity(), 0};
  // Odometer over the open positions.
  while (true) {
    const auto row = net.row_index(node, states);
    const double v = rows.at(row).at(child_state);
    if (v < best.value) best = {v, row};
    std::size_t j = open.size();
    while (j > 0) {
      auto k = open[j - 1];
      if (++states[k] < net.cardinality(parents[k])) break;
      states[k] = 0;
      --j;
    }
    if (j == 0) break;
  }
  return best;
}

double min_over_ignorant_parents(const LowerBoundNetwork& net, std::size_t node,
                                 std::size_t child_state, std::span<const std::size_t> fixed_states,
                                 std::span<const std::size_t> ignorant_positions) {
  if (node >= net.size()) throw InvalidArgument("node index out of range");
  const std::size_t p = net.parents(node).size();
  if (fixed_states.size() != p) throw InvalidArgument("parent assignment size mismatch");
  PartialAssignment partial(fixed_states.begin(), fixed_states.end());
  for (auto k : ignorant_positions) {
    if (k >= p) throw InvalidArgument("ignorant position out of range");
    partial[k] = std::nullopt;
  }
  return min_over_ignorant_parents(net, node, child_state, partial).value;
}

LbbnArtifact to_lbbn(const LowerBoundNetwork& net) {
  require_valid(net);

  std::vector<NodeSpec> nodes;
  nodes.reserve(net.size());
  for (const auto& n : net.nodes())
    nodes.push_back({n.id, n.states.with_ignorance_state(), n.parents});

  std::vector<Cpt> cpts(net.size());
  std::vector<CptProvenance> provenance(net.size());

  for (std::size_t i = 0; i < net.size(); ++i) {
    const auto& parents = net.parents(i);
    const std::size_t s = net.cardinality(i);

    // Augmented parent cardinalities; index s_p stands for N.
    std::size_t rows = 1;
    for (auto p : parents) rows *= net.cardinality(p) + 1;

    auto& out_rows = cpts[i].rows;
    auto& out_prov = provenance[i];
    out_rows.assign(rows, std::vector<double>(s + 1, 0.0));
    out_prov.assign(rows, std::vector<CellProvenance>(s + 1));

    PartialAssignment partial(parents.size());
    for (std::size_t r = 0; r < rows; ++r) {
      std::size_t rem = r;
      bool any_open = false;
      for (std::size_t k = parents.size(); k-- > 0;) {
        const std::size_t base = net.cardinality(parents[k]) + 1;
        const std::size_t st = rem % base;
        rem /= base;
        if (st + 1 == base) {
          partial[k] = std::nullopt;
          any_open = true;
        } else {
          partial[k] = st;
        }
      }

      auto& row = out_rows[r];
      double concrete = 0.0;
      for (std::size_t k = 0; k < s; ++k) {
        const auto m = min_over_ignorant_parents(net, i, k, partial);
        row[k] = m.value;
        out_prov[r][k] = {any_open ? CellRule::kMinOverNParents : CellRule::kDirectCopy, m.row};
        concrete += m.value;
      }
      double free_mass = 1.0 - concrete;
      if (free_mass < 0.0) {
        // Sum in (1, 1 + tolerance]: validation admitted it as rounding.
        free_mass = 0.0;
        for (std::size_t k = 0; k < s; ++k) row[k] /= concrete;
      }
      row[s] = free_mass;
      out_prov[r][s] = {CellRule::kFreeMass, std::nullopt};
    }
  }
  return {StandardNetwork(std::move(nodes), std::move(cpts)), std::move(provenance)};
}

}  // namespace lbbn
