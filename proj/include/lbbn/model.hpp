#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace lbbn {

// Row-sum tolerance shared by validation, loading and the transform.
inline constexpr double kSumTolerance = 1e-9;

// Label of the appended ignorance state. Reserved in user input.
inline constexpr std::string_view kIgnoranceLabel = "N";

class StateSpace {
 public:
  StateSpace() = default;
  explicit StateSpace(std::vector<std::string> labels) : labels_(std::move(labels)) {}

  std::size_t size() const noexcept { return labels_.size(); }
  const std::string& label(std::size_t i) const { return labels_.at(i); }
  const std::vector<std::string>& labels() const noexcept { return labels_; }
  std::optional<std::size_t> index_of(std::string_view label) const;

  // True when the last label is the ignorance state.
  bool has_ignorance_state() const noexcept;
  // Number of states excluding a trailing ignorance state.
  std::size_t concrete_size() const noexcept {
    return has_ignorance_state() ? size() - 1 : size();
  }
  StateSpace with_ignorance_state() const;

  friend bool operator==(const StateSpace&, const StateSpace&) = default;

 private:
  std::vector<std::string> labels_;
};

struct NodeSpec {
  std::string id;
  StateSpace states;
  // Order is significant: it fixes CPT row indexing.
  std::vector<std::string> parents;

  friend bool operator==(const NodeSpec&, const NodeSpec&) = default;
};

// One row per parent assignment in mixed-radix order, first parent most
// significant. Entry k of a row belongs to state k of the child.
struct Cpt {
  std::vector<std::vector<double>> rows;

  friend bool operator==(const Cpt&, const Cpt&) = default;
};

// Observed node id -> concrete state label.
using Evidence = std::map<std::string, std::string>;

// DAG with one CPT per node. Immutable once built; the two subclasses below
// only differ in how their CPT rows are interpreted.
class Network {
 public:
  Network() = default;
  // cpts[i] belongs to nodes[i]. Throws InvalidArgument when the sizes differ.
  Network(std::vector<NodeSpec> nodes, std::vector<Cpt> cpts);

  std::size_t size() const noexcept { return nodes_.size(); }
  const std::vector<NodeSpec>& nodes() const noexcept { return nodes_; }
  const std::vector<Cpt>& cpts() const noexcept { return cpts_; }
  const NodeSpec& node(std::size_t i) const { return nodes_.at(i); }
  const Cpt& cpt(std::size_t i) const { return cpts_.at(i); }
  const Cpt& cpt(std::string_view id) const { return cpts_[index_of(id)]; }

  std::optional<std::size_t> find(std::string_view id) const;
  // Throws UnknownNodeError.
  std::size_t index_of(std::string_view id) const;

  // Resolved parent indices; unknown parent ids are skipped (validate()
  // reports them).
  const std::vector<std::size_t>& parents(std::size_t i) const { return parents_.at(i); }
  const std::vector<std::size_t>& children(std::size_t i) const { return children_.at(i); }

  std::size_t cardinality(std::size_t i) const { return nodes_[i].states.size(); }
  // Product of parent cardinalities (1 for a root).
  std::size_t row_count(std::size_t i) const;
  std::size_t row_index(std::size_t i, std::span<const std::size_t> parent_states) const;
  std::vector<std::size_t> parent_states(std::size_t i, std::size_t row) const;

  friend bool operator==(const Network& a, const Network& b) {
    return a.nodes_ == b.nodes_ && a.cpts_ == b.cpts_;
  }

 private:
  std::vector<NodeSpec> nodes_;
  std::vector<Cpt> cpts_;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<std::vector<std::size_t>> parents_;
  std::vector<std::vector<std::size_t>> children_;
};

// Rows hold lower bounds and may sum to less than one.
class LowerBoundNetwork : public Network {
 public:
  using Network::Network;
};

// Rows are proper distributions. State spaces may end in the ignorance state.
class StandardNetwork : public Network {
 public:
  using Network::Network;
};

struct Violation {
  std::string node;
  std::optional<std::size_t> row;
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;

  bool ok() const noexcept { return violations.empty(); }
  std::string to_string() const;
};

ValidationReport validate(const LowerBoundNetwork& net);
ValidationReport validate(const StandardNetwork& net);

// Throws ValidationError carrying the report text.
void require_valid(const LowerBoundNetwork& net);
void require_valid(const StandardNetwork& net);

// Throws UnknownNodeError or InvalidArgument.
void check_evidence(const Network& net, const Evidence& evidence);

// Node ids on a directed cycle, starting from the smallest id on it.
std::optional<std::vector<std::string>> find_cycle(const Network& net);

// Parents before children, ties broken by lexicographic id. Throws
// StructuralError naming a cycle witness.
std::vector<std::string> topo_order(const Network& net);
std::vector<std::size_t> topo_indices(const Network& net);

// Indices of the seeds and all their ancestors, as a membership mask.
std::vector<bool> ancestor_closure(const Network& net, std::span<const std::size_t> seeds);

// Strict ancestors of one node (the node itself excluded).
std::vector<bool> strict_ancestors(const Network& net, std::size_t node);

namespace detail {
Network prune_to(const Network& net, const std::vector<bool>& keep);
std::vector<bool> relevant_mask(const Network& net, std::string_view query, const Evidence& evidence);
}  // namespace detail

// Keeps the query, the evidence nodes and their ancestors. Node order of the
// input is preserved.
template <class Net>
Net barren_prune(const Net& net, std::string_view query, const Evidence& evidence) {
  const Network pruned = detail::prune_to(net, detail::relevant_mask(net, query, evidence));
  return Net(pruned.nodes(), pruned.cpts());
}

// Rows whose sum lies in (1, 1 + kSumTolerance] are scaled down to sum to 1.
LowerBoundNetwork renormalize_rows(const LowerBoundNetwork& net);

}  // namespace lbbn
