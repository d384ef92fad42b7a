#include "lbbn/model.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <queue>
#include <set>
#include <sstream>

#include "lbbn/errors.hpp"

namespace lbbn {

std::optional<std::size_t> StateSpace::index_of(std::string_view label) const {
  for (std::size_t i = 0; i < labels_.size(); ++i)
    if (labels_[i] == label) return i;
  return std::nullopt;
}

bool StateSpace::has_ignorance_state() const noexcept {
  return !labels_.empty() && labels_.back() == kIgnoranceLabel;
}

StateSpace StateSpace::with_ignorance_state() const {
  auto labels = labels_;
  labels.emplace_back(kIgnoranceLabel);
  return StateSpace(std::move(labels));
}

Network::Network(std::vector<NodeSpec> nodes, std::vector<Cpt> cpts)
    : nodes_(std::move(nodes)), cpts_(std::move(cpts)) {
  if (nodes_.size() != cpts_.size())
    throw InvalidArgument("network needs exactly one CPT per node");
  for (std::size_t i = 0; i < nodes_.size(); ++i) index_.emplace(nodes_[i].id, i);
  parents_.resize(nodes_.size());
  children_.resize(nodes_.size());
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    for (const auto& p : nodes_[i].parents) {
      auto it = index_.find(p);
      if (it == index_.end()) continue;
      parents_[i].push_back(it->second);
      children_[it->second].push_back(i);
    }
  }
}

std::optional<std::size_t> Network::find(std::string_view id) const {
  auto it = index_.find(std::string(id));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t Network::index_of(std::string_view id) const {
  if (auto i = find(id)) return *i;
  throw UnknownNodeError(std::string(id));
}

std::size_t Network::row_count(std::size_t i) const {
  std::size_t n = 1;
  for (auto p : parents_.at(i)) n *= cardinality(p);
  return n;
}

std::size_t Network::row_index(std::size_t i, std::span<const std::size_t> parent_states) const {
  const auto& ps = parents_.at(i);
  if (parent_states.size() != ps.size())
    throw InvalidArgument("parent assignment size mismatch for node " + nodes_[i].id);
  std::size_t row = 0;
  for (std::size_t k = 0; k < ps.size(); ++k) {
    if (parent_states[k] >= cardinality(ps[k]))
      throw InvalidArgument("parent state out of range for node " + nodes_[i].id);
    row = row * cardinality(ps[k]) + parent_states[k];
  }
  return row;
}

std::vector<std::size_t> Network::parent_states(std::size_t i, std::size_t row) const {
  const auto& ps = parents_.at(i);
  std::vector<std::size_t> out(ps.size());
  for (std::size_t k = ps.size(); k-- > 0;) {
    out[k] = row % cardinality(ps[k]);
    row /= cardinality(ps[k]);
  }
  return out;
}

std::string ValidationReport::to_string() const {
  std::ostringstream os;
  for (std::size_t i = 0; i < violations.size(); ++i) {
    const auto& v = violations[i];
    if (i) os << "; ";
    if (!v.node.empty()) {
      os << v.node;
      if (v.row) os << " row " << *v.row;
      os << ": ";
    }
    os << v.message;
  }
  return os.str();
}

namespace {

std::string fmt_num(double x) {
  std::ostringstream os;
  os.precision(12);
  os << x;
  return os.str();
}

enum class RowRule { kLowerBound, kDistribution };

ValidationReport validate_impl(const Network& net, RowRule rule) {
  ValidationReport report;
  auto add = [&](const std::string& node, std::optional<std::size_t> row, std::string msg) {
    report.violations.push_back({node, row, std::move(msg)});
  };

  std::set<std::string> seen;
  for (const auto& n : net.nodes()) {
    if (n.id.empty()) add(n.id, std::nullopt, "empty node id");
    if (!seen.insert(n.id).second) add(n.id, std::nullopt, "duplicate node id");
  }

  bool shape_ok = true;
  for (std::size_t i = 0; i < net.size(); ++i) {
    const auto& n = net.node(i);
    const auto& labels = n.states.labels();
    if (labels.size() < 2) add(n.id, std::nullopt, "state space needs at least 2 states");
    std::set<std::string> lab;
    for (std::size_t k = 0; k < labels.size(); ++k) {
      if (!lab.insert(labels[k]).second) add(n.id, std::nullopt, "duplicate state label " + labels[k]);
      if (labels[k] == kIgnoranceLabel) {
        if (rule == RowRule::kLowerBound)
          add(n.id, std::nullopt, "state label N is reserved");
        else if (k + 1 != labels.size())
          add(n.id, std::nullopt, "state N must be the last state");
      }
    }
    std::set<std::string> ps;
    for (const auto& p : n.parents) {
      if (!net.find(p)) {
        add(n.id, std::nullopt, "unknown parent " + p);
        shape_ok = false;
      }
      if (!ps.insert(p).second) add(n.id, std::nullopt, "duplicate parent " + p);
      if (p == n.id) add(n.id, std::nullopt, "node is its own parent");
    }
  }

  if (auto cyc = find_cycle(net)) {
    std::string w;
    for (std::size_t k = 0; k < cyc->size(); ++k) w += (k ? "," : "") + (*cyc)[k];
    add("", std::nullopt, "cycle detected: " + w);
  }

  if (!shape_ok) return report;

  for (std::size_t i = 0; i < net.size(); ++i) {
    const auto& n = net.node(i);
    const auto& rows = net.cpt(i).rows;
    const std::size_t expected = net.row_count(i);
    if (rows.size() != expected) {
      add(n.id, std::nullopt,
          "row count " + std::to_string(rows.size()) + " != " + std::to_string(expected));
    }
    for (std::size_t r = 0; r < rows.size(); ++r) {
      const auto& row = rows[r];
      if (row.size() != n.states.size()) {
        add(n.id, r,
            "row length " + std::to_string(row.size()) + " != " + std::to_string(n.states.size()));
        continue;
      }
      double sum = 0.0;
      for (std::size_t k = 0; k < row.size(); ++k) {
        const double v = row[k];
        if (!std::isfinite(v) || v < 0.0 || v > 1.0)
          add(n.id, r, "entry " + std::to_string(k) + " = " + fmt_num(v) + " outside [0, 1]");
        sum += v;
      }
      if (rule == RowRule::kLowerBound) {
        if (sum > 1.0 + kSumTolerance) add(n.id, r, "row sum " + fmt_num(sum) + " > 1");
      } else if (std::abs(sum - 1.0) > kSumTolerance) {
        add(n.id, r, "row sum " + fmt_num(sum) + " != 1");
      }
    }
  }
  return report;
}

}  // namespace

ValidationReport validate(const LowerBoundNetwork& net) {
  return validate_impl(net, RowRule::kLowerBound);
}

ValidationReport validate(const StandardNetwork& net) {
  return validate_impl(net, RowRule::kDistribution);
}

void require_valid(const LowerBoundNetwork& net) {
  auto r = validate(net);
  if (!r.ok()) throw ValidationError(r.to_string());
}

void require_valid(const StandardNetwork& net) {
  auto r = validate(net);
  if (!r.ok()) throw ValidationError(r.to_string());
}

void check_evidence(const Network& net, const Evidence& evidence) {
  for (const auto& [id, label] : evidence) {
    const auto i = net.index_of(id);
    if (label == kIgnoranceLabel)
      throw InvalidArgument("evidence on " + id + " may not use the ignorance state");
    const auto& states = net.node(i).states;
    auto k = states.index_of(label);
    if (!k || *k >= states.concrete_size())
      throw InvalidArgument("evidence state " + label + " not in state space of " + id);
  }
}

std::optional<std::vector<std::string>> find_cycle(const Network& net) {
  const std::size_t n = net.size();
  // Visit roots of the search in id order so the witness is deterministic.
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](auto a, auto b) { return net.node(a).id < net.node(b).id; });

  enum Mark : unsigned char { kWhite, kGrey, kBlack };
  std::vector<Mark> mark(n, kWhite);
  std::vector<std::size_t> stack;
  std::optional<std::vector<std::size_t>> found;

  std::function<void(std::size_t)> dfs = [&](std::size_t u) {
    mark[u] = kGrey;
    stack.push_back(u);
    auto kids = net.children(u);
    std::sort(kids.begin(), kids.end(),
              [&](auto a, auto b) { return net.node(a).id < net.node(b).id; });
    for (auto v : kids) {
      if (found) return;
      if (mark[v] == kGrey) {
        auto it = std::find(stack.begin(), stack.end(), v);
        found = std::vector<std::size_t>(it, stack.end());
        return;
      }
      if (mark[v] == kWhite) dfs(v);
    }
    stack.pop_back();
    mark[u] = kBlack;
  };
  for (auto i : order) {
    if (found) break;
    if (mark[i] == kWhite) dfs(i);
  }
  if (!found) return std::nullopt;

  auto& cyc = *found;
  auto smallest = std::min_element(cyc.begin(), cyc.end(), [&](auto a, auto b) {
    return net.node(a).id < net.node(b).id;
  });
  std::rotate(cyc.begin(), smallest, cyc.end());
  std::vector<std::string> ids;
  for (auto i : cyc) ids.push_back(net.node(i).id);
  return ids;
}

std::vector<std::size_t> topo_indices(const Network& net) {
  const std::size_t n = net.size();
  std::vector<std::size_t> indegree(n);
  for (std::size_t i = 0; i < n; ++i) indegree[i] = net.parents(i).size();
  auto later = [&](std::size_t a, std::size_t b) { return net.node(a).id > net.node(b).id; };
  std::priority_queue<std::size_t, std::vector<std::size_t>, decltype(later)> ready(later);
  for (std::size_t i = 0; i < n; ++i)
    if (indegree[i] == 0) ready.push(i);
  std::vector<std::size_t> out;
  out.reserve(n);
  while (!ready.empty()) {
    auto u = ready.top();
    ready.pop();
    out.push_back(u);
    for (auto v : net.children(u))
      if (--indegree[v] == 0) ready.push(v);
  }
  if (out.size() != n) {
    std::string w;
    if (auto cyc = find_cycle(net))
      for (std::size_t k = 0; k < cyc->size(); ++k) w += (k ? "," : "") + (*cyc)[k];
    throw StructuralError("cycle detected: " + w);
  }
  return out;
}

std::vector<std::string> topo_order(const Network& net) {
  std::vector<std::string> ids;
  for (auto i : topo_indices(net)) ids.push_back(net.node(i).id);
  return ids;
}

std::vector<bool> ancestor_closure(const Network& net, std::span<const std::size_t> seeds) {
  std::vector<bool> keep(net.size(), false);
  std::vector<std::size_t> todo(seeds.begin(), seeds.end());
  while (!todo.empty()) {
    auto u = todo.back();
    todo.pop_back();
    if (keep[u]) continue;
    keep[u] = true;
    for (auto p : net.parents(u))
      if (!keep[p]) todo.push_back(p);
  }
  return keep;
}

std::vector<bool> strict_ancestors(const Network& net, std::size_t node) {
  std::vector<std::size_t> seeds(net.parents(node).begin(), net.parents(node).end());
  return ancestor_closure(net, seeds);
}

namespace detail {

std::vector<bool> relevant_mask(const Network& net, std::string_view query, const Evidence& evidence) {
  std::vector<std::size_t> seeds{net.index_of(query)};
  for (const auto& [id, label] : evidence) seeds.push_back(net.index_of(id));
  return ancestor_closure(net, seeds);
}

Network prune_to(const Network& net, const std::vector<bool>& keep) {
  std::vector<NodeSpec> nodes;
  std::vector<Cpt> cpts;
  for (std::size_t i = 0; i < net.size(); ++i) {
    if (!keep[i]) continue;
    nodes.push_back(net.node(i));
    cpts.push_back(net.cpt(i));
  }
  return Network(std::move(nodes), std::move(cpts));
}

}  // namespace detail

LowerBoundNetwork renormalize_rows(const LowerBoundNetwork& net) {
  std::vector<Cpt> cpts = net.cpts();
  for (auto& cpt : cpts) {
    for (auto& row : cpt.rows) {
      double sum = 0.0;
      for (double v : row) sum += v;
      if (sum > 1.0 && sum <= 1.0 + kSumTolerance)
        for (double& v : row) v /= sum;
    }
  }
  return LowerBoundNetwork(net.nodes(), std::move(cpts));
}

}  // namespace lbbn
