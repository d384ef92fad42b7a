#include "lbbn/inference.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <set>

#include "lbbn/errors.hpp"
#include "lbbn/factor.hpp"

namespace lbbn {

PrognosticCheck is_prognostic(const Network& net, std::string_view query, const Evidence& evidence) {
  const auto q = net.index_of(query);
  std::vector<bool> observed(net.size(), false);
  for (const auto& [id, label] : evidence) observed[net.index_of(id)] = true;

  PrognosticCheck out;
  if (observed[q]) {
    out.violator = std::string(query);
    out.explanation = "query node " + out.violator + " is observed";
    return out;
  }
  const auto ancestors = strict_ancestors(net, q);
  for (auto i : topo_indices(net)) {
    if (!observed[i]) continue;
    const auto& id = net.node(i).id;
    for (auto p : net.parents(i)) {
      if (!observed[p]) {
        out.violator = id;
        out.explanation = "parent " + net.node(p).id + " of evidence node " + id + " is not observed";
        return out;
      }
    }
    if (!ancestors[i]) {
      out.violator = id;
      out.explanation = "evidence node " + id + " is not an ancestor of " + std::string(query);
      return out;
    }
  }
  out.prognostic = true;
  return out;
}

namespace {

struct EliminationRequest {
  std::size_t query;
  std::map<std::size_t, std::size_t> evidence;  // node -> state
  std::vector<bool> keep;
  // Leave out the CPT factors of evidence nodes. Valid for prognostic
  // evidence, where they reduce to constants that cancel on normalization.
  bool drop_evidence_factors = false;
};

std::map<std::size_t, std::size_t> resolve_evidence(const Network& net, const Evidence& evidence) {
  check_evidence(net, evidence);
  std::map<std::size_t, std::size_t> out;
  for (const auto& [id, label] : evidence) {
    const auto i = net.index_of(id);
    out[i] = *net.node(i).states.index_of(label);
  }
  return out;
}

std::vector<Factor> initial_factors(const Network& net, const EliminationRequest& req) {
  std::vector<Factor> factors;
  for (std::size_t i = 0; i < net.size(); ++i) {
    if (!req.keep[i]) continue;
    if (req.drop_evidence_factors && req.evidence.count(i)) continue;
    Factor f = cpt_factor(net, i);
    for (const auto& [var, state] : req.evidence)
      if (f.contains(var)) f = reduce(f, var, state);
    factors.push_back(std::move(f));
  }
  return factors;
}

std::vector<std::size_t> hidden_vars(const Network& net, const EliminationRequest& req) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < net.size(); ++i)
    if (req.keep[i] && i != req.query && !req.evidence.count(i)) out.push_back(i);
  return out;
}

// Greedy min-degree over the interaction graph of the current factors.
std::vector<std::size_t> min_degree_order(const Network& net, std::vector<std::set<std::size_t>> scopes,
                                          std::vector<std::size_t> hidden) {
  std::vector<std::size_t> order;
  while (!hidden.empty()) {
    std::size_t best = 0;
    std::size_t best_degree = std::numeric_limits<std::size_t>::max();
    for (std::size_t h = 0; h < hidden.size(); ++h) {
      std::set<std::size_t> nb;
      for (const auto& s : scopes)
        if (s.count(hidden[h])) nb.insert(s.begin(), s.end());
      nb.erase(hidden[h]);
      const bool better = nb.size() < best_degree ||
                          (nb.size() == best_degree && net.node(hidden[h]).id < net.node(hidden[best]).id);
      if (better) {
        best = h;
        best_degree = nb.size();
      }
    }
    const auto v = hidden[best];
    std::set<std::size_t> merged;
    std::vector<std::set<std::size_t>> rest;
    for (auto& s : scopes) {
      if (s.count(v))
        merged.insert(s.begin(), s.end());
      else
        rest.push_back(std::move(s));
    }
    merged.erase(v);
    rest.push_back(std::move(merged));
    scopes = std::move(rest);
    order.push_back(v);
    hidden.erase(hidden.begin() + static_cast<std::ptrdiff_t>(best));
  }
  return order;
}

std::vector<std::size_t> heuristic_order(const Network& net, const EliminationRequest& req) {
  std::vector<std::set<std::size_t>> scopes;
  for (const auto& f : initial_factors(net, req)) scopes.emplace_back(f.scope.begin(), f.scope.end());
  return min_degree_order(net, std::move(scopes), hidden_vars(net, req));
}

Distribution run_elimination(const Network& net, const EliminationRequest& req,
                             const std::vector<std::size_t>& order) {
  auto factors = initial_factors(net, req);
  for (auto v : order) {
    Factor prod = Factor::constant(1.0);
    std::vector<Factor> rest;
    for (auto& f : factors) {
      if (f.contains(v))
        prod = multiply(prod, f);
      else
        rest.push_back(std::move(f));
    }
    rest.push_back(sum_out(prod, v));
    factors = std::move(rest);
  }
  Factor result = Factor::constant(1.0);
  for (const auto& f : factors) result = multiply(result, f);

  const auto& node = net.node(req.query);
  if (result.scope.size() != 1 || result.scope[0] != req.query)
    throw InvalidArgument("elimination did not end on the query variable");
  const double total = result.total();
  if (!(total > 0.0))
    throw InconsistentEvidence("evidence has probability zero for query " + node.id);

  Distribution d{node.id, node.states.labels(), std::move(result.table)};
  for (double& x : d.p) x /= total;
  return d;
}

EliminationRequest make_request(const Network& net, std::string_view query, const Evidence& evidence) {
  EliminationRequest req;
  req.query = net.index_of(query);
  req.evidence = resolve_evidence(net, evidence);
  if (req.evidence.count(req.query))
    throw InvalidArgument("query node " + std::string(query) + " is observed");
  std::vector<std::size_t> seeds{req.query};
  for (const auto& [v, s] : req.evidence) seeds.push_back(v);
  req.keep = ancestor_closure(net, seeds);
  return req;
}

Distribution eliminate_impl(const StandardNetwork& net, std::string_view query, const Evidence& evidence,
                            bool drop_evidence_factors) {
  auto req = make_request(net, query, evidence);
  req.drop_evidence_factors = drop_evidence_factors;
  return run_elimination(net, req, heuristic_order(net, req));
}

}  // namespace

Distribution eliminate(const StandardNetwork& net, std::string_view query, const Evidence& evidence) {
  return eliminate_impl(net, query, evidence, false);
}

Distribution eliminate(const StandardNetwork& net, std::string_view query, const Evidence& evidence,
                       std::span<const std::string> order) {
  auto req = make_request(net, query, evidence);
  req.keep.assign(net.size(), true);
  std::vector<std::size_t> idx;
  for (const auto& id : order) idx.push_back(net.index_of(id));
  auto expected = hidden_vars(net, req);
  auto given = idx;
  std::sort(given.begin(), given.end());
  if (given != expected)
    throw InvalidArgument("elimination order must list every unobserved non-query node exactly once");
  return run_elimination(net, req, idx);
}

std::vector<std::string> elimination_order(const StandardNetwork& net, std::string_view query,
                                           const Evidence& evidence) {
  const auto req = make_request(net, query, evidence);
  std::vector<std::string> out;
  for (auto v : heuristic_order(net, req)) out.push_back(net.node(v).id);
  return out;
}

BoundedMarginal bounds_from_lbbn_marginal(const Distribution& d) {
  if (d.labels.empty() || d.labels.back() != kIgnoranceLabel)
    throw InvalidArgument("distribution of " + d.node + " has no ignorance state");
  BoundedMarginal b;
  b.node = d.node;
  const std::size_t s = d.labels.size() - 1;
  b.labels.assign(d.labels.begin(), d.labels.begin() + static_cast<std::ptrdiff_t>(s));
  b.lower.assign(d.p.begin(), d.p.begin() + static_cast<std::ptrdiff_t>(s));
  b.ignorance = d.p[s];
  double sum = 0.0;
  for (double v : b.lower) sum += v;
  b.induced_upper.resize(s);
  for (std::size_t x = 0; x < s; ++x) b.induced_upper[x] = 1.0 - (sum - b.lower[x]);
  return b;
}

BoundedMarginal lbbn_bounds(const LowerBoundNetwork& net, std::string_view query, const Evidence& evidence,
                            BoundsOptions options) {
  require_valid(net);
  check_evidence(net, evidence);
  const auto check = is_prognostic(net, query, evidence);
  if (!check.prognostic && !options.allow_non_prognostic) throw NonPrognosticQuery(check.explanation);

  // The transform is local to each CPT, so pruning first gives the same
  // transformed CPTs for every node that matters.
  const auto artifact = to_lbbn(barren_prune(net, query, evidence));
  auto d = eliminate_impl(artifact.network, query, evidence, check.prognostic);
  auto b = bounds_from_lbbn_marginal(d);
  b.guaranteed = check.prognostic;
  return b;
}

}  // namespace lbbn
