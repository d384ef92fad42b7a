#pragma once

// Test-only fixtures and reference computations. Nothing here calls the
// elimination or vertex-enumeration code it is used to check.

#include <cmath>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "lbbn/model.hpp"

namespace lbbn::testing {

inline std::string data_path(const std::string& name) { return std::string(LBBN_DATA_DIR) + "/" + name; }

// The three-node chain E -> F -> G with the lower bounds of the worked
// example.
inline LowerBoundNetwork chain_efg() {
  std::vector<NodeSpec> nodes{
      {"E", StateSpace({"e1", "e2"}), {}},
      {"F", StateSpace({"f1", "f2"}), {"E"}},
      {"G", StateSpace({"g1", "g2"}), {"F"}},
  };
  std::vector<Cpt> cpts{
      {{{0.6, 0.2}}},
      {{{0.4, 0.5}, {0.3, 0.6}}},
      {{{0.7, 0.2}, {0.8, 0.1}}},
  };
  return LowerBoundNetwork(std::move(nodes), std::move(cpts));
}

// Sum of the full joint over every assignment consistent with the evidence,
// by brute-force odometer over all nodes.
inline std::vector<double> joint_marginal(const Network& net, std::size_t query,
                                          const std::map<std::size_t, std::size_t>& evidence) {
  const std::size_t n = net.size();
  std::vector<std::size_t> a(n, 0);
  std::vector<double> out(net.cardinality(query), 0.0);
  while (true) {
    bool consistent = true;
    for (const auto& [v, s] : evidence) consistent = consistent && a[v] == s;
    if (consistent) {
      double p = 1.0;
      for (std::size_t i = 0; i < n && p != 0.0; ++i) {
        std::size_t row = 0;
        for (auto par : net.parents(i)) row = row * net.cardinality(par) + a[par];
        p *= net.cpt(i).rows[row][a[i]];
      }
      out[a[query]] += p;
    }
    std::size_t k = n;
    while (k > 0) {
      if (++a[k - 1] < net.cardinality(k - 1)) break;
      a[k - 1] = 0;
      --k;
    }
    if (k == 0) break;
  }
  double total = 0.0;
  for (double v : out) total += v;
  for (double& v : out) v /= total;
  return out;
}

inline std::vector<double> random_distribution(std::mt19937_64& rng, std::size_t s) {
  std::exponential_distribution<double> ex(1.0);
  std::vector<double> p(s);
  double sum = 0.0;
  for (auto& v : p) sum += (v = ex(rng));
  for (auto& v : p) v /= sum;
  return p;
}

// Random DAG over n nodes with the given state count; edges go from lower to
// higher index with probability edge_p, at most max_parents per node.
inline std::pair<std::vector<NodeSpec>, std::vector<std::vector<std::size_t>>> random_structure(
    std::mt19937_64& rng, std::size_t n, std::size_t states, double edge_p, std::size_t max_parents) {
  std::bernoulli_distribution edge(edge_p);
  std::vector<NodeSpec> nodes;
  std::vector<std::vector<std::size_t>> parents(n);
  std::vector<std::string> labels;
  for (std::size_t k = 0; k < states; ++k) labels.push_back("v" + std::to_string(k));
  for (std::size_t i = 0; i < n; ++i) {
    NodeSpec spec{"N" + std::to_string(10 + i), StateSpace(labels), {}};
    for (std::size_t j = 0; j < i; ++j) {
      if (parents[i].size() < max_parents && edge(rng)) {
        parents[i].push_back(j);
        spec.parents.push_back(nodes[j].id);
      }
    }
    nodes.push_back(std::move(spec));
  }
  return {nodes, parents};
}

inline StandardNetwork random_standard(std::mt19937_64& rng, std::size_t n, std::size_t states, double edge_p,
                                       std::size_t max_parents = 3) {
  auto [nodes, parents] = random_structure(rng, n, states, edge_p, max_parents);
  std::vector<Cpt> cpts;
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t rows = 1;
    for (std::size_t k = 0; k < parents[i].size(); ++k) rows *= states;
    Cpt c;
    for (std::size_t r = 0; r < rows; ++r) c.rows.push_back(random_distribution(rng, states));
    cpts.push_back(std::move(c));
  }
  return StandardNetwork(std::move(nodes), std::move(cpts));
}

// Lower rows: a random distribution scaled by a random factor in (0.5, 1].
inline LowerBoundNetwork random_lower(std::mt19937_64& rng, std::size_t n, std::size_t states, double edge_p,
                                      std::size_t max_parents = 2) {
  auto [nodes, parents] = random_structure(rng, n, states, edge_p, max_parents);
  std::uniform_real_distribution<double> scale(0.5, 1.0);
  std::vector<Cpt> cpts;
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t rows = 1;
    for (std::size_t k = 0; k < parents[i].size(); ++k) rows *= states;
    Cpt c;
    for (std::size_t r = 0; r < rows; ++r) {
      auto p = random_distribution(rng, states);
      const double f = scale(rng);
      for (auto& v : p) v *= f;
      c.rows.push_back(std::move(p));
    }
    cpts.push_back(std::move(c));
  }
  return LowerBoundNetwork(std::move(nodes), std::move(cpts));
}

}  // namespace lbbn::testing
