#include "lbbn/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <sstream>

#include "lbbn/errors.hpp"
#include "lbbn/io.hpp"

namespace lbbn::bench {

double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

std::uint64_t uniform_index(Rng& rng, std::uint64_t n) {
  if (n == 0) throw InvalidArgument("uniform_index over an empty range");
  const std::uint64_t limit = Rng::max() - Rng::max() % n;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % n;
}

std::vector<double> sample_simplex(Rng& rng, std::size_t s) {
  std::vector<double> p(s);
  double sum = 0.0;
  for (auto& v : p) {
    v = -std::log1p(-uniform01(rng));
    sum += v;
  }
  for (auto& v : p) v /= sum;
  return p;
}

std::vector<double> componentwise_min(const std::vector<std::vector<double>>& points) {
  if (points.empty()) throw InvalidArgument("componentwise_min of no points");
  std::vector<double> out = points.front();
  for (const auto& p : points) {
    if (p.size() != out.size()) throw InvalidArgument("componentwise_min: dimension mismatch");
    for (std::size_t k = 0; k < p.size(); ++k) out[k] = std::min(out[k], p[k]);
  }
  return out;
}

const char* to_string(Structure s) noexcept {
  switch (s) {
    case Structure::kTree: return "tree";
    case Structure::kPolytree: return "polytree";
    case Structure::kMulti: return "multi";
  }
  return "?";
}

Structure parse_structure(const std::string& text) {
  if (text == "tree") return Structure::kTree;
  if (text == "polytree") return Structure::kPolytree;
  if (text == "multi") return Structure::kMulti;
  throw InvalidArgument("unknown structure '" + text + "' (tree|polytree|multi)");
}

const char* to_string(QueryPolicy p) noexcept {
  return p == QueryPolicy::kAllNodes ? "all-nodes" : "sinks-only";
}

QueryPolicy parse_query_policy(const std::string& text) {
  if (text == "all-nodes") return QueryPolicy::kAllNodes;
  if (text == "sinks-only") return QueryPolicy::kSinksOnly;
  throw InvalidArgument("unknown query policy '" + text + "' (all-nodes|sinks-only)");
}

std::size_t GenConfig::edge_count() const {
  if (!edge_density) {
    if (structure == Structure::kMulti) return static_cast<std::size_t>(std::llround(1.2 * node_count));
    return node_count == 0 ? 0 : node_count - 1;
  }
  return static_cast<std::size_t>(std::llround(*edge_density * static_cast<double>(node_count)));
}

void check_config(const GenConfig& cfg) {
  if (cfg.node_count < 1) throw InvalidArgument("node_count must be >= 1");
  if (cfg.states_per_node < 2) throw InvalidArgument("states_per_node must be >= 2");
  if (cfg.vertex_count_for_lb < 1) throw InvalidArgument("vertex_count_for_lb must be >= 1");
  if (cfg.edge_density && !(*cfg.edge_density >= 0.0))
    throw InvalidArgument("edge density must be >= 0");
  const std::size_t n = cfg.node_count;
  const std::size_t e = cfg.edge_count();
  if (cfg.structure != Structure::kMulti && e > n - 1) {
    throw InvalidArgument(std::string("a ") + to_string(cfg.structure) + " on " + std::to_string(n) +
                          " nodes has at most " + std::to_string(n - 1) + " edges, density asks for " +
                          std::to_string(e));
  }
  if (e > n * (n - 1) / 2)
    throw InvalidArgument("density asks for " + std::to_string(e) + " edges, a DAG on " + std::to_string(n) +
                          " nodes has at most " + std::to_string(n * (n - 1) / 2));
  std::size_t capacity = n * (n - 1) / 2;
  if (cfg.structure == Structure::kTree) capacity = n - 1;
  if (cfg.max_parents) {
    std::size_t cap_sum = 0;
    for (std::size_t k = 0; k < n; ++k) cap_sum += std::min(k, *cfg.max_parents);
    capacity = std::min(capacity, cap_sum);
  }
  if (e > capacity)
    throw InvalidArgument("cannot place " + std::to_string(e) + " edges under the parent limit");
}

namespace {

template <class T>
void shuffle(std::vector<T>& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[uniform_index(rng, i)]);
}

std::string node_name(std::size_t i, std::size_t n) {
  std::size_t width = 2;
  for (std::size_t m = n - 1; m >= 100; m /= 10) ++width;
  std::string digits = std::to_string(i);
  return "X" + std::string(width > digits.size() ? width - digits.size() : 0, '0') + digits;
}

struct UnionFind {
  std::vector<std::size_t> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  bool unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent[a] = b;
    return true;
  }
};

// parents[j] = indices of j's parents; edges go from earlier to later
// positions of a random permutation.
std::vector<std::vector<std::size_t>> sample_edges(const GenConfig& cfg, Rng& rng) {
  const std::size_t n = cfg.node_count;
  const std::size_t e = cfg.edge_count();
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  shuffle(perm, rng);
  std::vector<std::vector<std::size_t>> parents(n);
  const std::size_t limit = cfg.max_parents.value_or(n);

  if (cfg.structure == Structure::kTree) {
    std::vector<std::size_t> positions(n > 0 ? n - 1 : 0);
    std::iota(positions.begin(), positions.end(), 1);
    shuffle(positions, rng);
    for (std::size_t k = 0; k < e; ++k) {
      const auto pos = positions[k];
      parents[perm[pos]].push_back(perm[uniform_index(rng, pos)]);
    }
    return parents;
  }

  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a + 1; b < n; ++b) pairs.emplace_back(a, b);
  shuffle(pairs, rng);
  UnionFind uf(n);
  std::size_t placed = 0;
  for (const auto& [a, b] : pairs) {
    if (placed == e) break;
    const auto from = perm[a], to = perm[b];
    if (parents[to].size() >= limit) continue;
    if (cfg.structure == Structure::kPolytree && !uf.unite(from, to)) continue;
    parents[to].push_back(from);
    ++placed;
  }
  if (placed != e) throw InvalidArgument("could not place " + std::to_string(e) + " edges");
  return parents;
}

}  // namespace

LowerBoundNetwork gen_network(const GenConfig& cfg) {
  check_config(cfg);
  Rng rng(cfg.seed);
  const std::size_t n = cfg.node_count;
  auto parent_idx = sample_edges(cfg, rng);

  std::vector<std::string> labels;
  for (std::size_t k = 0; k < cfg.states_per_node; ++k) labels.push_back("s" + std::to_string(k));

  std::vector<NodeSpec> nodes;
  std::vector<Cpt> cpts;
  for (std::size_t i = 0; i < n; ++i) {
    auto& ps = parent_idx[i];
    std::sort(ps.begin(), ps.end());
    NodeSpec spec{node_name(i, n), StateSpace(labels), {}};
    for (auto p : ps) spec.parents.push_back(node_name(p, n));
    std::size_t rows = 1;
    for (std::size_t k = 0; k < ps.size(); ++k) rows *= cfg.states_per_node;
    Cpt cpt;
    for (std::size_t r = 0; r < rows; ++r) {
      std::vector<std::vector<double>> pts;
      for (std::size_t v = 0; v < cfg.vertex_count_for_lb; ++v) pts.push_back(sample_simplex(rng, cfg.states_per_node));
      cpt.rows.push_back(componentwise_min(pts));
    }
    nodes.push_back(std::move(spec));
    cpts.push_back(std::move(cpt));
  }
  return LowerBoundNetwork(std::move(nodes), std::move(cpts));
}

Evidence sample_prognostic_evidence(const Network& net, std::string_view query, Rng& rng) {
  const auto q = net.index_of(query);
  const auto anc = strict_ancestors(net, q);
  std::vector<bool> observed(net.size(), false);
  Evidence ev;
  for (auto i : topo_indices(net)) {
    if (!anc[i]) continue;
    bool parents_observed = true;
    for (auto p : net.parents(i)) parents_observed = parents_observed && observed[p];
    if (!parents_observed || uniform_index(rng, 2) == 0) continue;
    observed[i] = true;
    const auto& states = net.node(i).states;
    ev[net.node(i).id] = states.label(uniform_index(rng, states.concrete_size()));
  }
  return ev;
}

double mse(const std::vector<BoundedMarginal>& approx, const std::vector<ExactBounds>& exact) {
  if (approx.size() != exact.size()) throw InvalidArgument("mse: node count mismatch");
  double sum = 0.0;
  std::size_t q = 0;
  for (std::size_t i = 0; i < approx.size(); ++i) {
    const auto& a = approx[i];
    const auto& e = exact[i];
    if (a.node != e.node || a.lower.size() != e.exact_lower.size() || a.induced_upper.size() != e.exact_upper.size())
      throw InvalidArgument("mse: shape mismatch at node " + a.node);
    for (std::size_t x = 0; x < a.lower.size(); ++x) {
      const double dl = a.lower[x] - e.exact_lower[x];
      const double du = a.induced_upper[x] - e.exact_upper[x];
      sum += dl * dl + du * du;
    }
    q += 2 * a.lower.size();
  }
  if (q == 0) return 0.0;
  return std::sqrt(sum / static_cast<double>(q));
}

std::uint64_t instance_seed(std::uint64_t base, std::size_t index) {
  // splitmix64 finalizer over (base, index)
  std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (static_cast<std::uint64_t>(index) + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

InstanceRecord run_instance(const GenConfig& base, const ExperimentOptions& options, std::size_t index) {
  InstanceRecord rec;
  rec.index = index;
  rec.seed = instance_seed(base.seed, index);
  GenConfig cfg = base;
  cfg.seed = rec.seed;
  const auto net = gen_network(cfg);
  Rng ev_rng(instance_seed(rec.seed, 0xe71d));

  std::vector<BoundedMarginal> approx;
  std::vector<ExactBounds> exact;
  for (std::size_t i = 0; i < net.size(); ++i) {
    if (options.policy == QueryPolicy::kSinksOnly && !net.children(i).empty()) continue;
    const auto& id = net.node(i).id;
    const Evidence ev = options.with_evidence ? sample_prognostic_evidence(net, id, ev_rng) : Evidence{};

    auto t0 = Clock::now();
    approx.push_back(lbbn_bounds(net, id, ev));
    rec.lbbn_ms += ms_since(t0);

    t0 = Clock::now();
    try {
      exact.push_back(exact_bounds(net, id, ev, {options.oracle_cap}));
      rec.combinations = std::max(rec.combinations, exact.back().combinations);
    } catch (const OracleInfeasible& e) {
      rec.feasible = false;
      rec.infeasible_reason = e.what();
      rec.combinations = std::max(rec.combinations, e.combinations());
    }
    rec.oracle_ms += ms_since(t0);
    if (!rec.feasible) break;

    const auto& a = approx.back();
    const auto& x = exact.back();
    NodeRecord nr{id, ev, a.labels, a.lower, a.induced_upper, x.exact_lower, x.exact_upper};
    for (std::size_t k = 0; k < a.lower.size(); ++k) {
      rec.max_violation = std::max(rec.max_violation, a.lower[k] - x.exact_lower[k]);
      rec.max_violation = std::max(rec.max_violation, x.exact_upper[k] - a.induced_upper[k]);
    }
    rec.nodes.push_back(std::move(nr));
  }
  if (rec.feasible) {
    rec.mse = mse(approx, exact);
  } else {
    rec.nodes.clear();
    rec.max_violation = 0.0;
  }
  return rec;
}

}  // namespace

ExperimentReport run_experiment(const GenConfig& cfg, const ExperimentOptions& options) {
  check_config(cfg);
  ExperimentReport report{cfg, options, {}, {}};
  auto& agg = report.aggregate;
  double mse_sum = 0.0;
  for (std::size_t i = 0; i < options.instances; ++i) {
    auto rec = run_instance(cfg, options, i);
    ++agg.instances;
    if (rec.feasible) {
      ++agg.feasible;
      mse_sum += rec.mse;
      agg.max_mse = std::max(agg.max_mse, rec.mse);
      agg.max_violation = std::max(agg.max_violation, rec.max_violation);
      if (rec.mse > 0.0) ++agg.positive_mse;
    } else {
      ++agg.infeasible;
    }
    report.instances.push_back(std::move(rec));
  }
  agg.mean_mse = agg.feasible ? mse_sum / static_cast<double>(agg.feasible) : 0.0;
  return report;
}

namespace {

io::Json numbers(const std::vector<double>& v) {
  io::Json a = io::Json::array();
  for (double x : v) a.push_back(io::round_sig(x));
  return a;
}

}  // namespace

std::string report_json(const ExperimentReport& report, bool include_timings) {
  const auto& cfg = report.config;
  io::Json doc;
  doc["generator"] = {{"prng", kRngName}, {"simplex", "normalized-exponential"}, {"lower_bounds", "componentwise-min"}};
  io::Json c = {{"nodes", cfg.node_count},
                {"states", cfg.states_per_node},
                {"structure", to_string(cfg.structure)},
                {"edges", cfg.edge_count()},
                {"vertices", cfg.vertex_count_for_lb},
                {"seed", cfg.seed},
                {"instances", report.options.instances},
                {"queries", to_string(report.options.policy)},
                {"evidence", report.options.with_evidence},
                {"oracle_cap", io::round_sig(report.options.oracle_cap)}};
  c["density"] = cfg.edge_density ? io::Json(io::round_sig(*cfg.edge_density)) : io::Json(nullptr);
  c["max_parents"] = cfg.max_parents ? io::Json(*cfg.max_parents) : io::Json(nullptr);
  doc["config"] = std::move(c);

  const auto& agg = report.aggregate;
  doc["aggregate"] = {{"instances", agg.instances},
                      {"feasible", agg.feasible},
                      {"infeasible", agg.infeasible},
                      {"positive_mse", agg.positive_mse},
                      {"mean_mse", io::round_sig(agg.mean_mse)},
                      {"max_mse", io::round_sig(agg.max_mse)},
                      {"max_violation", io::round_sig(agg.max_violation)}};

  io::Json instances = io::Json::array();
  for (const auto& rec : report.instances) {
    io::Json r = {{"instance", rec.index},
                  {"seed", rec.seed},
                  {"feasible", rec.feasible},
                  {"combinations", io::round_sig(rec.combinations)}};
    if (!rec.feasible) r["reason"] = rec.infeasible_reason;
    r["mse"] = io::round_sig(rec.mse);
    r["max_violation"] = io::round_sig(rec.max_violation);
    if (include_timings) r["timings_ms"] = {{"lbbn", rec.lbbn_ms}, {"oracle", rec.oracle_ms}};
    io::Json nodes = io::Json::array();
    for (const auto& n : rec.nodes) {
      io::Json nj = {{"node", n.node}};
      if (!n.evidence.empty()) nj["evidence"] = n.evidence;
      nj["states"] = n.labels;
      nj["lbbn_lower"] = numbers(n.lbbn_lower);
      nj["lbbn_upper"] = numbers(n.lbbn_upper);
      nj["exact_lower"] = numbers(n.exact_lower);
      nj["exact_upper"] = numbers(n.exact_upper);
      nodes.push_back(std::move(nj));
    }
    r["nodes"] = std::move(nodes);
    instances.push_back(std::move(r));
  }
  doc["instances"] = std::move(instances);
  return doc.dump(2) + "\n";
}

std::string report_csv(const ExperimentReport& report) {
  std::ostringstream os;
  os.precision(io::kOutputDigits);
  os << "instance,node,state,lbbn_lower,lbbn_upper,exact_lower,exact_upper,mse\n";
  for (const auto& rec : report.instances) {
    for (const auto& n : rec.nodes) {
      for (std::size_t k = 0; k < n.labels.size(); ++k) {
        os << rec.index << ',' << n.node << ',' << n.labels[k] << ',' << n.lbbn_lower[k] << ','
           << n.lbbn_upper[k] << ',' << n.exact_lower[k] << ',' << n.exact_upper[k] << ',' << rec.mse << '\n';
      }
    }
  }
  return os.str();
}

}  // namespace lbbn::bench
