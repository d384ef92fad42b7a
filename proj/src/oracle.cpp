#include "lbbn/oracle.hpp"

#include <algorithm>
#include <limits>
#include <map>

#include "lbbn/errors.hpp"
#include "lbbn/inference.hpp"

namespace lbbn {

std::vector<double> CredalRowVertices::vertex(std::size_t j) const {
  std::vector<double> v = lower;
  v.at(j) += free_mass;
  return v;
}

CredalRowVertices credal_row_vertices(std::span<const double> lower) {
  CredalRowVertices out;
  out.lower.assign(lower.begin(), lower.end());
  double sum = 0.0;
  for (double v : lower) sum += v;
  out.free_mass = std::max(0.0, 1.0 - sum);
  return out;
}

namespace {

// Rows of one node that the query can reach, with their credal sets.
struct NodeRows {
  std::size_t node = 0;
  std::vector<std::size_t> rows;          // CPT row indices
  std::vector<CredalRowVertices> credal;  // aligned with rows
  std::map<std::size_t, std::size_t> slot_of_row;
};

// One depth-first level: multiply the running table by the CPT of `node`
// under a vertex choice, then sum out variables that are finished.
struct Level {
  NodeRows rows;
  std::size_t card = 0;
  std::size_t in_size = 1;
  std::size_t out_size = 1;
  // Per joint assignment of (in scope, node).
  std::vector<std::size_t> in_index, out_index, slot, state;
};

struct Problem {
  std::vector<Level> levels;
  NodeRows query_rows;
  std::size_t query_card = 0;
  std::vector<std::size_t> final_slot;  // per entry of the last table
  std::size_t final_size = 1;
};

std::vector<std::size_t> strides(const std::vector<std::size_t>& cards) {
  std::vector<std::size_t> st(cards.size(), 1);
  for (std::size_t k = cards.size(); k-- > 1;) st[k - 1] = st[k] * cards[k];
  return st;
}

std::size_t product(const std::vector<std::size_t>& cards) {
  std::size_t n = 1;
  for (auto c : cards) n *= c;
  return n;
}

struct Setup {
  std::size_t query = 0;
  std::map<std::size_t, std::size_t> evidence;
  std::vector<std::size_t> hidden;  // topological order
};

Setup make_setup(const LowerBoundNetwork& net, std::string_view query, const Evidence& evidence) {
  require_valid(net);
  check_evidence(net, evidence);
  const auto check = is_prognostic(net, query, evidence);
  if (!check.prognostic) throw NonPrognosticQuery(check.explanation);

  Setup s;
  s.query = net.index_of(query);
  std::vector<std::size_t> seeds{s.query};
  for (const auto& [id, label] : evidence) {
    const auto i = net.index_of(id);
    s.evidence[i] = *net.node(i).states.index_of(label);
    seeds.push_back(i);
  }
  const auto keep = ancestor_closure(net, seeds);
  for (auto i : topo_indices(net))
    if (keep[i] && i != s.query && !s.evidence.count(i)) s.hidden.push_back(i);
  return s;
}

// Rows of `node` whose evidence parents agree with the observations.
NodeRows collect_rows(const LowerBoundNetwork& net, std::size_t node, const Setup& setup) {
  NodeRows out;
  out.node = node;
  const auto& parents = net.parents(node);
  for (std::size_t r = 0; r < net.row_count(node); ++r) {
    const auto states = net.parent_states(node, r);
    bool consistent = true;
    for (std::size_t k = 0; k < parents.size(); ++k) {
      auto it = setup.evidence.find(parents[k]);
      if (it != setup.evidence.end() && it->second != states[k]) consistent = false;
    }
    if (!consistent) continue;
    out.slot_of_row[r] = out.rows.size();
    out.rows.push_back(r);
    out.credal.push_back(credal_row_vertices(net.cpt(node).rows[r]));
  }
  return out;
}

double count_combinations(const std::vector<NodeRows>& hidden_rows) {
  double n = 1.0;
  for (const auto& nr : hidden_rows)
    for (const auto& c : nr.credal) n *= static_cast<double>(c.distinct());
  return n;
}

// Row slot of `node` for an assignment of `scope` (other parents observed).
std::size_t slot_for(const LowerBoundNetwork& net, const NodeRows& nr, const Setup& setup,
                     const std::vector<std::size_t>& scope, const std::vector<std::size_t>& assignment) {
  const auto& parents = net.parents(nr.node);
  std::vector<std::size_t> ps(parents.size());
  for (std::size_t k = 0; k < parents.size(); ++k) {
    auto ev = setup.evidence.find(parents[k]);
    if (ev != setup.evidence.end()) {
      ps[k] = ev->second;
      continue;
    }
    auto it = std::find(scope.begin(), scope.end(), parents[k]);
    ps[k] = assignment[static_cast<std::size_t>(it - scope.begin())];
  }
  return nr.slot_of_row.at(net.row_index(nr.node, ps));
}

Problem build_problem(const LowerBoundNetwork& net, const Setup& setup, std::vector<NodeRows> hidden_rows) {
  Problem pb;
  std::vector<std::size_t> position(net.size(), std::numeric_limits<std::size_t>::max());
  for (std::size_t l = 0; l < setup.hidden.size(); ++l) position[setup.hidden[l]] = l;

  // A variable stays in the running table until its last hidden child is
  // processed; parents of the query stay to the end.
  auto finished_after = [&](std::size_t var, std::size_t level) {
    for (auto c : net.children(var)) {
      if (c == setup.query) return false;
      if (position[c] != std::numeric_limits<std::size_t>::max() && position[c] > level) return false;
    }
    return true;
  };

  std::vector<std::size_t> scope;
  for (std::size_t l = 0; l < setup.hidden.size(); ++l) {
    const auto v = setup.hidden[l];
    Level lv;
    lv.rows = std::move(hidden_rows[l]);
    lv.card = net.cardinality(v);

    std::vector<std::size_t> joint = scope;
    joint.push_back(v);
    std::vector<std::size_t> cards;
    for (auto u : joint) cards.push_back(net.cardinality(u));
    std::vector<std::size_t> out_scope;
    for (auto u : joint)
      if (!finished_after(u, l)) out_scope.push_back(u);
    std::vector<std::size_t> out_cards;
    for (auto u : out_scope) out_cards.push_back(net.cardinality(u));
    const auto out_st = strides(out_cards);

    lv.in_size = product(std::vector<std::size_t>(cards.begin(), cards.end() - 1));
    lv.out_size = product(out_cards);
    const std::size_t total = product(cards);
    std::vector<std::size_t> a(joint.size(), 0);
    for (std::size_t t = 0; t < total; ++t) {
      std::size_t rem = t;
      for (std::size_t k = joint.size(); k-- > 0;) {
        a[k] = rem % cards[k];
        rem /= cards[k];
      }
      lv.in_index.push_back(t / lv.card);
      std::size_t oi = 0;
      for (std::size_t k = 0; k < out_scope.size(); ++k) {
        auto it = std::find(joint.begin(), joint.end(), out_scope[k]);
        oi += a[static_cast<std::size_t>(it - joint.begin())] * out_st[k];
      }
      lv.out_index.push_back(oi);
      lv.slot.push_back(slot_for(net, lv.rows, setup, joint, a));
      lv.state.push_back(a.back());
    }
    scope = std::move(out_scope);
    pb.levels.push_back(std::move(lv));
  }

  pb.query_rows = collect_rows(net, setup.query, setup);
  pb.query_card = net.cardinality(setup.query);
  std::vector<std::size_t> cards;
  for (auto u : scope) cards.push_back(net.cardinality(u));
  pb.final_size = product(cards);
  std::vector<std::size_t> a(scope.size(), 0);
  for (std::size_t t = 0; t < pb.final_size; ++t) {
    std::size_t rem = t;
    for (std::size_t k = scope.size(); k-- > 0;) {
      a[k] = rem % cards[k];
      rem /= cards[k];
    }
    pb.final_slot.push_back(slot_for(net, pb.query_rows, setup, scope, a));
  }
  return pb;
}

class Search {
 public:
  explicit Search(const Problem& pb) : pb_(pb) {
    std::size_t total_rows = 0;
    for (const auto& lv : pb.levels) {
      offsets_.push_back(total_rows);
      total_rows += lv.rows.rows.size();
    }
    choice_.assign(total_rows, 0);
    lower_.assign(pb.query_card, std::numeric_limits<double>::infinity());
    upper_.assign(pb.query_card, -std::numeric_limits<double>::infinity());
    argmin_.assign(pb.query_card, {});
    argmax_.assign(pb.query_card, {});
    tables_.resize(pb.levels.size() + 1);
    tables_[0].assign(1, 1.0);
    for (std::size_t l = 0; l < pb.levels.size(); ++l) tables_[l + 1].resize(pb.levels[l].out_size);
  }

  void run() { descend(0); }

  std::vector<double> lower_, upper_;
  std::vector<std::vector<std::size_t>> argmin_, argmax_;

 private:
  void descend(std::size_t l) {
    if (l == pb_.levels.size()) {
      leaf();
      return;
    }
    const auto& lv = pb_.levels[l];
    const auto& credal = lv.rows.credal;
    const std::size_t nrows = credal.size();
    std::vector<std::size_t> pick(nrows, 0);
    std::vector<double> dist(nrows * lv.card);
    const auto& in = tables_[l];
    auto& out = tables_[l + 1];
    while (true) {
      for (std::size_t r = 0; r < nrows; ++r) {
        choice_[offsets_[l] + r] = pick[r];
        for (std::size_t x = 0; x < lv.card; ++x) dist[r * lv.card + x] = credal[r].value(pick[r], x);
      }
      std::fill(out.begin(), out.end(), 0.0);
      for (std::size_t t = 0; t < lv.in_index.size(); ++t)
        out[lv.out_index[t]] += in[lv.in_index[t]] * dist[lv.slot[t] * lv.card + lv.state[t]];
      descend(l + 1);

      std::size_t r = nrows;
      while (r > 0) {
        if (++pick[r - 1] < credal[r - 1].distinct()) break;
        pick[r - 1] = 0;
        --r;
      }
      if (r == 0) break;
    }
  }

  void leaf() {
    const auto& table = tables_[pb_.levels.size()];
    const auto& credal = pb_.query_rows.credal;
    for (std::size_t x = 0; x < pb_.query_card; ++x) {
      double lo = 0.0, hi = 0.0;
      for (std::size_t t = 0; t < pb_.final_size; ++t) {
        const auto& c = credal[pb_.final_slot[t]];
        lo += table[t] * c.lower[x];
        hi += table[t] * (c.lower[x] + c.free_mass);
      }
      if (lo < lower_[x]) {
        lower_[x] = lo;
        argmin_[x] = selection(x, false);
      }
      if (hi > upper_[x]) {
        upper_[x] = hi;
        argmax_[x] = selection(x, true);
      }
    }
  }

  // Current hidden-row choice followed by the closed-form choice for the
  // query rows: mass on x for the maximum, on the first other state for the
  // minimum.
  std::vector<std::size_t> selection(std::size_t x, bool maximise) const {
    std::vector<std::size_t> sel = choice_;
    for (const auto& c : pb_.query_rows.credal) {
      if (c.distinct() == 1)
        sel.push_back(0);
      else
        sel.push_back(maximise ? x : (x == 0 ? 1 : 0));
    }
    return sel;
  }

  const Problem& pb_;
  std::vector<std::size_t> offsets_;
  std::vector<std::size_t> choice_;
  std::vector<std::vector<double>> tables_;
};

std::vector<NodeRows> hidden_rows_of(const LowerBoundNetwork& net, const Setup& setup) {
  std::vector<NodeRows> out;
  for (auto v : setup.hidden) out.push_back(collect_rows(net, v, setup));
  return out;
}

}  // namespace

double oracle_combinations(const LowerBoundNetwork& net, std::string_view query, const Evidence& evidence) {
  const auto setup = make_setup(net, query, evidence);
  return count_combinations(hidden_rows_of(net, setup));
}

ExactBounds exact_bounds(const LowerBoundNetwork& net, std::string_view query, const Evidence& evidence,
                         OracleOptions options) {
  const auto setup = make_setup(net, query, evidence);
  auto hidden_rows = hidden_rows_of(net, setup);
  const double combos = count_combinations(hidden_rows);
  if (combos > options.cap) {
    throw OracleInfeasible("oracle infeasible: " + std::to_string(static_cast<long double>(combos)) +
                               " vertex combinations exceed cap " +
                               std::to_string(static_cast<long double>(options.cap)),
                           combos);
  }

  const Problem pb = build_problem(net, setup, std::move(hidden_rows));
  Search search(pb);
  search.run();

  ExactBounds out;
  const auto& qn = net.node(setup.query);
  out.node = qn.id;
  out.labels = qn.states.labels();
  out.exact_lower = search.lower_;
  out.exact_upper = search.upper_;
  out.argmin = search.argmin_;
  out.argmax = search.argmax_;
  out.combinations = combos;
  const auto add_rows = [&](const NodeRows& nr) {
    for (std::size_t k = 0; k < nr.rows.size(); ++k)
      out.rows.push_back({net.node(nr.node).id, nr.rows[k], nr.credal[k].distinct()});
  };
  for (const auto& lv : pb.levels) add_rows(lv.rows);
  add_rows(pb.query_rows);
  return out;
}

ChainBound node_removal(const LowerBoundNetwork& chain) {
  require_valid(chain);
  const auto order = topo_indices(chain);
  for (std::size_t i = 0; i < chain.size(); ++i) {
    if (chain.parents(i).size() > 1 || chain.children(i).size() > 1)
      throw RegimeError("node removal needs a directed chain; " + chain.node(i).id + " branches");
    if (chain.cardinality(i) != 2)
      throw RegimeError("outside exactness regime: node " + chain.node(i).id + " is not binary");
  }
  for (std::size_t k = 1; k < order.size(); ++k)
    if (chain.parents(order[k]).empty())
      throw RegimeError("node removal needs a directed chain; " + chain.node(order[k]).id + " is a second root");

  std::vector<double> head = chain.cpt(order.front()).rows.front();
  for (std::size_t k = 1; k < order.size(); ++k) {
    const auto& rows = chain.cpt(order[k]).rows;  // rows[y][x]
    const std::size_t sy = head.size();
    const std::size_t sx = rows.front().size();
    std::vector<double> next(sx, 0.0);
    for (std::size_t x = 0; x < sx; ++x) {
      std::size_t star = 0;
      for (std::size_t y = 1; y < sy; ++y)
        if (rows[y][x] < rows[star][x]) star = y;
      double others = 0.0, rest = 0.0;
      for (std::size_t y = 0; y < sy; ++y) {
        if (y == star) continue;
        others += head[y];
        rest += head[y] * rows[y][x];
      }
      next[x] = rows[star][x] * (1.0 - others) + rest;
    }
    head = std::move(next);
  }
  const auto& end = chain.node(order.back());
  return {end.id, end.states.labels(), std::move(head)};
}

}  // namespace lbbn
