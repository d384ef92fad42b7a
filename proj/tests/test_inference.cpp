#include <algorithm>
#include <random>

#include "doctest.h"
#include "lbbn/errors.hpp"
#include "lbbn/inference.hpp"
#include "lbbn/io.hpp"
#include "support.hpp"

using namespace lbbn;
using lbbn::testing::chain_efg;

namespace {

LowerBoundNetwork chain_abc() {
  std::vector<NodeSpec> nodes{{"A", StateSpace({"a1", "a2"}), {}},
                              {"B", StateSpace({"b1", "b2"}), {"A"}},
                              {"C", StateSpace({"c1", "c2"}), {"B"}}};
  std::vector<Cpt> cpts{{{{0.5, 0.3}}}, {{{0.6, 0.2}, {0.1, 0.7}}}, {{{0.4, 0.4}, {0.2, 0.5}}}};
  return LowerBoundNetwork(nodes, cpts);
}

std::map<std::size_t, std::size_t> index_evidence(const Network& net, const Evidence& ev) {
  std::map<std::size_t, std::size_t> out;
  for (const auto& [id, s] : ev) {
    const auto i = net.index_of(id);
    out[i] = *net.node(i).states.index_of(s);
  }
  return out;
}

}  // namespace

TEST_CASE("is_prognostic examples") {
  const auto example = std::get<LowerBoundNetwork>(io::load_network(lbbn::testing::data_path("example.json")));
  CHECK(is_prognostic(example, "G", {}).prognostic);
  const auto abc = chain_abc();
  CHECK(is_prognostic(abc, "C", {{"A", "a1"}}).prognostic);
  const auto bad = is_prognostic(abc, "C", {{"B", "b1"}});
  CHECK_FALSE(bad.prognostic);
  CHECK(bad.violator == "B");
  CHECK(bad.explanation.find("A") != std::string::npos);
  // Observed descendants are not predecessors of the query.
  const auto desc = is_prognostic(abc, "A", {{"C", "c1"}, {"B", "b1"}});
  CHECK_FALSE(desc.prognostic);
  CHECK(desc.violator == "B");
  CHECK_FALSE(is_prognostic(abc, "A", {{"A", "a1"}}).prognostic);
  CHECK_THROWS_AS(is_prognostic(abc, "Q", {}), UnknownNodeError);
  CHECK_THROWS_AS(is_prognostic(abc, "C", {{"Q", "q"}}), UnknownNodeError);
}

TEST_CASE("eliminate on the transformed example") {
  const auto art = to_lbbn(chain_efg());
  const auto d = eliminate(art.network, "G", {});
  REQUIRE(d.labels == std::vector<std::string>{"g1", "g2", "N"});
  // g1 as published; g2 and N by hand summation:
  // P(F') = (0.36, 0.52, 0.12); g2 = .36*.2 + .52*.1 + .12*.1, N = 1 - g1 - g2.
  CHECK(std::abs(d.p[0] - 0.752) <= 1e-12);
  CHECK(std::abs(d.p[1] - 0.136) <= 1e-12);
  CHECK(std::abs(d.p[2] - 0.112) <= 1e-12);
}

TEST_CASE("eliminate on a single node") {
  StandardNetwork net({{"A", StateSpace({"a1", "a2"}), {}}}, {{{{0.3, 0.7}}}});
  const auto d = eliminate(net, "A", {});
  CHECK(d.p == std::vector<double>{0.3, 0.7});
}

TEST_CASE("eliminate errors") {
  StandardNetwork net({{"A", StateSpace({"a1", "a2"}), {}}, {"B", StateSpace({"b1", "b2"}), {"A"}}},
                      {{{{1.0, 0.0}}}, {{{0.5, 0.5}, {0.2, 0.8}}}});
  CHECK_THROWS_AS(eliminate(net, "B", {{"A", "a2"}}), InconsistentEvidence);
  CHECK_THROWS_AS(eliminate(net, "Q", {}), UnknownNodeError);
  CHECK_THROWS_AS(eliminate(net, "B", {{"B", "b1"}}), InvalidArgument);
  const std::vector<std::string> wrong{"B"};
  CHECK_THROWS_AS(eliminate(net, "B", {}, wrong), InvalidArgument);
}

TEST_CASE("property: eliminate equals joint enumeration, any order, pruned or not") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 150; ++trial) {
    const std::size_t states = 2 + trial % 2;
    const auto net = lbbn::testing::random_standard(rng, 6, states, 0.45);
    const auto q = net.size() - 1 - static_cast<std::size_t>(trial % 3);
    const auto& qid = net.node(q).id;
    Evidence ev;
    // Observe some other node at random (any node, general conditioning).
    const std::size_t other = rng() % net.size();
    if (other != q && trial % 2 == 0) ev[net.node(other).id] = net.node(other).states.label(rng() % states);

    const auto expected = lbbn::testing::joint_marginal(net, q, index_evidence(net, ev));
    const auto d = eliminate(net, qid, ev);
    for (std::size_t k = 0; k < states; ++k) CHECK(std::abs(d.p[k] - expected[k]) <= 1e-12);

    std::vector<std::string> order;
    for (const auto& n : net.nodes())
      if (n.id != qid && !ev.count(n.id)) order.push_back(n.id);
    for (int shuffle = 0; shuffle < 3; ++shuffle) {
      std::shuffle(order.begin(), order.end(), rng);
      const auto d2 = eliminate(net, qid, ev, order);
      for (std::size_t k = 0; k < states; ++k) CHECK(std::abs(d2.p[k] - d.p[k]) <= 1e-12);
    }
    const auto pruned = barren_prune(net, qid, ev);
    const auto d3 = eliminate(pruned, qid, ev);
    for (std::size_t k = 0; k < states; ++k) CHECK(std::abs(d3.p[k] - d.p[k]) <= 1e-12);
  }
}

TEST_CASE("min-degree order is deterministic with id tie-breaks") {
  const auto art = to_lbbn(chain_efg());
  CHECK(elimination_order(art.network, "G", {}) == std::vector<std::string>{"E", "F"});
}

TEST_CASE("lbbn_bounds on the worked example") {
  const auto example = std::get<LowerBoundNetwork>(io::load_network(lbbn::testing::data_path("example.json")));
  const auto b = lbbn_bounds(example, "G", {});
  CHECK(b.labels == std::vector<std::string>{"g1", "g2"});
  CHECK(std::abs(b.lower[0] - 0.752) <= 1e-12);
  CHECK(std::abs(b.induced_upper[0] - 0.864) <= 1e-12);
  CHECK(std::abs(b.ignorance - 0.112) <= 1e-12);
  CHECK(b.guaranteed);
  // Invariants of the bounded marginal.
  CHECK(std::abs(b.lower[0] + b.lower[1] + b.ignorance - 1.0) <= 1e-9);
  for (std::size_t x = 0; x < 2; ++x) CHECK(b.lower[x] <= b.induced_upper[x]);
}

TEST_CASE("lbbn_bounds collapses to the point marginal without ignorance") {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    const auto std_net = lbbn::testing::random_standard(rng, 5, 2, 0.5);
    const LowerBoundNetwork lower(std_net.nodes(), std_net.cpts());
    for (const auto& n : std_net.nodes()) {
      const auto exact = eliminate(std_net, n.id, {});
      const auto b = lbbn_bounds(lower, n.id, {});
      for (std::size_t k = 0; k < 2; ++k) {
        CHECK(std::abs(b.lower[k] - exact.p[k]) <= 1e-12);
        CHECK(std::abs(b.induced_upper[k] - exact.p[k]) <= 1e-12);
      }
      CHECK(std::abs(b.ignorance) <= 1e-12);
    }
  }
}

TEST_CASE("lbbn_bounds contract") {
  const auto abc = chain_abc();
  CHECK_THROWS_AS(lbbn_bounds(abc, "C", {{"B", "b1"}}), NonPrognosticQuery);
  const auto forced = lbbn_bounds(abc, "C", {{"B", "b1"}}, {true});
  CHECK_FALSE(forced.guaranteed);
  const auto with_ev = lbbn_bounds(abc, "C", {{"A", "a2"}});
  CHECK(with_ev.guaranteed);
  // Hand value: B' given a2 = (0.1, 0.7, 0.2); C' lower c1 = .1*.4 + .7*.2 + .2*min(.4,.2).
  CHECK(std::abs(with_ev.lower[0] - (0.04 + 0.14 + 0.04)) <= 1e-12);

  // All-zero lower bounds: total ignorance.
  LowerBoundNetwork zero({{"A", StateSpace({"a1", "a2"}), {}}, {"B", StateSpace({"b1", "b2"}), {"A"}}},
                         {{{{0.0, 0.0}}}, {{{0.0, 0.0}, {0.0, 0.0}}}});
  const auto z = lbbn_bounds(zero, "B", {});
  CHECK(z.lower == std::vector<double>{0.0, 0.0});
  CHECK(z.induced_upper == std::vector<double>{1.0, 1.0});
  CHECK(z.ignorance == 1.0);

  // Prognostic evidence whose lower bound is zero is still legal.
  const auto zev = lbbn_bounds(zero, "B", {{"A", "a1"}});
  CHECK(zev.ignorance == 1.0);
}

TEST_CASE("barren invariance of lbbn_bounds") {
  const auto example = std::get<LowerBoundNetwork>(io::load_network(lbbn::testing::data_path("example.json")));
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const auto net = lbbn::testing::random_lower(rng, 7, 2 + trial % 2, 0.4);
    for (const auto& n : net.nodes()) {
      const auto a = lbbn_bounds(net, n.id, {});
      const auto b = lbbn_bounds(barren_prune(net, n.id, {}), n.id, {});
      // Unpruned reference: full elimination with an explicit order.
      const auto art = to_lbbn(net);
      std::vector<std::string> order;
      for (const auto& m : net.nodes())
        if (m.id != n.id) order.push_back(m.id);
      const auto full = bounds_from_lbbn_marginal(eliminate(art.network, n.id, {}, order));
      for (std::size_t k = 0; k < a.lower.size(); ++k) {
        CHECK(std::abs(a.lower[k] - b.lower[k]) <= 1e-12);
        CHECK(std::abs(a.lower[k] - full.lower[k]) <= 1e-12);
      }
    }
  }
  CHECK(lbbn_bounds(example, "G", {}).lower == lbbn_bounds(barren_prune(example, "G", {}), "G", {}).lower);
}
