#include "lbbn/factor.hpp"

#include <algorithm>
#include <numeric>

#include "lbbn/errors.hpp"

namespace lbbn {

namespace {

std::vector<std::size_t> strides_of(const std::vector<std::size_t>& cards) {
  std::vector<std::size_t> st(cards.size(), 1);
  for (std::size_t k = cards.size(); k-- > 1;) st[k - 1] = st[k] * cards[k];
  return st;
}

std::size_t position(const std::vector<std::size_t>& scope, std::size_t var) {
  auto it = std::find(scope.begin(), scope.end(), var);
  if (it == scope.end()) throw InvalidArgument("variable not in factor scope");
  return static_cast<std::size_t>(it - scope.begin());
}

}  // namespace

bool Factor::contains(std::size_t var) const {
  return std::find(scope.begin(), scope.end(), var) != scope.end();
}

double Factor::total() const { return std::accumulate(table.begin(), table.end(), 0.0); }

Factor cpt_factor(const Network& net, std::size_t node) {
  Factor f;
  for (auto p : net.parents(node)) {
    f.scope.push_back(p);
    f.cards.push_back(net.cardinality(p));
  }
  f.scope.push_back(node);
  f.cards.push_back(net.cardinality(node));
  const auto& rows = net.cpt(node).rows;
  f.table.reserve(rows.size() * net.cardinality(node));
  // Row-major over (parent assignment, child state) is exactly the factor
  // layout.
  for (const auto& row : rows) f.table.insert(f.table.end(), row.begin(), row.end());
  return f;
}

Factor multiply(const Factor& a, const Factor& b) {
  Factor out;
  out.scope = a.scope;
  out.cards = a.cards;
  for (std::size_t k = 0; k < b.scope.size(); ++k) {
    if (!a.contains(b.scope[k])) {
      out.scope.push_back(b.scope[k]);
      out.cards.push_back(b.cards[k]);
    }
  }
  const auto a_st = strides_of(a.cards);
  const auto b_st = strides_of(b.cards);
  // Stride of each output variable inside a and b (0 when absent).
  std::vector<std::size_t> sa(out.scope.size(), 0), sb(out.scope.size(), 0);
  for (std::size_t k = 0; k < out.scope.size(); ++k) {
    for (std::size_t j = 0; j < a.scope.size(); ++j)
      if (a.scope[j] == out.scope[k]) sa[k] = a_st[j];
    for (std::size_t j = 0; j < b.scope.size(); ++j)
      if (b.scope[j] == out.scope[k]) sb[k] = b_st[j];
  }
  std::size_t size = 1;
  for (auto c : out.cards) size *= c;
  out.table.resize(size);

  std::vector<std::size_t> digit(out.scope.size(), 0);
  std::size_t ia = 0, ib = 0;
  for (std::size_t t = 0; t < size; ++t) {
    out.table[t] = a.table[ia] * b.table[ib];
    for (std::size_t k = out.scope.size(); k-- > 0;) {
      if (++digit[k] < out.cards[k]) {
        ia += sa[k];
        ib += sb[k];
        break;
      }
      ia -= sa[k] * (out.cards[k] - 1);
      ib -= sb[k] * (out.cards[k] - 1);
      digit[k] = 0;
    }
  }
  return out;
}

Factor sum_out(const Factor& f, std::size_t var) {
  const auto pos = position(f.scope, var);
  const auto st = strides_of(f.cards);
  const std::size_t card = f.cards[pos];
  const std::size_t inner = st[pos];
  const std::size_t outer = f.table.size() / (card * inner);

  Factor out;
  out.scope = f.scope;
  out.cards = f.cards;
  out.scope.erase(out.scope.begin() + static_cast<std::ptrdiff_t>(pos));
  out.cards.erase(out.cards.begin() + static_cast<std::ptrdiff_t>(pos));
  out.table.assign(outer * inner, 0.0);
  for (std::size_t o = 0; o < outer; ++o)
    for (std::size_t c = 0; c < card; ++c)
      for (std::size_t i = 0; i < inner; ++i)
        out.table[o * inner + i] += f.table[(o * card + c) * inner + i];
  return out;
}

Factor reduce(const Factor& f, std::size_t var, std::size_t state) {
  const auto pos = position(f.scope, var);
  const auto st = strides_of(f.cards);
  const std::size_t card = f.cards[pos];
  if (state >= card) throw InvalidArgument("evidence state out of range");
  const std::size_t inner = st[pos];
  const std::size_t outer = f.table.size() / (card * inner);

  Factor out;
  out.scope = f.scope;
  out.cards = f.cards;
  out.scope.erase(out.scope.begin() + static_cast<std::ptrdiff_t>(pos));
  out.cards.erase(out.cards.begin() + static_cast<std::ptrdiff_t>(pos));
  out.table.resize(outer * inner);
  for (std::size_t o = 0; o < outer; ++o)
    for (std::size_t i = 0; i < inner; ++i)
      out.table[o * inner + i] = f.table[(o * card + state) * inner + i];
  return out;
}

}  // namespace lbbn
