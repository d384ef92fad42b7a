#include "lbbn/elicitation.hpp"

#include <cctype>
#include <string>

#include "lbbn/errors.hpp"

namespace lbbn {

std::uint64_t StatementCounts::total() const {
  std::uint64_t n = 0;
  for (auto c : counts) n += c;
  return n;
}

double to_double(const Rational& r) { return r.convert_to<double>(); }

std::vector<double> IdmBounds::lower_values() const {
  std::vector<double> out;
  for (const auto& r : lower) out.push_back(to_double(r));
  return out;
}

std::vector<double> IdmBounds::upper_values() const {
  std::vector<double> out;
  for (const auto& r : upper) out.push_back(to_double(r));
  return out;
}

double IdmBounds::ignorance_value() const { return to_double(ignorance); }

IdmBounds idm_bounds(const StatementCounts& counts) {
  if (counts.d <= 0) throw InvalidArgument("IDM hyperparameter d must be > 0");
  if (counts.counts.empty()) throw InvalidArgument("IDM needs at least one state");
  const Rational denom = counts.d + Rational(counts.total());
  IdmBounds b;
  for (auto c : counts.counts) {
    b.lower.push_back(Rational(c) / denom);
    b.upper.push_back((Rational(c) + counts.d) / denom);
  }
  b.ignorance = counts.d / denom;
  return b;
}

Rational parse_rational(std::string_view text) {
  const std::string s(text);
  auto bad = [&]() { return InvalidArgument("not a rational number: '" + s + "'"); };
  if (s.empty()) throw bad();

  if (auto slash = s.find('/'); slash != std::string::npos) {
    const auto num = parse_rational(s.substr(0, slash));
    const auto den = parse_rational(s.substr(slash + 1));
    if (den == 0) throw bad();
    return num / den;
  }

  std::size_t i = 0;
  bool negative = false;
  if (s[i] == '+' || s[i] == '-') negative = s[i++] == '-';
  boost::multiprecision::cpp_int digits = 0, scale = 1;
  bool any = false, point = false;
  for (; i < s.size(); ++i) {
    const char c = s[i];
    if (c == '.' && !point) {
      point = true;
      continue;
    }
    if (!std::isdigit(static_cast<unsigned char>(c))) throw bad();
    digits = digits * 10 + (c - '0');
    if (point) scale *= 10;
    any = true;
  }
  if (!any) throw bad();
  Rational r(digits, scale);
  return negative ? Rational(-r) : r;
}

}  // namespace lbbn
