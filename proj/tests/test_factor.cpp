#include "doctest.h"
#include "lbbn/errors.hpp"
#include "lbbn/factor.hpp"

using namespace lbbn;

TEST_CASE("multiply aligns shared variables") {
  // f(a, b) and g(b, c), all binary.
  Factor f{{0, 1}, {2, 2}, {0.1, 0.2, 0.3, 0.4}};
  Factor g{{1, 2}, {2, 2}, {1.0, 2.0, 3.0, 4.0}};
  const auto h = multiply(f, g);
  REQUIRE(h.scope == std::vector<std::size_t>{0, 1, 2});
  // h(a, b, c) = f(a, b) g(b, c)
  for (std::size_t a = 0; a < 2; ++a)
    for (std::size_t b = 0; b < 2; ++b)
      for (std::size_t c = 0; c < 2; ++c)
        CHECK(h.table[a * 4 + b * 2 + c] == doctest::Approx(f.table[a * 2 + b] * g.table[b * 2 + c]));
}

TEST_CASE("sum_out and reduce") {
  Factor f{{3, 5}, {2, 3}, {1, 2, 3, 4, 5, 6}};
  const auto s0 = sum_out(f, 3);
  CHECK(s0.scope == std::vector<std::size_t>{5});
  CHECK(s0.table == std::vector<double>{5, 7, 9});
  const auto s1 = sum_out(f, 5);
  CHECK(s1.table == std::vector<double>{6, 15});
  const auto r = reduce(f, 5, 2);
  CHECK(r.scope == std::vector<std::size_t>{3});
  CHECK(r.table == std::vector<double>{3, 6});
  CHECK_THROWS_AS(sum_out(f, 9), InvalidArgument);
  CHECK_THROWS_AS(reduce(f, 3, 2), InvalidArgument);
}

TEST_CASE("scalar factors") {
  const auto c = Factor::constant(2.5);
  Factor f{{1}, {2}, {0.5, 1.5}};
  CHECK(multiply(c, f).table == std::vector<double>{1.25, 3.75});
  CHECK(multiply(c, f).total() == doctest::Approx(5.0));
}
