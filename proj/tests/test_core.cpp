#include "delaynet/linalg.hpp"
#include "delaynet/network.hpp"
#include "delaynet/simplex.hpp"

#include "doctest.h"
#include "fixtures.hpp"

#include <random>

using namespace delaynet;
using fixtures::q;

TEST_CASE("rational literals are exact") {
  CHECK(parse_rational("0.1") == Rational(1, 10));
  CHECK(parse_rational("2/3") == Rational(2, 3));
  CHECK(parse_rational("-1.25e-3") == Rational(-1, 800));
  CHECK(parse_rational("7") == 7);
  CHECK_THROWS_AS(parse_rational("1/0"), std::invalid_argument);
  CHECK_THROWS_AS(parse_rational("abc"), std::invalid_argument);
  CHECK_THROWS_AS(parse_rational("1.2.3"), std::invalid_argument);
}

TEST_CASE("format_rational round-trips") {
  CHECK(format_rational(Rational(1, 2)) == "0.5");
  CHECK(format_rational(Rational(2, 3)) == "2/3");
  CHECK(format_rational(Rational(-7)) == "-7");
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<long> num(-100000, 100000);
  std::uniform_int_distribution<long> den(1, 5000);
  for (int i = 0; i < 500; ++i) {
    const Rational x(num(rng), den(rng));
    CHECK(parse_rational(format_rational(x)) == x);
  }
}

TEST_CASE("from_double is exact for dyadic values") {
  CHECK(from_double(0.5) == Rational(1, 2));
  CHECK(from_double(-3.25) == Rational(-13, 4));
  CHECK(to_double(from_double(0.1)) == 0.1);
}

TEST_CASE("rank and orthogonal complement") {
  // (1,1,0), (0,1,1), (1,2,1): rank 2, complement spanned by (1,-1,1)
  const RationalMatrix rows{{1, 1, 0}, {0, 1, 1}, {1, 2, 1}};
  CHECK(rank(rows, 3) == 2);
  const auto perp = orthogonal_complement(rows, 3);
  REQUIRE(perp.size() == 1);
  for (const auto& r : rows) {
    CHECK(dot(r, perp[0]) == 0);
  }
  CHECK(primitive(perp[0]) == RationalVector{1, -1, 1});
}

TEST_CASE("complement dimension property") {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> entry(-3, 3);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t cols = 2 + trial % 5;
    RationalMatrix rows(1 + trial % 4, RationalVector(cols));
    for (auto& r : rows) {
      for (auto& x : r) {
        x = entry(rng);
      }
    }
    const auto perp = orthogonal_complement(rows, cols);
    CHECK(perp.size() + rank(rows, cols) == cols);
    for (const auto& p : perp) {
      for (const auto& r : rows) {
        CHECK(dot(p, r) == 0);
      }
    }
  }
}

TEST_CASE("solve_combination and in_span") {
  const RationalMatrix gens{{1, 0, 1}, {0, 1, 1}};
  const auto c = solve_combination(gens, {2, 3, 5});
  REQUIRE(c);
  CHECK((*c)[0] == 2);
  CHECK((*c)[1] == 3);
  CHECK_FALSE(in_span(gens, {1, 1, 1}));
}

TEST_CASE("simplex: optimum, infeasibility certificate, unboundedness") {
  // max x1 + x2 s.t. x1 + 2 x2 + s = 4, 3 x1 + x2 + t = 6
  const RationalMatrix A{{1, 2, 1, 0}, {3, 1, 0, 1}};
  const auto opt = solve_lp(A, {4, 6}, {1, 1, 0, 0});
  REQUIRE(opt.status == LpResult::Status::optimal);
  CHECK(opt.objective == Rational(14, 5));
  CHECK(opt.x[0] == Rational(8, 5));
  CHECK(opt.x[1] == Rational(6, 5));

  // x1 + x2 = -1 with x >= 0 is infeasible; Farkas: y^T A >= 0, y^T b < 0
  const RationalMatrix B{{1, 1}};
  const auto inf = solve_lp(B, {-1}, {0, 0});
  REQUIRE(inf.status == LpResult::Status::infeasible);
  REQUIRE(inf.farkas.size() == 1);
  CHECK(inf.farkas[0] * 1 >= 0);
  CHECK(inf.farkas[0] * -1 < 0);

  const RationalMatrix C{{1, -1}};
  CHECK(solve_lp(C, {0}, {1, 0}).status == LpResult::Status::unbounded);
}

TEST_CASE("network DSL parses fixtures") {
  const auto net = fixtures::net("example2");
  CHECK(net.species == std::vector<std::string>{"A", "B", "C"});
  REQUIRE(net.r() == 5);
  CHECK(net.reactions[0].reactant == Complex{3, 0, 0});
  CHECK(net.reactions[0].product == Complex{2, 1, 0});
  CHECK(net.reactions[3].delay == Rational(7, 10));
  CHECK(validate_network(net).empty());
}

TEST_CASE("network DSL round-trips through serialize") {
  for (const char* name : {"example1", "example2", "pak1", "scpak", "fig4", "thm2_case2"}) {
    const auto net = fixtures::net(name);
    CHECK(parse_network(serialize_network(net)) == net);
  }
  const auto src = fixtures::net("pak1");
  const auto w = fixtures::witness("pak1", src);
  const auto again = parse_witness(serialize_witness(w), src);
  CHECK(again.L == w.L);
  CHECK(again.target == w.target);
}

TEST_CASE("parse errors carry kind and position") {
  auto kind_of = [](const char* text) {
    try {
      parse_network(text);
    } catch (const ParseError& e) {
      return e.kind();
    }
    FAIL("no error");
    return ParseError::Kind::syntax;
  };
  CHECK(kind_of("species A\nreaction A -> B : k=1\n") == ParseError::Kind::unknown_species);
  CHECK(kind_of("species A A\n") == ParseError::Kind::duplicate_species);
  CHECK(kind_of("species A\nreaction A -> 0 : k=0\n") == ParseError::Kind::nonpositive_rate);
  CHECK(kind_of("species A\nreaction A -> 0 : k=1 tau=-1\n") == ParseError::Kind::negative_delay);
  try {
    load_network(fixtures::path("malformed.net"));
    FAIL("malformed fixture parsed");
  } catch (const ParseError& e) {
    CHECK(e.kind() == ParseError::Kind::syntax);
    CHECK(e.line() == 3);
  }
}

TEST_CASE("complex helpers") {
  const std::vector<std::string> sp{"A", "B"};
  CHECK(parse_complex("2A + B", sp) == Complex{2, 1});
  CHECK(parse_complex("0", sp) == Complex{0, 0});
  CHECK(format_complex(sp, {0, 0}) == "0");
  CHECK(format_complex(sp, {1, 2}) == "A + 2B");
  const auto net = fixtures::net("example2");
  CHECK(distinct_delays(net) == std::vector<Rational>{q("0.3"), q("0.5"), q("0.7"), 1});
  CHECK(strip_delays(net).reactions[0].delay == 0);
}
