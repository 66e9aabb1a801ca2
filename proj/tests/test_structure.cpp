#include "delaynet/kinetics.hpp"
#include "delaynet/structure.hpp"

#include "doctest.h"
#include "fixtures.hpp"

#include <cmath>
#include <random>

using namespace delaynet;
using fixtures::q;

TEST_CASE("structure of example1 source and target") {
  const auto src = fixtures::net("example1");
  const auto w = fixtures::witness("example1", src);
  // complexes 2S1, S1, 0 with arrows 2S1 -> S1 <- 0: one class, rank 1
  const auto s = analyze_structure(src);
  CHECK(s.complexes.size() == 3);
  CHECK(s.linkage_class_count == 1);
  CHECK(s.stoich_basis.size() == 1);
  CHECK(s.deficiency == 1);
  CHECK_FALSE(s.weakly_reversible);
  const auto t = analyze_structure(w.target);
  CHECK(t.deficiency == 0);
  CHECK(t.weakly_reversible);
  CHECK(is_wr_deficiency_zero(w.target));
}

TEST_CASE("structure of example2 and scPAK targets") {
  const auto e2 = fixtures::net("example2");
  const auto t2 = fixtures::witness("example2", e2).target;
  CHECK(deficiency(t2) == 0);
  CHECK(is_weakly_reversible(complex_graph(t2)));
  CHECK(orth_complement(t2).size() == 1);

  const auto sc = fixtures::net("scpak");
  const auto tsc = fixtures::witness("scpak", sc).target;
  CHECK(deficiency(tsc) == 0);
  const auto perp = orth_complement(tsc);
  REQUIRE(perp.size() == 1);
  CHECK(primitive(perp[0]) == RationalVector{1, 2, 2});
}

TEST_CASE("complex graph drops self-loops") {
  const auto sc = fixtures::net("scpak");
  const auto g = complex_graph(sc);
  for (const auto& [a, b] : g.edges) {
    CHECK(a != b);
  }
}

TEST_CASE("linkage and strong components on a chain") {
  const auto net = parse_network("species A B C D\nreaction A -> B : k=1\nreaction B -> A : k=1\nreaction C -> D : k=1\n");
  const auto g = complex_graph(net);
  CHECK(linkage_class_count(g) == 2);
  CHECK_FALSE(is_weakly_reversible(g));
  const auto comp = strong_components(g);
  CHECK(comp[0] == comp[1]);
  CHECK(comp[2] != comp[3]);
}

TEST_CASE("deficiency identity holds on fixtures") {
  for (const char* name : {"example1", "example2", "pak1", "scpak", "fig4", "thm2_case1"}) {
    const auto net = fixtures::net(name);
    const auto s = analyze_structure(net);
    CHECK(s.deficiency ==
          static_cast<long>(s.complexes.size()) - static_cast<long>(s.linkage_class_count) -
              static_cast<long>(s.stoich_basis.size()));
    CHECK(s.stoich_basis.size() + s.orth_basis.size() == net.n());
    CHECK(s.kinetic_basis.size() <= s.stoich_basis.size());
  }
}

TEST_CASE("mass-action right-hand sides") {
  const auto net = fixtures::net("example1");
  // f = k1 (x_lag^2 - 2 x^2) + k2
  CHECK(ode_rhs(net, {2.0})[0] == doctest::Approx(-3.0));
  const State f = dde_rhs(net, {2.0}, {{1.0, {3.0}}});
  CHECK(f[0] == doctest::Approx(9.0 - 8.0 + 1.0));
  CHECK_THROWS_AS(dde_rhs(net, {2.0}, {{0.5, {3.0}}}), std::out_of_range);
  CHECK(monomial(State{0.0, 2.0}, Complex{0, 3}) == 8.0);
  CHECK(monomial(State{0.0, 2.0}, Complex{0, 0}) == 1.0);
}

TEST_CASE("RhsEvaluator agrees with dde_rhs") {
  const auto net = fixtures::net("example2");
  const RhsEvaluator ev(net);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.1, 3.0);
  for (int trial = 0; trial < 50; ++trial) {
    State now{u(rng), u(rng), u(rng)};
    std::map<double, State> lag;
    std::vector<State> slots;
    for (double d : ev.delays()) {
      slots.push_back({u(rng), u(rng), u(rng)});
      lag[d] = slots.back();
    }
    std::vector<const double*> ptrs;
    for (const auto& s : slots) {
      ptrs.push_back(s.data());
    }
    State out(3);
    ev.evaluate(now.data(), ptrs, out.data());
    const State ref = dde_rhs(net, now, lag);
    for (std::size_t j = 0; j < 3; ++j) {
      CHECK(out[j] == doctest::Approx(ref[j]).epsilon(1e-13));
    }
  }
}

TEST_CASE("aggregates of example2 reactant 3A") {
  const auto net = fixtures::net("example2");
  const auto agg = aggregates(net);
  const Complex y{3, 0, 0};
  CHECK(agg.k_sum.at(y) == 3);
  CHECK(agg.Z.at(y) == RationalVector{-4, 2, 2});
  CHECK(agg.Y_tau.at({y, 1}) == RationalVector{3, 2, 1});
  CHECK(agg.delays_of(y) == std::vector<Rational>{q("0.5"), 1});
}

TEST_CASE("one-dimensional frames") {
  const auto f = one_dim_frame({{2, -2}, {-1, 1}}, 2);
  CHECK(f.kind == OneDimFrame::Kind::one_dim);
  CHECK(f.w == RationalVector{1, -1});
  CHECK(f.a == RationalVector{2, -1});
  CHECK(one_dim_frame({{1, 0}, {0, 1}}, 2).kind == OneDimFrame::Kind::higher);
  CHECK(one_dim_frame({{0, 0}}, 2).kind == OneDimFrame::Kind::zero_span);
}

TEST_CASE("complex-balanced equilibrium") {
  const auto src = fixtures::net("example1");
  const auto target = fixtures::witness("example1", src).target;
  // x^2 / 2 = 1 / 2
  const auto x = complex_balanced_equilibrium(target);
  REQUIRE(x);
  CHECK((*x)[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(complex_balance_defect(target, *x) < 1e-12);

  const auto e2 = fixtures::witness("example2", fixtures::net("example2")).target;
  const auto z = complex_balanced_equilibrium(e2);
  REQUIRE(z);
  CHECK(complex_balance_defect(e2, *z) < 1e-12);
  for (double v : ode_rhs(e2, *z)) {
    CHECK(std::abs(v) < 1e-10);
  }
}
