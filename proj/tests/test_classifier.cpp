#include "delaynet/classifier.hpp"
#include "delaynet/conjugacy.hpp"
#include "delaynet/kinetics.hpp"

#include "doctest.h"
#include "fixtures.hpp"

#include <cmath>
#include <random>

using namespace delaynet;
using fixtures::q;

namespace {

std::vector<State> random_states(std::size_t n, std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.05, 4.0);
  std::vector<State> out(count, State(n));
  for (auto& s : out) {
    for (auto& v : s) {
      v = u(rng);
    }
  }
  return out;
}

struct Fixture {
  const char* net;
  const char* witness;
  Theorem expected;
};

const Fixture kFixtures[] = {
    {"example1", "example1", Theorem::thm1},         {"example2", "example2", Theorem::cor1_case2},
    {"example2_distinct", "example2", Theorem::cor1_case2}, {"pak1", "pak1", Theorem::thm3},
    {"scpak", "scpak", Theorem::thm3},                {"fig4", "fig4", Theorem::thm3},
    {"thm2_case1", "thm2", Theorem::thm2_case1},      {"thm2_case2", "thm2", Theorem::thm2_case2},
};

}  // namespace

TEST_CASE("scaled rates carry the L factor") {
  const auto src = fixtures::net("pak1");
  const auto w = fixtures::witness("pak1", src);
  // 1/4 * (1/2)^-2 = 1
  CHECK(scaled_rates(w) == std::vector<Rational>{1, 1, 1, 1});
}

TEST_CASE("dynamic equivalence of example1") {
  const auto src = fixtures::net("example1");
  const auto w = fixtures::witness("example1", src);
  const auto r = check_dynamic_equivalence(src, w.target);
  CHECK(r.kind == ConjugacyReport::Kind::dynamically_equivalent);
  CHECK(r.residual_max == 0.0);
  CHECK(rhs_conjugacy_defect(src, w, random_states(1, 20, 1)) < 1e-12);
}

TEST_CASE("linear conjugacy residual routes agree on pak1") {
  const auto src = fixtures::net("pak1");
  const auto w = fixtures::witness("pak1", src);
  const auto r = check_linear_conjugacy(src, w);
  CHECK(r.kind == ConjugacyReport::Kind::linearly_conjugate);
  CHECK(r.residual_max <= 1e-12);
  CHECK(rhs_conjugacy_defect(src, w, random_states(3, 50, 2)) <= 1e-12);

  // a wrong rate shows up on both routes
  auto bad = w;
  bad.target.reactions[0].rate = q("0.3");
  CHECK(check_linear_conjugacy(src, bad).kind == ConjugacyReport::Kind::neither);
  CHECK(rhs_conjugacy_defect(src, bad, random_states(3, 50, 2)) > 1e-3);
}

TEST_CASE("conjugacy search with fixed L recovers exact rates") {
  const auto src = fixtures::net("pak1");
  const auto w = fixtures::witness("pak1", src);
  const auto found = find_conjugacy(src, w.target, w.L);
  REQUIRE(found.feasible);
  CHECK_FALSE(found.heuristic);
  CHECK(found.witness.target.reactions[0].rate == q("1/4"));
  CHECK(check_linear_conjugacy(src, found.witness).residual_max <= 1e-12);

  const auto e1 = fixtures::net("example1");
  const auto t1 = fixtures::witness("example1", e1).target;
  const auto eq = find_conjugacy(e1, t1, RationalVector{1});
  REQUIRE(eq.feasible);
  CHECK(eq.witness.target.reactions[0].rate == q("0.5"));
  CHECK(eq.witness.target.reactions[1].rate == q("0.5"));
}

TEST_CASE("conjugacy search reports a Farkas certificate") {
  const auto src = parse_network("species A B\nreaction A -> B : k=1\n");
  const auto tgt = parse_network("species A B\nreaction B -> A : k=1\n");
  const auto found = find_conjugacy(src, tgt, RationalVector{1, 1});
  CHECK_FALSE(found.feasible);
  CHECK_FALSE(found.reason.empty());
}

TEST_CASE("classification of every fixture") {
  for (const auto& f : kFixtures) {
    CAPTURE(f.net);
    const auto src = fixtures::net(f.net);
    const auto cert = classify(src, fixtures::witness(f.witness, src));
    CHECK(cert.theorem == f.expected);
  }
}

TEST_CASE("example1 loop weights") {
  const auto src = fixtures::net("example1");
  const auto cert = check_thm1(src, fixtures::witness("example1", src));
  REQUIRE(cert.accepted());
  std::map<Complex, Rational> K;
  for (const auto& lt : cert.decomposition.loop_terms) {
    K[lt.y] += lt.K;
  }
  CHECK(K[{2}] == q("1/2"));
  CHECK(K[{0}] == q("1/2"));
}

TEST_CASE("example2 quasi split") {
  const auto src = fixtures::net("example2");
  const auto cert = classify(src, fixtures::witness("example2", src));
  REQUIRE(cert.theorem == Theorem::cor1_case2);
  std::map<std::pair<std::size_t, Rational>, Rational> split;
  for (const auto& qr : cert.decomposition.quasi_rates) {
    split[{qr.target, qr.delay}] += qr.rate;
  }
  CHECK(split[{0, 1}] == 1);  // k/2 from each of tau1 = tau3
  CHECK(split[{1, q("0.5")}] == q("1/3"));
  CHECK(split[{1, 1}] == q("1/3"));
  CHECK(split[{2, q("0.7")}] == q("2/3"));
}

TEST_CASE("HF condition on example2") {
  const auto src = fixtures::net("example2");
  const auto hf = check_hf(src, fixtures::witness("example2", src).target);
  CHECK(hf.holds);
  bool seen = false;
  for (const auto& e : hf.entries) {
    if (e.y == Complex{3, 0, 0} && e.delay == 1) {
      seen = true;
      CHECK(e.norm == 3);
      REQUIRE(e.min_target_norm);
      CHECK(*e.min_target_norm == 4);
    }
  }
  CHECK(seen);
}

TEST_CASE("sign split coefficients balance each side") {
  // Z^(y,tau) = 2 at tau=1 and -1 at tau=2; target a~ = +1 (k~=3) and -1 (k~=1)
  const auto s = split_sign_coefficients({{1, 2}, {2, -1}}, {{0, 1}, {1, -1}}, {3, 1});
  CHECK(s.Z_plus_target == 3);
  CHECK(s.Z_minus_target == 1);
  Rational plus = 0;
  Rational minus = 0;
  for (const auto& [key, c] : s.c) {
    (key.second == 0 ? plus : minus) += c;
  }
  CHECK(plus >= 0);
  CHECK(minus >= 0);
  CHECK_THROWS_AS(split_sign_coefficients({{1, 2}}, {{1, -1}}, {0, 1}), std::domain_error);
}

TEST_CASE("species-multiple route refuses the empty reactant") {
  const auto src = fixtures::net("example1");
  const auto cert = check_thm3(src, fixtures::witness("example1", src));
  CHECK_FALSE(cert.accepted());
  CHECK_FALSE(cert.rejections.empty());
}

TEST_CASE("rejected certificates carry no decomposition") {
  const auto src = parse_network("species A B\nreaction A -> B : k=1 tau=1\n");
  const auto cert = classify(src, std::nullopt);
  CHECK(cert.theorem == Theorem::none);
  CHECK(cert.decomposition.quasi_rates.empty());
  CHECK_FALSE(cert.rejections.empty());
}

TEST_CASE("decompositions reproduce the source dynamics") {
  for (const auto& f : kFixtures) {
    CAPTURE(f.net);
    const auto src = fixtures::net(f.net);
    const auto cert = classify(src, fixtures::witness(f.witness, src));
    REQUIRE(cert.accepted());
    CHECK(decomposition_mismatches(cert, src).empty());
    for (const auto& d : rate_split_defects(cert)) {
      CHECK(d == 0);
    }
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> u(0.05, 3.0);
    for (int trial = 0; trial < 20; ++trial) {
      State now(src.n());
      for (auto& v : now) v = u(rng);
      std::map<double, State> lag;
      for (const auto& tau : distinct_delays(src)) {
        State s(src.n());
        for (auto& v : s) v = u(rng);
        lag[to_double(tau)] = tau == 0 ? now : s;
      }
      const State a = reconstruct_rhs(cert, now, lag);
      const State b = dde_rhs(src, now, lag);
      for (std::size_t j = 0; j < src.n(); ++j) {
        CHECK(std::abs(a[j] - b[j]) <= 1e-10 * std::max(1.0, std::abs(b[j])));
      }
    }
  }
}

TEST_CASE("species-multiple deltas sum to one over delays") {
  for (const char* name : {"pak1", "scpak", "fig4"}) {
    const auto src = fixtures::net(name);
    const auto cert = check_thm3(src, fixtures::witness(name, src));
    REQUIRE(cert.accepted());
    std::map<std::pair<Complex, std::size_t>, Rational> sums;
    for (const auto& d : cert.decomposition.deltas) {
      CHECK(d.delta >= 0);
      sums[{d.y, d.species}] += d.delta;
    }
    for (const auto& [key, s] : sums) {
      CHECK(s == 1);
    }
  }
}

TEST_CASE("classify without a witness uses the source as target") {
  // 0 <-> X with equal delays is its own complex-balanced target
  const auto src = parse_network("species X\nreaction 0 -> X : k=2 tau=1\nreaction X -> 0 : k=1 tau=1\n");
  const auto cert = classify(src, std::nullopt);
  CHECK(cert.accepted());
  CHECK(cert.witness.is_identity());
}
