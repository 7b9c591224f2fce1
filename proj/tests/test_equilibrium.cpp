#include "doctest.h"
#include "prefstab/corpus.hpp"
#include "prefstab/equilibrium.hpp"

using namespace prefstab;

TEST_CASE("nash verification on the dilemma and the mixed coordination profile") {
  Game pd = corpus::prisoners_dilemma();
  CHECK(is_nash(pd, MixedProfile::pure(pd, {1, 1})));
  CHECK_FALSE(is_nash(pd, MixedProfile::pure(pd, {0, 0})));

  Game g = corpus::coordination_3x3();
  MixedProfile p;
  p.strategies = {{Rational(1, 2), Rational(1, 2), Rational(0)},
                  {Rational(1, 2), Rational(1, 2), Rational(0)}};
  // Oracle: each pure deviation earns at most the equilibrium value 3.
  for (int i = 0; i < 2; ++i)
    for (int a = 0; a < 3; ++a) CHECK(unilateral_payoff(g, i, a, p) <= Rational(3));
  CHECK(is_nash(g, p));
}

TEST_CASE("strict nash") {
  Game g = corpus::coordination_2x2();
  CHECK(is_strict_nash(g, MixedProfile::pure(g, {0, 0})));
  CHECK_FALSE(is_strict_nash(g, MixedProfile::pure(g, {1, 0})));
  Game pd = corpus::prisoners_dilemma();
  CHECK(is_strict_nash(pd, MixedProfile::pure(pd, {1, 1})));
  MixedProfile mixed;
  mixed.strategies = {{Rational(1, 2), Rational(1, 2)}, {Rational(1), Rational(0)}};
  CHECK_THROWS_AS(is_strict_nash(pd, mixed), StructuralError);
}

TEST_CASE("pure nash enumeration is lexicographic") {
  Game pd = corpus::prisoners_dilemma();
  CHECK(enumerate_pure_nash(pd) == std::vector<PureProfile>{{1, 1}});
  Game g = corpus::coordination_2x2();
  CHECK(enumerate_pure_nash(g) == std::vector<PureProfile>{{0, 0}, {1, 1}});
  Game single({{"only"}, {"sole"}}, {{Rational(1), Rational(2)}});
  CHECK(enumerate_pure_nash(single) == std::vector<PureProfile>{{0, 0}});
}

TEST_CASE("support enumeration finds mixed equilibria") {
  // Matching-pennies pattern: unique equilibrium at (1/2,1/2) each.
  Game mp({{"H", "T"}, {"h", "t"}},
          {{Rational(1), Rational(-1)}, {Rational(-1), Rational(1)},
           {Rational(-1), Rational(1)}, {Rational(1), Rational(-1)}});
  auto res = solve_mixed_nash(mp, 2);
  REQUIRE(res.equilibria.size() == 1);
  CHECK(res.complete);
  CHECK(res.equilibria[0].strategies[0] == MixedStrategy{Rational(1, 2), Rational(1, 2)});
  CHECK(res.equilibria[0].strategies[1] == MixedStrategy{Rational(1, 2), Rational(1, 2)});

  Game pd = corpus::prisoners_dilemma();
  auto pd_res = solve_mixed_nash(pd, 2);
  CHECK(pd_res.complete);
  REQUIRE(pd_res.equilibria.size() == 1);
  CHECK(pd_res.equilibria[0].strategies == MixedProfile::pure(pd, {1, 1}).strategies);

  // The half-half profile of the 3x3 coordination game shows up.
  Game g = corpus::coordination_3x3();
  auto cres = solve_mixed_nash(g, 2);
  bool found = false;
  for (auto& e : cres.equilibria) {
    found = found || (e.strategies[0] == MixedStrategy{Rational(1, 2), Rational(1, 2), Rational(0)} &&
                      e.strategies[1] == MixedStrategy{Rational(1, 2), Rational(1, 2), Rational(0)});
    CHECK(is_nash(g, e));
  }
  CHECK(found);

  // Degenerate continuum: player 2 indifferent everywhere.
  Game cont({{"u", "d"}, {"l", "r"}},
            {{Rational(1), Rational(0)}, {Rational(0), Rational(0)},
             {Rational(0), Rational(0)}, {Rational(1), Rational(0)}});
  auto dres = solve_mixed_nash(cont, 2);
  CHECK_FALSE(dres.complete);
}

TEST_CASE("three-player support enumeration") {
  // Three-player matching-pennies-like game with a known completely mixed
  // equilibrium at (1/2,1/2) each: player i wants to match player i+1.
  std::vector<std::vector<Rational>> pay(8, std::vector<Rational>(3, Rational(0)));
  Game shape({{"A", "B"}, {"A", "B"}, {"A", "B"}}, pay);
  for (int f = 0; f < 8; ++f) {
    auto a = shape.profile_at(f);
    pay[f][0] = a[0] == a[1] ? 1 : -1;
    pay[f][1] = a[1] == a[2] ? 1 : -1;
    pay[f][2] = a[2] != a[0] ? 1 : -1;
  }
  Game g({{"A", "B"}, {"A", "B"}, {"A", "B"}}, pay);
  auto res = solve_mixed_nash(g, 2);
  bool found = false;
  for (auto& e : res.equilibria) {
    CHECK(is_nash(g, e));
    bool half = true;
    for (auto& s : e.strategies) half = half && s == MixedStrategy{Rational(1, 2), Rational(1, 2)};
    found = found || half;
  }
  CHECK(found);
}

TEST_CASE("classification") {
  Game pd = corpus::prisoners_dilemma();
  auto cls = classify_nash(pd, MixedProfile::pure(pd, {1, 1}), 2);
  CHECK(cls.strict);
  CHECK_FALSE(cls.completely_mixed);
  CHECK(cls.unique == TriState::kYes);

  Game g = corpus::coordination_2x2();
  auto c2 = classify_nash(g, MixedProfile::pure(g, {0, 0}), 2);
  CHECK(c2.strict);
  CHECK(c2.unique == TriState::kNo);

  Game c3 = corpus::coordination_3x3();
  MixedProfile half;
  half.strategies = {{Rational(1, 2), Rational(1, 2), Rational(0)},
                     {Rational(1, 2), Rational(1, 2), Rational(0)}};
  CHECK_FALSE(classify_nash(c3, half, 3).completely_mixed);
  CHECK_THROWS_AS(classify_nash(pd, MixedProfile::pure(pd, {0, 0}), 2), ContractError);
}

TEST_CASE("aggregate strong nash") {
  Game g = corpus::coordination_2x2();
  // Oracle (coalition enumeration): deviating sums against (a12,a22) are
  // 10 for {1,2} at (a11,a21), 0 elsewhere, versus 15; singletons lose 5, 10.
  CHECK(is_aggregate_strong_nash(g, MixedProfile::pure(g, {1, 1})));
  Game ex4 = corpus::three_player_2x2();
  CHECK_FALSE(is_aggregate_strong_nash(ex4, MixedProfile::pure(ex4, {0, 0, 0})));  // 15 > 14
  Game pd = corpus::prisoners_dilemma();
  CHECK_FALSE(is_aggregate_strong_nash(pd, MixedProfile::pure(pd, {1, 1})));  // 4 > 2
}

TEST_CASE("strictly strong nash is tri-state") {
  Game g = corpus::coordination_2x2();
  CHECK(is_strictly_strong_nash(g, MixedProfile::pure(g, {1, 1}), 4).verdict == TriState::kYes);
  Game ex3 = corpus::three_player_3x3();
  auto r = is_strictly_strong_nash(ex3, MixedProfile::pure(ex3, {0, 0, 0}), 2);
  CHECK(r.verdict == TriState::kNo);  // (a12,a22,a31) keeps players 1,2 at 7
  REQUIRE(r.deviation.has_value());
  auto v = expected_payoff(ex3, *r.deviation);
  bool nobody_worse = true;
  for (int j : r.coalition) nobody_worse = nobody_worse && v[j] >= Rational(7);
  CHECK(nobody_worse);
  Game pd = corpus::prisoners_dilemma();
  CHECK(is_strictly_strong_nash(pd, MixedProfile::pure(pd, {1, 1}), 4).verdict == TriState::kNo);
}

TEST_CASE("nash invariant under positive affine payoff transforms") {
  Game pd = corpus::prisoners_dilemma();
  std::vector<std::vector<Rational>> pay;
  for (int f = 0; f < pd.profile_count(); ++f) {
    auto v = pd.payoff_flat(f);
    v[0] = v[0] * Rational(7, 3) + Rational(11);
    pay.push_back(v);
  }
  Game scaled({{"C1", "D1"}, {"C2", "D2"}}, pay);
  for (int f = 0; f < pd.profile_count(); ++f) {
    auto a = pd.profile_at(f);
    CHECK(is_nash(pd, MixedProfile::pure(pd, a)) == is_nash(scaled, MixedProfile::pure(scaled, a)));
  }
}
