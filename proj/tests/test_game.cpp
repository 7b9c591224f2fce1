#include "doctest.h"
#include "prefstab/corpus.hpp"
#include "prefstab/game.hpp"

using namespace prefstab;

TEST_CASE("pure payoffs read straight from the tensor") {
  Game g = corpus::battle_of_sexes();
  // (Faithful, Fast) -> (5, 5)
  auto v = expected_payoff(g, MixedProfile::pure(g, {0, 1}));
  CHECK(v == std::vector<Rational>{Rational(5), Rational(5)});
  // degenerate multilinear case: any pure profile returns its tensor entry
  CHECK(expected_payoff(g, MixedProfile::pure(g, {1, 0})) ==
        std::vector<Rational>{Rational(0), Rational(0)});
}

TEST_CASE("mixed expected payoff matches the hand sum") {
  Game g = corpus::coordination_3x3();
  MixedProfile p;
  p.strategies = {{Rational(1, 2), Rational(1, 2), Rational(0)},
                  {Rational(1, 2), Rational(1, 2), Rational(0)}};
  // Oracle: four support entries, (4+2+2+4)/4 = 3 for each player.
  Rational oracle = (Rational(4) + Rational(2) + Rational(2) + Rational(4)) / 4;
  auto v = expected_payoff(g, p);
  CHECK(v[0] == oracle);
  CHECK(v[1] == oracle);
  CHECK(oracle == Rational(3));
}

TEST_CASE("coalition payoff sums") {
  Game g = corpus::three_player_2x2();
  CHECK(coalition_payoff_sum(g, {0, 1}, MixedProfile::pure(g, {0, 0, 0})) == Rational(14));
  CHECK(coalition_payoff_sum(g, {0, 1}, MixedProfile::pure(g, {0, 1, 0})) == Rational(15));
  // Singleton coalition equals the player's own expected payoff.
  CHECK(coalition_payoff_sum(g, {2}, MixedProfile::pure(g, {0, 1, 0})) ==
        expected_payoff(g, 2, MixedProfile::pure(g, {0, 1, 0})));
  CHECK_THROWS_AS(coalition_payoff_sum(g, {}, MixedProfile::pure(g, {0, 0, 0})), StructuralError);
}

TEST_CASE("multilinearity in one player's strategy") {
  Game g = corpus::prisoners_dilemma();
  MixedProfile base;
  base.strategies = {{Rational(1), Rational(0)}, {Rational(1, 3), Rational(2, 3)}};
  MixedStrategy s1{Rational(1), Rational(0)};
  MixedStrategy s2{Rational(0), Rational(1)};
  Rational lambda(2, 7);
  MixedProfile blend = base;
  for (int a = 0; a < 2; ++a) blend.strategies[0][a] = lambda * s1[a] + (1 - lambda) * s2[a];
  MixedProfile p1 = base, p2 = base;
  p1.strategies[0] = s1;
  p2.strategies[0] = s2;
  for (int i = 0; i < 2; ++i)
    CHECK(expected_payoff(g, i, blend) ==
          lambda * expected_payoff(g, i, p1) + (1 - lambda) * expected_payoff(g, i, p2));
}

TEST_CASE("product and correlated evaluations agree") {
  Game g = corpus::three_player_3x3();
  MixedProfile p;
  p.strategies = {{Rational(1, 2), Rational(1, 3), Rational(1, 6)},
                  {Rational(0), Rational(2, 5), Rational(3, 5)},
                  {Rational(1, 4), Rational(1, 4), Rational(1, 2)}};
  CHECK(expected_payoff(g, p) == expected_payoff(g, induced_correlated(g, p)));
}

TEST_CASE("consistent label permutation leaves values unchanged") {
  Game g = corpus::coordination_2x2();
  // Swap player 2's actions in both the labels and the tensor.
  std::vector<std::vector<Rational>> pay(4);
  Game swapped({{"a11", "a12"}, {"a22", "a21"}},
               {g.payoff({0, 1}), g.payoff({0, 0}), g.payoff({1, 1}), g.payoff({1, 0})});
  MixedProfile p;
  p.strategies = {{Rational(1, 3), Rational(2, 3)}, {Rational(1, 4), Rational(3, 4)}};
  MixedProfile q = p;
  std::swap(q.strategies[1][0], q.strategies[1][1]);
  CHECK(expected_payoff(g, p) == expected_payoff(swapped, q));
}

TEST_CASE("structural validation") {
  Game g = corpus::prisoners_dilemma();
  MixedProfile bad;
  bad.strategies = {{Rational(1, 2), Rational(1, 2)}, {Rational(1, 2), Rational(1, 3)}};
  CHECK_THROWS_AS(expected_payoff(g, bad), StructuralError);
  MixedProfile neg;
  neg.strategies = {{Rational(3, 2), Rational(-1, 2)}, {Rational(1), Rational(0)}};
  CHECK_THROWS_AS(expected_payoff(g, neg), StructuralError);
  CHECK_THROWS_AS(Game({{"x"}}, {{Rational(0)}}), StructuralError);  // one player
  GameLimits caps;
  caps.max_actions = 1;
  CHECK_THROWS_AS(Game({{"a", "b"}, {"c"}},
                       {std::vector<Rational>{Rational(0), Rational(0)},
                        std::vector<Rational>{Rational(0), Rational(0)}},
                       caps),
                  StructuralError);
}
