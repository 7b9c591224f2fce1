#include "doctest.h"
#include "prefstab/corpus.hpp"
#include "prefstab/efficiency.hpp"
#include "prefstab/equilibrium.hpp"

using namespace prefstab;

TEST_CASE("dominance relation") {
  Game g = corpus::coordination_2x2();
  CHECK(dominance_relation(g, MixedProfile::pure(g, {1, 1}), MixedProfile::pure(g, {0, 0})) ==
        Dominance::kWeak);
  CHECK(dominance_relation(g, MixedProfile::pure(g, {0, 0}), MixedProfile::pure(g, {0, 0})) ==
        Dominance::kNone);
  Game pd = corpus::prisoners_dilemma();
  CHECK(dominance_relation(pd, MixedProfile::pure(pd, {0, 0}), MixedProfile::pure(pd, {1, 1})) ==
        Dominance::kStrong);
}

TEST_CASE("efficiency of the cooperative dilemma profile") {
  Game pd = corpus::prisoners_dilemma();
  // LP oracle cross-check: any correlated strategy with both payoffs >= 2
  // puts all mass on (C1,C2), so the weak-dominance slack must be zero.
  CHECK(correlated_dominance_slack(pd, {Rational(2), Rational(2)}) == 0);
  auto res = efficiency_status(pd, MixedProfile::pure(pd, {0, 0}), 10);
  CHECK(res.verdict == EfficiencyVerdict::kParetoEfficient);
  // Exhaustive pure-profile confirmation of phase-1 soundness.
  for (int f = 0; f < pd.profile_count(); ++f)
    CHECK(dominance_relation(pd, MixedProfile::pure(pd, pd.profile_at(f)),
                             MixedProfile::pure(pd, {0, 0})) == Dominance::kNone);
}

TEST_CASE("weakly efficient but dominated profile") {
  Game g = corpus::coordination_2x2();
  auto res = efficiency_status(g, MixedProfile::pure(g, {0, 0}), 10);
  CHECK(res.verdict == EfficiencyVerdict::kWeaklyEfficientOnly);
  CHECK(res.weakly_efficient);
  REQUIRE(res.dominator.has_value());
  CHECK(res.dominator_kind == Dominance::kWeak);
  CHECK(res.dominator->as_pure() == PureProfile{1, 1});
  CHECK(dominance_relation(g, *res.dominator, MixedProfile::pure(g, {0, 0})) == Dominance::kWeak);
}

TEST_CASE("strongly dominated profile") {
  Game pd = corpus::prisoners_dilemma();
  auto res = efficiency_status(pd, MixedProfile::pure(pd, {1, 1}), 10);
  CHECK(res.verdict == EfficiencyVerdict::kDominated);
  REQUIRE(res.dominator.has_value());
  CHECK(res.dominator_kind == Dominance::kStrong);
  CHECK(res.dominator->as_pure() == PureProfile{0, 0});
  CHECK_FALSE(res.weakly_efficient);
}

TEST_CASE("uniform payoff shift preserves the verdict") {
  Game pd = corpus::prisoners_dilemma();
  std::vector<std::vector<Rational>> pay;
  for (int f = 0; f < pd.profile_count(); ++f) {
    auto v = pd.payoff_flat(f);
    for (auto& x : v) x += Rational(9, 2);
    pay.push_back(v);
  }
  Game shifted({{"C1", "D1"}, {"C2", "D2"}}, pay);
  for (int f = 0; f < pd.profile_count(); ++f) {
    auto a = pd.profile_at(f);
    CHECK(efficiency_status(pd, MixedProfile::pure(pd, a), 4).verdict ==
          efficiency_status(shifted, MixedProfile::pure(shifted, a), 4).verdict);
  }
}

TEST_CASE("certificates re-verify and phase-1 agrees with pure search on desk games") {
  for (auto game : {corpus::battle_of_sexes(), corpus::coordination_2x2(), corpus::prisoners_dilemma(),
                    corpus::coordination_3x3(), corpus::nongeneric_2x3()}) {
    for (int f = 0; f < game.profile_count(); ++f) {
      auto sigma = MixedProfile::pure(game, game.profile_at(f));
      auto res = efficiency_status(game, sigma, 6);
      if (res.dominator)
        CHECK(dominance_relation(game, *res.dominator, sigma) != Dominance::kNone);
      if (res.verdict == EfficiencyVerdict::kParetoEfficient) {
        for (int f2 = 0; f2 < game.profile_count(); ++f2)
          CHECK(dominance_relation(game, MixedProfile::pure(game, game.profile_at(f2)), sigma) ==
                Dominance::kNone);
      }
    }
  }
}
