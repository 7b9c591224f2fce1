#include "doctest.h"
#include "prefstab/corpus.hpp"

using namespace prefstab;

TEST_CASE("type tags are validated claims") {
  Game pd = corpus::prisoners_dilemma();
  CHECK(utilities_materialist(pd, 0, materialist_type(pd, 0).utilities));
  // affine copy
  std::vector<Rational> affine;
  for (int f = 0; f < pd.profile_count(); ++f) affine.push_back(pd.payoff_flat(f)[0] * 3 + Rational(1, 2));
  CHECK(utilities_materialist(pd, 0, affine));
  std::vector<Rational> flipped;
  for (int f = 0; f < pd.profile_count(); ++f) flipped.push_back(-pd.payoff_flat(f)[0]);
  CHECK_FALSE(utilities_materialist(pd, 0, flipped));
  CHECK(utilities_indifferent(indifferent_type(pd, 0).utilities));

  PreferenceType bogus = indifferent_type(pd, 0);
  bogus.utilities[0] = 1;  // no longer constant but still tagged
  Population pop;
  pop.types = {bogus};
  pop.shares = {Rational(1)};
  PreferenceDistribution mu;
  mu.pops = {pop, pop};
  mu.pops[1].types[0].role = 1;
  CHECK_THROWS_AS(check_distribution(pd, mu), StructuralError);
}

TEST_CASE("distribution invariants") {
  Game pd = corpus::prisoners_dilemma();
  PreferenceDistribution mu;
  for (int i = 0; i < 2; ++i) {
    Population pop;
    pop.types = {materialist_type(pd, i)};
    pop.shares = {Rational(1, 2)};  // does not sum to 1
    mu.pops.push_back(pop);
  }
  CHECK_THROWS_AS(check_distribution(pd, mu), StructuralError);
}

TEST_CASE("observable configuration validates and aggregates") {
  Configuration c = corpus::ex1_configuration();
  auto report = validate_configuration(c);
  CHECK(report.ok);
  auto agg = aggregate_outcome(c);
  // Point mass on (Faithful, Fast), flat index 1.
  for (int f = 0; f < c.game.profile_count(); ++f)
    CHECK(agg.correlated.weights[f] == (f == c.game.flat_index({0, 1}) ? Rational(1) : Rational(0)));
  CHECK(average_fitness(c, 0, 0) == Rational(5));
  CHECK(average_fitness(c, 1, 0) == Rational(5));
  CHECK(is_balanced(c));
}

TEST_CASE("equilibrium violations are reported not thrown") {
  Game pd = corpus::prisoners_dilemma();
  Configuration c;
  c.game = pd;
  for (int i = 0; i < 2; ++i) {
    Population pop;
    pop.types = {materialist_type(pd, i)};
    pop.shares = {Rational(1)};
    c.mu.pops.push_back(pop);
  }
  c.regime = Regime::kP0;
  StrategyFunctionUnobservable s;
  s.by_pop_type = {{MixedStrategy{Rational(1), Rational(0)}}, {MixedStrategy{Rational(1), Rational(0)}}};
  c.s = s;  // cooperation is not a best response for materialists
  auto report = validate_configuration(c);
  CHECK_FALSE(report.ok);
  REQUIRE_FALSE(report.violations.empty());
  CHECK(report.violations[0].deviation == 1);  // defecting is profitable
}

TEST_CASE("bayesian configuration of the mixed coordination example") {
  Configuration c = corpus::ex5_configuration();
  CHECK(validate_configuration(c).ok);
  auto agg = aggregate_outcome(c);
  REQUIRE(agg.product.has_value());
  CHECK(agg.product->strategies[0] == MixedStrategy{Rational(1, 2), Rational(1, 2), Rational(0)});
  CHECK(agg.correlated.weights == induced_correlated(c.game, *agg.product).weights);
  CHECK(is_balanced(c));
  CHECK(average_fitness(c, 0, 0) == Rational(3));
}

TEST_CASE("partial-regime fitness matches the extreme regimes at p in {0,1}") {
  Configuration c = corpus::ex6_configuration(Regime::kPartial, Rational(1, 2));
  CHECK(validate_configuration(c).ok);
  Poly fit = average_fitness_observability_poly(c, 0, 0);
  Configuration p1 = corpus::ex6_configuration(Regime::kP1);
  Configuration p0 = corpus::ex6_configuration(Regime::kP0);
  CHECK(fit.eval({Rational(1)}) == average_fitness(p1, 0, 0));
  CHECK(fit.eval({Rational(0)}) == average_fitness(p0, 0, 0));
  // And the mid-p value agrees with the partial-regime computation.
  CHECK(fit.eval({Rational(1, 2)}) == average_fitness(c, 0, 0));
}

TEST_CASE("post-entry distribution arithmetic") {
  Game pd = corpus::prisoners_dilemma();
  Configuration c = corpus::ex6_configuration(Regime::kP0);
  MutantSubProfile m;
  m.coalition = {0};
  m.types.emplace(0, indifferent_type(pd, 0));
  m.shares.emplace(0, Rational(1, 10));
  auto post = post_entry(pd, c.mu, m);
  CHECK(post.pops[0].shares == std::vector<Rational>{Rational(9, 10), Rational(1, 10)});
  CHECK(post.pops[1].shares == std::vector<Rational>{Rational(1)});

  MutantSubProfile empty;
  CHECK_THROWS_AS(post_entry(pd, c.mu, empty), StructuralError);

  MutantSubProfile dup;
  dup.coalition = {0};
  dup.types.emplace(0, materialist_type(pd, 0));  // coincides with the incumbent
  dup.shares.emplace(0, Rational(1, 10));
  CHECK_THROWS_AS(post_entry(pd, c.mu, dup), StructuralError);

  // Joint support weight of the double entry: product of the marginals.
  Configuration ex1 = corpus::ex1_configuration();
  MutantSubProfile both;
  both.coalition = {0, 1};
  both.types.emplace(0, indifferent_type(ex1.game, 0));
  both.types.emplace(1, indifferent_type(ex1.game, 1));
  both.shares.emplace(0, Rational(1, 100));
  both.shares.emplace(1, Rational(1, 100));
  auto post2 = post_entry(ex1.game, ex1.mu, both);
  Rational joint = post2.pops[0].shares[1] * post2.pops[1].shares[1];
  CHECK(joint == Rational(1, 10000));
  CHECK(post2.pops[0].shares[0] + post2.pops[0].shares[1] == 1);
}

TEST_CASE("balancedness catches unequal replies") {
  // Two types in population 1 playing different pure strategies of different
  // value against the opponent mixture.
  Game g({{"L", "R"}, {"l", "r"}},
         {{Rational(3), Rational(1)}, {Rational(3), Rational(0)},
          {Rational(0), Rational(1)}, {Rational(1), Rational(0)}});
  Configuration c;
  c.game = g;
  Population pop0;
  pop0.types = {dominant_action_type(g, 0, 0), dominant_action_type(g, 0, 1)};
  pop0.shares = {Rational(1, 2), Rational(1, 2)};
  Population pop1;
  pop1.types = {dominant_action_type(g, 1, 0)};
  pop1.shares = {Rational(1)};
  c.mu.pops = {pop0, pop1};
  c.regime = Regime::kP0;
  StrategyFunctionUnobservable s;
  s.by_pop_type = {{MixedStrategy{Rational(1), Rational(0)}, MixedStrategy{Rational(0), Rational(1)}},
                   {MixedStrategy{Rational(1), Rational(0)}}};
  c.s = s;
  CHECK(validate_configuration(c).ok);
  CHECK_FALSE(is_balanced(c));  // 3 vs 0 against l
}
