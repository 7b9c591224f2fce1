#include <random>

#include "doctest.h"
#include "generators.hpp"
#include "prefstab/corpus.hpp"
#include "prefstab/equilibrium.hpp"
#include "prefstab/stability.hpp"

using namespace prefstab;
using testgen::random_game;
using testgen::random_strategy;

TEST_CASE("multilinearity and product/correlated consistency on random games") {
  std::mt19937 rng(20260811);
  for (int trial = 0; trial < 200; ++trial) {
    Game g = random_game(rng);
    MixedProfile p;
    for (int i = 0; i < g.players(); ++i) p.strategies.push_back(random_strategy(rng, g.actions(i)));
    // Product vs induced correlated evaluation.
    CHECK(expected_payoff(g, p) == expected_payoff(g, induced_correlated(g, p)));
    // Multilinearity in a random player's strategy.
    int player = static_cast<int>(rng() % g.players());
    MixedStrategy s1 = random_strategy(rng, g.actions(player));
    MixedStrategy s2 = random_strategy(rng, g.actions(player));
    Rational lambda(static_cast<int>(rng() % 12), 12);
    MixedProfile pa = p, pb = p, blend = p;
    pa.strategies[player] = s1;
    pb.strategies[player] = s2;
    for (int a = 0; a < g.actions(player); ++a)
      blend.strategies[player][a] = lambda * s1[a] + (1 - lambda) * s2[a];
    for (int i = 0; i < g.players(); ++i)
      CHECK(expected_payoff(g, i, blend) ==
            lambda * expected_payoff(g, i, pa) + (1 - lambda) * expected_payoff(g, i, pb));
  }
}

TEST_CASE("balanced blind configurations equate type fitness with the aggregate payoff") {
  std::mt19937 rng(424242);
  int built = 0;
  while (built < 100) {
    Game g = random_game(rng);
    // Balanced construction: every type in a population plays the same
    // strategy (types are distinct affine rescalings of a common base), so
    // average fitness is constant per population by construction.
    Configuration c;
    c.game = g;
    c.regime = Regime::kP0;
    StrategyFunctionUnobservable s;
    bool ok = true;
    for (int i = 0; i < g.players(); ++i) {
      std::uniform_int_distribution<int> ntypes(1, 3);
      int k = ntypes(rng);
      Population pop;
      std::uniform_int_distribution<int> act(0, g.actions(i) - 1);
      int dominant = act(rng);
      for (int t = 0; t < k; ++t) {
        PreferenceType type = dominant_action_type(g, i, dominant);
        for (auto& u : type.utilities) u = u * (t + 1) + t;  // distinct affine copies
        type.name = "copy" + std::to_string(t);
        pop.types.push_back(type);
      }
      std::vector<Rational> shares(k, Rational(1, k));
      pop.shares = shares;
      MixedStrategy pure(g.actions(i), Rational(0));
      pure[dominant] = 1;
      s.by_pop_type.push_back(std::vector<MixedStrategy>(k, pure));
      c.mu.pops.push_back(pop);
      ok = ok && !pop.types.empty();
    }
    c.s = s;
    if (!ok || !validate_configuration(c).ok) continue;
    ++built;
    REQUIRE(is_balanced(c));
    auto agg = aggregate_outcome(c);
    for (int i = 0; i < g.players(); ++i) {
      Rational direct = expected_payoff(g, i, *agg.product);
      for (int t = 0; t < c.mu.type_count(i); ++t) CHECK(average_fitness(c, i, t) == direct);
    }
  }
}

TEST_CASE("observation-status weights sum to one") {
  // Symbolically: sum over T of p^(n-|T|) (1-p)^|T| collapses to 1.
  for (int n = 2; n <= 4; ++n) {
    Poly p = Poly::variable(1, 0);
    Poly one = Poly::constant(1, 1);
    Poly total(1);
    for (int mask = 0; mask < (1 << n); ++mask) {
      Poly w = Poly::constant(1, 1);
      for (int j = 0; j < n; ++j) w *= (mask & (1 << j)) ? (one - p) : p;
      total += w;
    }
    CHECK(total == Poly::constant(1, 1));
  }
  // And at 20 sampled rational degrees of observability.
  std::mt19937 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    Rational p(1 + static_cast<int>(rng() % 11), 12);
    Rational total = 0;
    int n = 3;
    for (int mask = 0; mask < (1 << n); ++mask) {
      Rational w = 1;
      for (int j = 0; j < n; ++j) w *= (mask & (1 << j)) ? (1 - p) : p;
      total += w;
    }
    CHECK(total == 1);
  }
}

TEST_CASE("partial formulas recover the extreme regimes symbolically") {
  for (auto c : {corpus::ex6_configuration(Regime::kPartial, Rational(1, 2)),
                 corpus::ex2_configuration_high(Regime::kPartial, Rational(1, 3))}) {
    Configuration p1 = c;
    p1.regime = Regime::kP1;
    p1.p = 0;
    p1.s.reset();
    Configuration p0 = c;
    p0.regime = Regime::kP0;
    p0.p = 0;
    p0.b.reset();
    for (int i = 0; i < c.game.players(); ++i)
      for (int t = 0; t < c.mu.type_count(i); ++t) {
        Poly fit = average_fitness_observability_poly(c, i, t);
        CHECK(fit.eval({Rational(1)}) == average_fitness(p1, i, t));
        CHECK(fit.eval({Rational(0)}) == average_fitness(p0, i, t));
      }
  }
}

TEST_CASE("every corpus certificate re-verifies at three sampled share vectors") {
  StabilityOptions options;
  std::vector<Configuration> configs;
  configs.push_back(corpus::ex2_configuration_low(Regime::kP1));
  configs.push_back(corpus::ex3_configuration());
  configs.push_back(corpus::ex4_configuration());
  configs.push_back(corpus::ex6_configuration(Regime::kPartial, Rational(1, 2)));
  for (auto& c : configs) {
    auto verdict = check_stability(c, options);
    REQUIRE(verdict.kind == VerdictKind::kUnstable);
    REQUIRE(verdict.certificate.has_value());
    const auto& cert = *verdict.certificate;
    CHECK(certificate_valid(c, cert));
    Rational bound = cert.region.bound;
    for (auto frac : {Rational(1, 7), Rational(1, 2), Rational(9, 11)}) {
      Rational t = bound * frac;
      std::map<int, Rational> shares;
      std::vector<Rational> point(c.game.players(), Rational(0));
      for (int j : cert.mutants.coalition) {
        shares[j] = t;
        point[j] = t;
      }
      Configuration post = materialize_post_entry(c, cert.mutants, cert.assignment, shares);
      CHECK(validate_configuration(post).ok);
      for (auto& d : cert.diffs) {
        Rational mutant = average_fitness(post, d.population, c.mu.type_count(d.population));
        Rational incumbent = average_fitness(post, d.population, d.incumbent_type);
        CHECK(mutant - incumbent == d.diff.eval(point));
      }
    }
  }
}
