#include "doctest.h"
#include "prefstab/corpus.hpp"
#include "prefstab/equilibrium.hpp"
#include "prefstab/stability.hpp"

using namespace prefstab;

namespace {

MutantSubProfile full_indifferent(const Configuration& c) {
  MutantSubProfile m;
  for (int j = 0; j < c.game.players(); ++j) {
    m.coalition.push_back(j);
    m.types.emplace(j, indifferent_type(c.game, j));
    m.shares.emplace(j, Rational(1, 100));
  }
  return m;
}

// The three-player example assignments as listed in the source material;
// member profile entries use K_j (=1) for the mutant slot.
MutantAssignment ex3_paper_assignment(const Configuration& c) {
  const Game& g = c.game;
  MutantAssignment a;
  auto pure = [&](int x, int y, int z) { return MixedProfile::pure(g, {x, y, z}); };
  a.b_entries[{1, 0, 0}] = pure(0, 0, 0);
  a.b_entries[{0, 1, 0}] = pure(0, 0, 0);
  a.b_entries[{0, 0, 1}] = pure(0, 0, 0);
  a.b_entries[{1, 1, 0}] = pure(1, 1, 0);  // mutants 1,2 coordinate on (a12,a22)
  a.b_entries[{1, 0, 1}] = pure(2, 0, 1);  // mutants 1,3 on (a13,.,a32)
  a.b_entries[{0, 1, 1}] = pure(0, 2, 2);  // mutants 2,3 on (.,a23,a33)
  a.b_entries[{1, 1, 1}] = pure(0, 0, 0);
  return a;
}

MutantAssignment ex4_paper_assignment(const Configuration& c) {
  const Game& g = c.game;
  MutantAssignment a;
  auto pure = [&](int x, int y, int z) { return MixedProfile::pure(g, {x, y, z}); };
  a.b_entries[{1, 0, 0}] = pure(0, 0, 0);
  a.b_entries[{0, 1, 0}] = pure(0, 0, 0);
  a.b_entries[{0, 0, 1}] = pure(0, 0, 0);
  a.b_entries[{1, 1, 0}] = pure(0, 1, 0);  // (a11,a22,[a31])
  a.b_entries[{1, 0, 1}] = pure(1, 0, 0);  // (a12,[a21],a31)
  a.b_entries[{0, 1, 1}] = pure(0, 0, 1);  // ([a11],a21,a32)
  a.b_entries[{1, 1, 1}] = pure(0, 0, 0);
  return a;
}

Poly paper_poly_7e2(const Configuration& c, int j, int k) {
  return Poly::variable(c.game.players(), j) * Poly::variable(c.game.players(), k).scaled(7);
}

}  // namespace

TEST_CASE("three-player secret-handshake polynomials match the listed assignment") {
  Configuration c = corpus::ex3_configuration();
  auto mutants = full_indifferent(c);
  auto diffs = fitness_diff_polynomials(c, mutants, ex3_paper_assignment(c));
  REQUIRE(diffs.size() == 3);
  CHECK(diffs[0].diff == paper_poly_7e2(c, 1, 2));
  CHECK(diffs[1].diff == paper_poly_7e2(c, 0, 2));
  CHECK(diffs[2].diff == paper_poly_7e2(c, 0, 1));
  for (auto& d : diffs) {
    auto diag = d.diff.restrict_to_diagonal();
    REQUIRE(diag.size() == 3);
    CHECK(diag[2] == 7);  // exactly 7 t^2 under equal shares
  }
}

TEST_CASE("averaged advantage polynomials of the two-action three-player game") {
  Configuration c = corpus::ex4_configuration();
  auto mutants = full_indifferent(c);
  auto diffs = fitness_diff_polynomials(c, mutants, ex4_paper_assignment(c));
  REQUIRE(diffs.size() == 3);
  for (auto& d : diffs) {
    auto diag = d.diff.restrict_to_diagonal();
    REQUIRE(diag.size() == 3);
    CHECK(diag[0] == 0);
    CHECK(diag[1] == 1);  // eps + 6 eps^2
    CHECK(diag[2] == 6);
  }
}

TEST_CASE("mimicking mutants produce the zero polynomial") {
  Configuration c = corpus::ex3_configuration();
  auto mutants = full_indifferent(c);
  MutantAssignment mimic;
  for (auto& [key, prof] : ex3_paper_assignment(c).b_entries)
    mimic.b_entries[key] = MixedProfile::pure(c.game, {0, 0, 0});
  auto diffs = fitness_diff_polynomials(c, mutants, mimic);
  for (auto& d : diffs) CHECK(d.diff.is_zero());
}

TEST_CASE("stability of the three-player examples with certificates") {
  StabilityOptions options;
  Configuration ex3 = corpus::ex3_configuration();
  auto v3 = check_stability(ex3, options);
  REQUIRE(v3.kind == VerdictKind::kUnstable);
  REQUIRE(v3.certificate.has_value());
  CHECK(v3.certificate->assignment.b_entries == ex3_paper_assignment(ex3).b_entries);
  for (auto& d : v3.certificate->diffs) {
    auto diag = d.diff.restrict_to_diagonal();
    REQUIRE(diag.size() == 3);
    CHECK(diag[2] == 7);
  }
  CHECK(certificate_valid(ex3, *v3.certificate));

  Configuration ex4 = corpus::ex4_configuration();
  auto v4 = check_stability(ex4, options);
  REQUIRE(v4.kind == VerdictKind::kUnstable);
  REQUIRE(v4.certificate.has_value());
  CHECK(v4.certificate->assignment.b_entries == ex4_paper_assignment(ex4).b_entries);
  CHECK(certificate_valid(ex4, *v4.certificate));
}

TEST_CASE("certificates re-verify against direct post-entry fitness") {
  Configuration c = corpus::ex4_configuration();
  auto mutants = full_indifferent(c);
  auto assignment = ex4_paper_assignment(c);
  auto diffs = fitness_diff_polynomials(c, mutants, assignment);
  for (auto eps : {Rational(1, 10), Rational(1, 100), Rational(3, 7)}) {
    std::map<int, Rational> shares{{0, eps}, {1, eps}, {2, eps}};
    Configuration post = materialize_post_entry(c, mutants, assignment, shares);
    for (auto& d : diffs) {
      Rational direct = average_fitness(post, d.population, 1) - average_fitness(post, d.population, 0);
      CHECK(direct == d.diff.eval({eps, eps, eps}));
    }
  }
}

TEST_CASE("coordination game: dominated outcome falls to the handshake invader") {
  StabilityOptions options;
  Configuration low = corpus::ex2_configuration_low(Regime::kP1);
  auto verdict = check_stability(low, options);
  REQUIRE(verdict.kind == VerdictKind::kUnstable);
  REQUIRE(verdict.certificate.has_value());
  // Theorem-003-style certificate: coordinated entrants reach (a12,a22).
  auto& cert = *verdict.certificate;
  CHECK(cert.assignment.b_entries.at({1, 1}).as_pure() == PureProfile{1, 1});
  REQUIRE(cert.diffs.size() == 2);
  CHECK(cert.diffs[0].diff.is_zero());
  Poly expected = Poly::variable(2, 0).scaled(5);
  CHECK(cert.diffs[1].diff == expected);

  std::vector<int> both{0, 1};
  auto found = find_invader(low, both, options);
  REQUIRE(found.has_value());
  CHECK(certificate_valid(low, *found));

  Configuration high = corpus::ex2_configuration_high(Regime::kP1);
  auto sv = check_stability(high, options);
  CHECK(sv.kind == VerdictKind::kStable);
  CHECK(sv.route == "aggregate-strong-nash");
  for (auto p : {Rational(1, 10), Rational(1, 2), Rational(9, 10)}) {
    Configuration partial = corpus::ex2_configuration_high(Regime::kPartial, p);
    CHECK(check_stability(partial, options).kind == VerdictKind::kStable);
  }
}

TEST_CASE("the bounding route reproduces the courtship barrier") {
  Configuration c = corpus::ex1_configuration();
  StabilityOptions options;
  auto verdict = check_stability(c, options);
  REQUIRE(verdict.kind == VerdictKind::kStable);
  REQUIRE(verdict.bounds.has_value());
  auto& b = *verdict.bounds;
  CHECK(b.defended == 0);
  // Floor 5(1-e2), ceilings 2q(1-e2) + 15 e2 on the grid of male strategies.
  Poly e2 = Poly::variable(2, 1);
  CHECK(b.incumbent_floor == (Poly::constant(2, 1) - e2).scaled(5));
  bool saw_mimic = false;
  for (auto& pt : b.grid) {
    Rational q = pt.sigma[0];
    CHECK(pt.per_match_value == 2 * q);
    CHECK(pt.ceiling == (Poly::constant(2, 1) - e2).scaled(2 * q) + e2.scaled(15));
    REQUIRE(pt.threshold.has_value());
    CHECK(*pt.threshold == (5 - 2 * q) / (20 - 2 * q));
    CHECK(*pt.threshold >= Rational(3, 18));
    if (q == 1) {
      saw_mimic = true;
      CHECK(*pt.threshold == Rational(3, 18));
    }
  }
  CHECK(saw_mimic);
  CHECK(b.barrier == Rational(3, 18));
  CHECK(uniform_invasion_barrier(c, verdict) == Rational(3, 18));
  // No invader exists at the default caps.
  for (auto& coalition : nonempty_subsets(2)) CHECK_FALSE(find_invader(c, coalition, options).has_value());
}

TEST_CASE("dilemma: stable blind, unstable under any observability") {
  StabilityOptions options;
  Configuration blind = corpus::ex6_configuration(Regime::kP0);
  auto v0 = check_stability(blind, options);
  CHECK(v0.kind == VerdictKind::kStable);
  CHECK(v0.route == "materialist");

  for (auto p : {Rational(1, 100), Rational(1, 2), Rational(99, 100)}) {
    Configuration partial = corpus::ex6_configuration(Regime::kPartial, p);
    auto v = check_stability(partial, options);
    REQUIRE(v.kind == VerdictKind::kUnstable);
    REQUIRE(v.certificate.has_value());
    // Advantage polynomial is exactly eps * p for each entrant.
    for (auto& d : v.certificate->diffs) {
      int other = 1 - d.population;
      CHECK(d.diff == Poly::variable(2, other).scaled(p));
    }
    CHECK(certificate_valid(partial, *v.certificate));
  }
}

TEST_CASE("observability thresholds for the dilemma") {
  Configuration c = corpus::ex6_configuration(Regime::kPartial, Rational(1, 2));
  auto th = observability_thresholds(c, {1, 1}, MixedProfile::pure(c.game, {0, 0}), std::nullopt);
  REQUIRE(th.p_bar_high.has_value());
  CHECK(*th.p_bar_high == 0);
  REQUIRE(th.advantage_polys_high.size() == 2);
  // p^2 + 2p(1-p) - p(1-p) = p
  CHECK(th.advantage_polys_high[0] == Poly::variable(1, 0));
  CHECK(th.advantage_polys_high[1] == Poly::variable(1, 0));
}

TEST_CASE("threshold premise failures are structural errors") {
  Configuration c = corpus::ex2_configuration_low(Regime::kPartial, Rational(1, 2));
  // No profile strongly dominates (a11,a21): max pi_1 is 5.
  CHECK_THROWS_AS(
      observability_thresholds(c, {0, 0}, MixedProfile::pure(c.game, {1, 1}), std::nullopt),
      StructuralError);
  CHECK_THROWS_AS(observability_thresholds(c, {0, 0}, std::nullopt, std::make_pair(0, 1)),
                  StructuralError);
}

TEST_CASE("nearby equilibrium reproduces the rebalancing formulas") {
  Configuration c = corpus::ex5_configuration();
  for (auto eps : {Rational(1, 10), Rational(1, 4)}) {
    for (auto q : {std::pair{Rational(1, 3), Rational(1, 3)}, std::pair{Rational(0), Rational(0)},
                   std::pair{Rational(1, 2), Rational(1, 4)}}) {
      MutantSubProfile m;
      m.coalition = {0, 1};
      m.types.emplace(0, indifferent_type(c.game, 0));
      m.types.emplace(1, indifferent_type(c.game, 1));
      m.shares.emplace(0, eps);
      m.shares.emplace(1, eps);
      MixedStrategy mq{q.first, q.second, 1 - q.first - q.second};
      auto res = nearby_equilibrium(c, m, {{0, mq}, {1, mq}});
      REQUIRE(res.has_value());
      for (int j = 0; j < 2; ++j) {
        const MixedStrategy& adj = res->assignment.s_incumbent.at({j, 0});
        Rational expected_first = (1 - eps * (1 + q.first - q.second)) / (2 * (1 - eps));
        CHECK(adj[0] == expected_first);
        CHECK(adj[2] == 0);
        CHECK(adj[0] + adj[1] == 1);
      }
    }
  }
  // eps -> tiny recovers the original strategy in the limit: distance shrinks.
  MutantSubProfile tiny;
  tiny.coalition = {0};
  tiny.types.emplace(0, indifferent_type(c.game, 0));
  tiny.shares.emplace(0, Rational(1, 1000));
  MixedStrategy dev{Rational(1), Rational(0), Rational(0)};
  auto res = nearby_equilibrium(c, tiny, {{0, dev}});
  REQUIRE(res.has_value());
  CHECK(res->distance_sq <= Rational(1, 100000));
}

TEST_CASE("far-from-original equilibria are genuine but excluded by the distance barrier") {
  Configuration c = corpus::ex5_configuration();
  for (auto eps : {Rational(1, 10), Rational(1, 3), Rational(9, 10)}) {
    MutantSubProfile m;
    m.coalition = {0, 1};
    m.types.emplace(0, corpus::ex5_divergence_mutant(0));
    m.types.emplace(1, corpus::ex5_divergence_mutant(1));
    m.shares.emplace(0, eps);
    m.shares.emplace(1, eps);
    MutantAssignment a;
    a.s_mutant[0] = MixedStrategy{Rational(1, 2), Rational(0), Rational(1, 2)};
    a.s_mutant[1] = MixedStrategy{Rational(1, 2), Rational(0), Rational(1, 2)};
    a.s_incumbent[{0, 0}] = MixedStrategy{Rational(1), Rational(0), Rational(0)};
    a.s_incumbent[{1, 0}] = MixedStrategy{Rational(1), Rational(0), Rational(0)};
    Configuration post = materialize_post_entry(c, m, a, {});
    CHECK(validate_configuration(post).ok);
  }
}

TEST_CASE("degenerate game and balance short-circuits") {
  Game trivial({{"only"}, {"sole"}}, {{Rational(1), Rational(1)}});
  Configuration c;
  c.game = trivial;
  for (int i = 0; i < 2; ++i) {
    Population pop;
    pop.types = {materialist_type(trivial, i)};
    pop.shares = {Rational(1)};
    c.mu.pops.push_back(pop);
  }
  c.regime = Regime::kP0;
  StrategyFunctionUnobservable s;
  s.by_pop_type = {{MixedStrategy{Rational(1)}}, {MixedStrategy{Rational(1)}}};
  c.s = s;
  StabilityOptions options;
  auto v = check_stability(c, options);
  CHECK(v.kind == VerdictKind::kStable);
  CHECK(uniform_invasion_barrier(c, v) == Rational(1));

  // Unbalanced configurations are unstable by definition.
  Game g({{"L", "R"}, {"l", "r"}},
         {{Rational(3), Rational(1)}, {Rational(3), Rational(0)},
          {Rational(0), Rational(1)}, {Rational(1), Rational(0)}});
  Configuration ub;
  ub.game = g;
  Population pop0;
  pop0.types = {dominant_action_type(g, 0, 0), dominant_action_type(g, 0, 1)};
  pop0.shares = {Rational(1, 2), Rational(1, 2)};
  Population pop1;
  pop1.types = {dominant_action_type(g, 1, 0)};
  pop1.shares = {Rational(1)};
  ub.mu.pops = {pop0, pop1};
  ub.regime = Regime::kP0;
  StrategyFunctionUnobservable us;
  us.by_pop_type = {{MixedStrategy{Rational(1), Rational(0)}, MixedStrategy{Rational(0), Rational(1)}},
                    {MixedStrategy{Rational(1), Rational(0)}}};
  ub.s = us;
  auto uv = check_stability(ub, StabilityOptions{});
  CHECK(uv.kind == VerdictKind::kUnstable);
  CHECK(uv.route == "balance-violation");
  CHECK_FALSE(uv.balance_violations.empty());
}

TEST_CASE("non-generic game: materialists stall, dominant types settle") {
  StabilityOptions options;
  Configuration mat = corpus::nongeneric_materialist();
  auto mv = check_stability(mat, options);
  CHECK(mv.kind == VerdictKind::kUnknown);
  CHECK(mv.reason.find("nearby") != std::string::npos);
  // The breaking entrant: a type pushing the second population off a21 has
  // no nearby equilibrium (the incumbents' best reply flips discontinuously).
  MutantSubProfile m;
  m.coalition = {1};
  m.types.emplace(1, dominant_action_type(mat.game, 1, 2));
  m.shares.emplace(1, Rational(1, 10));
  MixedStrategy push{Rational(0), Rational(0), Rational(1)};
  std::string why;
  CHECK_FALSE(nearby_equilibrium(mat, m, {{1, push}}, &why).has_value());
  CHECK_FALSE(why.empty());

  Configuration dom = corpus::nongeneric_dominant();
  auto dv = check_stability(dom, options);
  CHECK(dv.kind == VerdictKind::kStable);
  CHECK(dv.route == "dominant-types coexistence (two-player)");
}

TEST_CASE("verdicts never contradict the invader search on the corpus") {
  StabilityOptions options;
  std::vector<Configuration> corpus_configs;
  corpus_configs.push_back(corpus::ex1_configuration());
  corpus_configs.push_back(corpus::ex2_configuration_low(Regime::kP1));
  corpus_configs.push_back(corpus::ex2_configuration_high(Regime::kP1));
  corpus_configs.push_back(corpus::ex3_configuration());
  corpus_configs.push_back(corpus::ex4_configuration());
  corpus_configs.push_back(corpus::ex5_configuration());
  corpus_configs.push_back(corpus::ex6_configuration(Regime::kP0));
  corpus_configs.push_back(corpus::ex6_configuration(Regime::kPartial, Rational(1, 2)));
  corpus_configs.push_back(corpus::nongeneric_materialist());
  corpus_configs.push_back(corpus::nongeneric_dominant());
  for (auto& c : corpus_configs) {
    auto verdict = check_stability(c, options);
    if (verdict.kind != VerdictKind::kStable) continue;
    for (auto& coalition : nonempty_subsets(c.game.players()))
      CHECK_FALSE(find_invader(c, coalition, options).has_value());
  }
}

TEST_CASE("aggregate comparison flags the handshake against the efficient strict equilibrium") {
  // Under the summed-fitness criterion, coordinated entrants displace even a
  // Pareto-efficient strict equilibrium when the welfare sum is higher
  // elsewhere; the aggregate diff of the handshake entrant pair is positive.
  Configuration c = corpus::ex2_configuration_low(Regime::kP1);
  auto mutants = full_indifferent(c);
  MutantAssignment a;
  auto pure = [&](int x, int y) { return MixedProfile::pure(c.game, {x, y}); };
  a.b_entries[{1, 0}] = pure(0, 0);
  a.b_entries[{0, 1}] = pure(0, 0);
  a.b_entries[{1, 1}] = pure(1, 1);
  Poly agg = aggregate_fitness_diff(c, mutants, a);
  // sum over populations of (incumbent - mutant): negative means advantage.
  UPoly diag = agg.restrict_to_diagonal();
  CHECK(sign_near_zero_plus(diag) == -1);
}
