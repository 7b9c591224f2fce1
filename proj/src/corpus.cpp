#include "prefstab/corpus.hpp"

#include "prefstab/efficiency.hpp"
#include "prefstab/equilibrium.hpp"
#include "prefstab/stability.hpp"

namespace prefstab::corpus {

namespace {

std::vector<Rational> rvec(std::initializer_list<long> xs) {
  std::vector<Rational> out;
  for (long x : xs) out.emplace_back(x);
  return out;
}

StrategyFunctionObservable constant_b(const Game& g, const TypeIndexer& idx, const PureProfile& a) {
  StrategyFunctionObservable b;
  b.by_type_profile.assign(idx.total(), MixedProfile::pure(g, a));
  return b;
}

StrategyFunctionUnobservable constant_s(const Game& g, const PreferenceDistribution& mu, const PureProfile& a) {
  StrategyFunctionUnobservable s;
  for (int i = 0; i < g.players(); ++i) {
    MixedStrategy st(g.actions(i), Rational(0));
    st[a[i]] = 1;
    s.by_pop_type.push_back(std::vector<MixedStrategy>(mu.type_count(i), st));
  }
  return s;
}

PreferenceDistribution monomorphic(std::vector<PreferenceType> types) {
  PreferenceDistribution mu;
  for (auto& t : types) {
    Population pop;
    pop.types.push_back(t);
    pop.shares.push_back(Rational(1));
    mu.pops.push_back(std::move(pop));
  }
  return mu;
}

Configuration pure_outcome_config(const Game& g, std::vector<PreferenceType> types, const PureProfile& a,
                                  Regime regime, const Rational& p) {
  Configuration c;
  c.game = g;
  c.mu = monomorphic(std::move(types));
  c.regime = regime;
  if (regime == Regime::kPartial) c.p = p;
  if (regime != Regime::kP0) c.b = constant_b(g, c.indexer(), a);
  if (regime != Regime::kP1) c.s = constant_s(g, c.mu, a);
  return c;
}

}  // namespace

Game battle_of_sexes() {
  // rows: Faithful, Philandering; cols: Coy, Fast
  return Game({{"Faithful", "Philandering"}, {"Coy", "Fast"}},
              {rvec({2, 2}), rvec({5, 5}), rvec({0, 0}), rvec({15, -5})});
}

Game coordination_2x2() {
  return Game({{"a11", "a12"}, {"a21", "a22"}},
              {rvec({5, 5}), rvec({0, 0}), rvec({0, 0}), rvec({5, 10})});
}

Game three_player_3x3() {
  std::vector<std::vector<Rational>> pay(27);
  Game shape({{"a11", "a12", "a13"}, {"a21", "a22", "a23"}, {"a31", "a32", "a33"}},
             std::vector<std::vector<Rational>>(27, rvec({0, 0, 0})));
  auto set = [&](int r, int c, int t, std::initializer_list<long> v) {
    pay[shape.flat_index({r, c, t})] = rvec(v);
  };
  // table a31
  set(0, 0, 0, {7, 7, 7});
  set(0, 1, 0, {3, 0, 3});
  set(0, 2, 0, {3, 0, 3});
  set(1, 0, 0, {0, 3, 3});
  set(1, 1, 0, {7, 7, 0});
  set(1, 2, 0, {1, 1, 1});
  set(2, 0, 0, {0, 3, 3});
  set(2, 1, 0, {1, 1, 1});
  set(2, 2, 0, {1, 1, 1});
  // table a32
  set(0, 0, 1, {3, 3, 0});
  set(0, 1, 1, {1, 1, 1});
  set(0, 2, 1, {1, 1, 1});
  set(1, 0, 1, {1, 1, 1});
  set(1, 1, 1, {7, 7, 0});
  set(1, 2, 1, {1, 1, 1});
  set(2, 0, 1, {7, 0, 7});
  set(2, 1, 1, {7, 0, 7});
  set(2, 2, 1, {7, 0, 7});
  // table a33
  set(0, 0, 2, {3, 3, 0});
  set(0, 1, 2, {1, 1, 1});
  set(0, 2, 2, {0, 7, 7});
  set(1, 0, 2, {1, 1, 1});
  set(1, 1, 2, {7, 7, 0});
  set(1, 2, 2, {0, 7, 7});
  set(2, 0, 2, {1, 1, 1});
  set(2, 1, 2, {1, 1, 1});
  set(2, 2, 2, {0, 7, 7});
  return Game({{"a11", "a12", "a13"}, {"a21", "a22", "a23"}, {"a31", "a32", "a33"}}, pay);
}

Game three_player_2x2() {
  std::vector<std::vector<Rational>> pay(8);
  Game shape({{"a11", "a12"}, {"a21", "a22"}, {"a31", "a32"}},
             std::vector<std::vector<Rational>>(8, rvec({0, 0, 0})));
  auto set = [&](int r, int c, int t, std::initializer_list<long> v) {
    pay[shape.flat_index({r, c, t})] = rvec(v);
  };
  set(0, 0, 0, {7, 7, 7});
  set(0, 1, 0, {9, 6, 0});
  set(1, 0, 0, {6, 0, 9});
  set(1, 1, 0, {6, 0, 9});
  set(0, 0, 1, {0, 9, 6});
  set(0, 1, 1, {9, 6, 0});
  set(1, 0, 1, {0, 9, 6});
  set(1, 1, 1, {1, 1, 1});
  return Game({{"a11", "a12"}, {"a21", "a22"}, {"a31", "a32"}}, pay);
}

Game coordination_3x3() {
  return Game({{"a11", "a12", "a13"}, {"a21", "a22", "a23"}},
              {rvec({4, 4}), rvec({2, 2}), rvec({0, 5}),
               rvec({2, 2}), rvec({4, 4}), rvec({0, 0}),
               rvec({5, 0}), rvec({0, 0}), rvec({2, 2})});
}

Game prisoners_dilemma() {
  return Game({{"C1", "D1"}, {"C2", "D2"}},
              {rvec({2, 2}), rvec({0, 3}), rvec({3, 0}), rvec({1, 1})});
}

Game nongeneric_2x3() {
  return Game({{"a11", "a12"}, {"a21", "a22", "a23"}},
              {rvec({1, 1}), rvec({1, 0}), rvec({0, 0}),
               rvec({1, 1}), rvec({0, 0}), rvec({1, 0})});
}

Configuration ex1_configuration() {
  Game g = battle_of_sexes();
  // Males are indifferent between Faithful and Philandering against Fast and
  // strictly faithful against Coy; females go coy against any trace of
  // philandering and are indifferent against a faithful male.
  PreferenceType male;
  male.role = 0;
  male.utilities = {Rational(1), Rational(1), Rational(0), Rational(1)};  // (F,C),(F,Fa),(P,C),(P,Fa)
  male.name = "tolerant-male";
  PreferenceType female;
  female.role = 1;
  female.utilities = {Rational(1), Rational(1), Rational(1), Rational(0)};
  female.name = "screening-female";
  return pure_outcome_config(g, {male, female}, {0, 1}, Regime::kP1, Rational(0));
}

Configuration ex2_configuration_low(Regime regime, const Rational& p) {
  Game g = coordination_2x2();
  return pure_outcome_config(g, {dominant_action_type(g, 0, 0), dominant_action_type(g, 1, 0)}, {0, 0},
                             regime, p);
}

Configuration ex2_configuration_high(Regime regime, const Rational& p) {
  Game g = coordination_2x2();
  return pure_outcome_config(g, {dominant_action_type(g, 0, 1), dominant_action_type(g, 1, 1)}, {1, 1},
                             regime, p);
}

Configuration ex3_configuration() {
  Game g = three_player_3x3();
  return pure_outcome_config(
      g, {dominant_action_type(g, 0, 0), dominant_action_type(g, 1, 0), dominant_action_type(g, 2, 0)},
      {0, 0, 0}, Regime::kP1, Rational(0));
}

Configuration ex4_configuration() {
  Game g = three_player_2x2();
  return pure_outcome_config(
      g, {dominant_action_type(g, 0, 0), dominant_action_type(g, 1, 0), dominant_action_type(g, 2, 0)},
      {0, 0, 0}, Regime::kP1, Rational(0));
}

Configuration ex5_configuration() {
  Game g = coordination_3x3();
  PreferenceType t1;
  t1.role = 0;
  t1.utilities = {Rational(2), Rational(1), Rational(0),
                  Rational(1), Rational(2), Rational(0),
                  Rational(0), Rational(0), Rational(0)};
  t1.name = "matcher";
  PreferenceType t2 = t1;
  t2.role = 1;
  Configuration c;
  c.game = g;
  c.mu = monomorphic({t1, t2});
  c.regime = Regime::kP0;
  StrategyFunctionUnobservable s;
  MixedStrategy half{Rational(1, 2), Rational(1, 2), Rational(0)};
  s.by_pop_type = {{half}, {half}};
  c.s = s;
  return c;
}

PreferenceType ex5_divergence_mutant(int role) {
  Game g = coordination_3x3();
  PreferenceType t;
  t.role = role;
  t.utilities.assign(g.profile_count(), Rational(0));
  auto set = [&](int r, int c, long v) { t.utilities[g.flat_index({r, c})] = Rational(v); };
  set(0, 0, 1);
  set(0, 2, 1);
  set(2, 0, 1);
  set(2, 2, 1);
  set(1, 1, 2);
  t.name = "divergence-mutant";
  return t;
}

Configuration ex6_configuration(Regime regime, const Rational& p) {
  Game g = prisoners_dilemma();
  return pure_outcome_config(g, {materialist_type(g, 0), materialist_type(g, 1)}, {1, 1}, regime, p);
}

Configuration nongeneric_materialist() {
  Game g = nongeneric_2x3();
  return pure_outcome_config(g, {materialist_type(g, 0), materialist_type(g, 1)}, {0, 0}, Regime::kP0,
                             Rational(0));
}

Configuration nongeneric_dominant() {
  Game g = nongeneric_2x3();
  return pure_outcome_config(g, {dominant_action_type(g, 0, 0), dominant_action_type(g, 1, 0)}, {0, 0},
                             Regime::kP0, Rational(0));
}

}  // namespace prefstab::corpus

namespace prefstab::corpus {

namespace {

bool expect(bool cond, const std::string& msg, std::string& detail) {
  if (!cond) detail += (detail.empty() ? "" : "; ") + msg;
  return cond;
}

}  // namespace

std::vector<CorpusCheck> corpus_checks() {
  std::vector<CorpusCheck> checks;
  auto add = [&](const std::string& example, const std::string& name,
                 std::function<bool(std::string&)> fn) {
    checks.push_back({example, name, std::move(fn)});
  };

  add("ex1", "pair (Faithful, Fast) validates with fitness 5 per match", [](std::string& d) {
    Configuration c = ex1_configuration();
    bool ok = expect(validate_configuration(c).ok, "validation", d);
    ok &= expect(is_balanced(c), "balance", d);
    ok &= expect(average_fitness(c, 0, 0) == Rational(5), "male fitness 5", d);
    ok &= expect(average_fitness(c, 1, 0) == Rational(5), "female fitness 5", d);
    return ok;
  });
  add("ex1", "uniform invasion barrier 3/18 from the bounding route", [](std::string& d) {
    Configuration c = ex1_configuration();
    auto v = check_stability(c, StabilityOptions{});
    bool ok = expect(v.kind == VerdictKind::kStable, "stable verdict", d);
    ok &= expect(v.uniform_barrier && *v.uniform_barrier == Rational(3, 18), "barrier 3/18", d);
    return ok;
  });
  add("ex2", "(a12,a22) Pareto and risk dominates the strict equilibrium (a11,a21)",
      [](std::string& d) {
        Game g = coordination_2x2();
        bool ok = expect(is_strict_nash(g, MixedProfile::pure(g, {0, 0})), "(a11,a21) strict", d);
        ok &= expect(is_strict_nash(g, MixedProfile::pure(g, {1, 1})), "(a12,a22) strict", d);
        ok &= expect(dominance_relation(g, MixedProfile::pure(g, {1, 1}),
                                        MixedProfile::pure(g, {0, 0})) == Dominance::kWeak,
                     "Pareto dominance", d);
        // Risk dominance: product of unilateral deviation losses.
        Rational left = (g.payoff(0, {0, 0}) - g.payoff(0, {1, 0})) *
                        (g.payoff(1, {0, 0}) - g.payoff(1, {0, 1}));
        Rational right = (g.payoff(0, {1, 1}) - g.payoff(0, {0, 1})) *
                         (g.payoff(1, {1, 1}) - g.payoff(1, {1, 0}));
        ok &= expect(right > left, "risk dominance", d);
        return ok;
      });
  add("ex2", "(a11,a21) is not stable for p=1; (a12,a22) is stable for p=1 and sampled p",
      [](std::string& d) {
        StabilityOptions options;
        auto low = check_stability(ex2_configuration_low(Regime::kP1), options);
        bool ok = expect(low.kind == VerdictKind::kUnstable, "low outcome unstable", d);
        auto high = check_stability(ex2_configuration_high(Regime::kP1), options);
        ok &= expect(high.kind == VerdictKind::kStable, "high outcome stable", d);
        for (auto p : {Rational(1, 10), Rational(1, 2), Rational(9, 10)})
          ok &= expect(check_stability(ex2_configuration_high(Regime::kPartial, p), options).kind ==
                           VerdictKind::kStable,
                       "stable at p=" + format_rational(p), d);
        return ok;
      });
  add("ex3", "handshake entrants gain exactly 7 eps^2 per population", [](std::string& d) {
    auto v = check_stability(ex3_configuration(), StabilityOptions{});
    bool ok = expect(v.kind == VerdictKind::kUnstable && v.certificate.has_value(), "unstable", d);
    if (!ok) return false;
    for (auto& diff : v.certificate->diffs) {
      auto diag = diff.diff.restrict_to_diagonal();
      ok &= expect(diag.size() == 3 && diag[2] == 7 && diag[1] == 0 && diag[0] == 0, "7 eps^2", d);
    }
    return ok;
  });
  add("ex4", "entrants gain exactly eps + 6 eps^2 despite every deviation hurting deviants",
      [](std::string& d) {
        auto v = check_stability(ex4_configuration(), StabilityOptions{});
        bool ok = expect(v.kind == VerdictKind::kUnstable && v.certificate.has_value(), "unstable", d);
        if (!ok) return false;
        for (auto& diff : v.certificate->diffs) {
          auto diag = diff.diff.restrict_to_diagonal();
          ok &= expect(diag.size() == 3 && diag[0] == 0 && diag[1] == 1 && diag[2] == 6,
                       "eps + 6 eps^2", d);
        }
        return ok;
      });
  add("ex5", "the mixed profile is a Bayesian-Nash equilibrium with fitness 3", [](std::string& d) {
    Configuration c = ex5_configuration();
    bool ok = expect(validate_configuration(c).ok, "validation", d);
    ok &= expect(average_fitness(c, 0, 0) == Rational(3), "fitness 3", d);
    return ok;
  });
  add("ex5", "incumbents rebalance by the listed formula; third action inferior below 1/5",
      [](std::string& d) {
        Configuration c = ex5_configuration();
        MutantSubProfile m;
        m.coalition = {0, 1};
        m.types.emplace(0, indifferent_type(c.game, 0));
        m.types.emplace(1, indifferent_type(c.game, 1));
        m.shares.emplace(0, Rational(1, 10));
        m.shares.emplace(1, Rational(1, 10));
        MixedStrategy q{Rational(1, 4), Rational(1, 4), Rational(1, 2)};
        auto res = nearby_equilibrium(c, m, {{0, q}, {1, q}});
        bool ok = expect(res.has_value(), "rebalancing", d);
        if (res) {
          Rational expected = (1 - Rational(1, 10) * (1 + Rational(1, 4) - Rational(1, 4))) /
                              (2 * (1 - Rational(1, 10)));
          ok &= expect(res->assignment.s_incumbent.at({0, 0})[0] == expected, "p11 formula", d);
        }
        UPoly margin{Rational(1, 2), Rational(-5, 2)};  // (1 - 5 eps)/2
        ok &= expect(upoly_positive_on(margin, Rational(0), Rational(1, 5)), "inferiority bound", d);
        return ok;
      });
  add("ex6", "defection is the unique strict equilibrium; stable blind", [](std::string& d) {
    Game g = prisoners_dilemma();
    bool ok = expect(enumerate_pure_nash(g) == std::vector<PureProfile>{{1, 1}}, "unique pure Nash", d);
    ok &= expect(is_strict_nash(g, MixedProfile::pure(g, {1, 1})), "strict", d);
    auto cls = classify_nash(g, MixedProfile::pure(g, {1, 1}), 2);
    ok &= expect(cls.unique == TriState::kYes, "unique", d);
    auto v = check_stability(ex6_configuration(Regime::kP0), StabilityOptions{});
    ok &= expect(v.kind == VerdictKind::kStable, "stable at p=0", d);
    return ok;
  });
  add("ex6", "not stable for any positive observability; advantage eps*p", [](std::string& d) {
    bool ok = true;
    for (auto p : {Rational(1, 100), Rational(1, 2), Rational(99, 100)}) {
      auto v = check_stability(ex6_configuration(Regime::kPartial, p), StabilityOptions{});
      ok &= expect(v.kind == VerdictKind::kUnstable && v.certificate.has_value(),
                   "unstable at p=" + format_rational(p), d);
      if (!v.certificate) continue;
      for (auto& diff : v.certificate->diffs)
        ok &= expect(diff.diff == Poly::variable(2, 1 - diff.population).scaled(p), "eps*p", d);
    }
    Configuration mid = ex6_configuration(Regime::kPartial, Rational(1, 2));
    auto th = observability_thresholds(mid, {1, 1}, MixedProfile::pure(mid.game, {0, 0}), std::nullopt);
    ok &= expect(th.p_bar_high && *th.p_bar_high == 0, "p_bar_high 0", d);
    return ok;
  });
  add("nongeneric", "materialists cannot be certified; dominant types on (a11,a21) are stable",
      [](std::string& d) {
        auto mv = check_stability(nongeneric_materialist(), StabilityOptions{});
        bool ok = expect(mv.kind != VerdictKind::kStable, "materialist not stable-certified", d);
        ok &= expect(mv.reason.find("nearby") != std::string::npos, "nearby construction fails", d);
        auto dv = check_stability(nongeneric_dominant(), StabilityOptions{});
        ok &= expect(dv.kind == VerdictKind::kStable, "dominant types stable", d);
        return ok;
      });
  return checks;
}

}  // namespace prefstab::corpus
