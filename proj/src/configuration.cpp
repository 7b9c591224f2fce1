#include "prefstab/configuration.hpp"

#include <algorithm>

namespace prefstab {

bool utilities_indifferent(const std::vector<Rational>& u) {
  for (auto& v : u)
    if (v != u[0]) return false;
  return true;
}

bool utilities_materialist(const Game& g, int role, const std::vector<Rational>& u) {
  if (static_cast<int>(u.size()) != g.profile_count()) return false;
  // u = a*pi_role + b with a > 0.
  int ref = -1;
  for (int f = 1; f < g.profile_count(); ++f)
    if (g.payoff_flat(f)[role] != g.payoff_flat(0)[role]) {
      ref = f;
      break;
    }
  if (ref < 0) return utilities_indifferent(u);  // constant fitness: u must be constant too
  Rational a = (u[ref] - u[0]) / (g.payoff_flat(ref)[role] - g.payoff_flat(0)[role]);
  if (a <= 0) return false;
  Rational b = u[0] - a * g.payoff_flat(0)[role];
  for (int f = 0; f < g.profile_count(); ++f)
    if (u[f] != a * g.payoff_flat(f)[role] + b) return false;
  return true;
}

PreferenceType indifferent_type(const Game& g, int role, const Rational& level) {
  PreferenceType t;
  t.role = role;
  t.utilities.assign(g.profile_count(), level);
  t.indifferent_tag = true;
  t.name = "indifferent(" + format_rational(level) + ")";
  return t;
}

PreferenceType materialist_type(const Game& g, int role) {
  PreferenceType t;
  t.role = role;
  for (int f = 0; f < g.profile_count(); ++f) t.utilities.push_back(g.payoff_flat(f)[role]);
  t.materialist_tag = true;
  t.name = "materialist";
  return t;
}

PreferenceType dominant_action_type(const Game& g, int role, int action) {
  PreferenceType t;
  t.role = role;
  for (int f = 0; f < g.profile_count(); ++f)
    t.utilities.push_back(g.profile_at(f)[role] == action ? Rational(1) : Rational(0));
  t.name = "dominant(" + g.action_labels(role)[action] + ")";
  return t;
}

void check_distribution(const Game& g, const PreferenceDistribution& mu) {
  if (mu.populations() != g.players()) throw StructuralError("one population per player required");
  for (int i = 0; i < mu.populations(); ++i) {
    auto& pop = mu.pops[i];
    if (pop.types.empty()) throw StructuralError("population " + std::to_string(i) + " has no types");
    if (pop.types.size() != pop.shares.size()) throw StructuralError("types/shares length mismatch");
    Rational total = 0;
    for (auto& sh : pop.shares) {
      if (sh <= 0) throw StructuralError("type shares must be positive");
      total += sh;
    }
    if (total != 1) throw StructuralError("type shares must sum to 1 in population " + std::to_string(i));
    for (auto& t : pop.types) {
      if (t.role != i) throw StructuralError("type role does not match its population");
      if (static_cast<int>(t.utilities.size()) != g.profile_count())
        throw StructuralError("utility tensor must cover all pure profiles");
      if (t.indifferent_tag && !utilities_indifferent(t.utilities))
        throw StructuralError("indifferent tag on a non-constant utility tensor");
      if (t.materialist_tag && !utilities_materialist(g, i, t.utilities))
        throw StructuralError("materialist tag fails the affine-fit check");
    }
    for (size_t a = 0; a < pop.types.size(); ++a)
      for (size_t b = a + 1; b < pop.types.size(); ++b)
        if (pop.types[a].utilities == pop.types[b].utilities)
          throw StructuralError("duplicate preference type in population " + std::to_string(i));
  }
}

TypeIndexer::TypeIndexer(std::vector<int> counts) : counts_(std::move(counts)) {
  stride_.assign(counts_.size(), 1);
  for (int i = static_cast<int>(counts_.size()) - 2; i >= 0; --i) stride_[i] = stride_[i + 1] * counts_[i + 1];
  total_ = counts_.empty() ? 0 : stride_[0] * counts_[0];
}

int TypeIndexer::flat(const std::vector<int>& tp) const {
  int idx = 0;
  for (size_t i = 0; i < counts_.size(); ++i) {
    if (tp[i] < 0 || tp[i] >= counts_[i]) throw StructuralError("type index out of range");
    idx += tp[i] * stride_[i];
  }
  return idx;
}

std::vector<int> TypeIndexer::at(int flat) const {
  std::vector<int> tp(counts_.size());
  for (size_t i = 0; i < counts_.size(); ++i) {
    tp[i] = flat / stride_[i];
    flat %= stride_[i];
  }
  return tp;
}

TypeIndexer Configuration::indexer() const {
  std::vector<int> counts;
  for (auto& pop : mu.pops) counts.push_back(static_cast<int>(pop.types.size()));
  return TypeIndexer(counts);
}

MixedProfile Configuration::match_profile(const std::vector<int>& tp) const {
  auto idx = indexer();
  MixedProfile out;
  switch (regime) {
    case Regime::kP1:
      return b->by_type_profile[idx.flat(tp)];
    case Regime::kP0:
      for (int i = 0; i < game.players(); ++i) out.strategies.push_back(s->by_pop_type[i][tp[i]]);
      return out;
    case Regime::kPartial: {
      const MixedProfile& bp = b->by_type_profile[idx.flat(tp)];
      for (int i = 0; i < game.players(); ++i) {
        MixedStrategy z(game.actions(i), Rational(0));
        const MixedStrategy& si = s->by_pop_type[i][tp[i]];
        for (int a = 0; a < game.actions(i); ++a) z[a] = p * bp.strategies[i][a] + (1 - p) * si[a];
        out.strategies.push_back(std::move(z));
      }
      return out;
    }
  }
  throw StructuralError("bad regime");
}

Rational Configuration::mu_weight(const std::vector<int>& tp) const {
  Rational w = 1;
  for (int i = 0; i < mu.populations(); ++i) w *= mu.share(i, tp[i]);
  return w;
}

Rational Configuration::mu_weight_excluding(const std::vector<int>& tp, int skip) const {
  Rational w = 1;
  for (int i = 0; i < mu.populations(); ++i)
    if (i != skip) w *= mu.share(i, tp[i]);
  return w;
}

namespace {

void check_structure(const Configuration& c) {
  check_distribution(c.game, c.mu);
  auto idx = c.indexer();
  if (c.regime == Regime::kP1 || c.regime == Regime::kPartial) {
    if (!c.b) throw StructuralError("regime requires the observable strategy function b");
    if (static_cast<int>(c.b->by_type_profile.size()) != idx.total())
      throw StructuralError("b must cover supp mu");
    for (auto& prof : c.b->by_type_profile) check_profile_shape(c.game, prof);
  }
  if (c.regime == Regime::kP0 || c.regime == Regime::kPartial) {
    if (!c.s) throw StructuralError("regime requires the unobservable strategy function s");
    if (static_cast<int>(c.s->by_pop_type.size()) != c.game.players())
      throw StructuralError("s must cover every population");
    for (int i = 0; i < c.game.players(); ++i) {
      if (static_cast<int>(c.s->by_pop_type[i].size()) != c.mu.type_count(i))
        throw StructuralError("s must cover supp mu_i");
      for (auto& st : c.s->by_pop_type[i]) {
        if (static_cast<int>(st.size()) != c.game.actions(i)) throw StructuralError("s dimension mismatch");
        check_mixed_strategy(st);
      }
    }
  }
  if (c.regime == Regime::kPartial && (c.p <= 0 || c.p >= 1))
    throw StructuralError("partial observability requires p strictly between 0 and 1");
}

// Population aggregates x_j = sum_t mu_j(t) s_j(t).
std::vector<MixedStrategy> population_aggregates(const Configuration& c) {
  std::vector<MixedStrategy> x;
  for (int j = 0; j < c.game.players(); ++j) {
    MixedStrategy agg(c.game.actions(j), Rational(0));
    for (int t = 0; t < c.mu.type_count(j); ++t)
      for (int a = 0; a < c.game.actions(j); ++a) agg[a] += c.mu.share(j, t) * c.s->by_pop_type[j][t][a];
    x.push_back(std::move(agg));
  }
  return x;
}

}  // namespace

ValidationReport validate_configuration(const Configuration& c) {
  check_structure(c);
  ValidationReport report;
  auto idx = c.indexer();
  auto record = [&](const std::vector<int>& tp, int pop, int dev, const std::string& msg) {
    report.ok = false;
    report.violations.push_back({tp, pop, dev, msg});
  };

  auto best_reply_check = [&](const std::vector<Rational>& tensor, int i, const MixedProfile& prof,
                              const std::vector<int>& tp, const std::string& what) {
    Rational val = tensor_value(c.game, tensor, prof);
    for (int a = 0; a < c.game.actions(i); ++a) {
      if (tensor_value_unilateral(c.game, tensor, i, a, prof) > val) {
        record(tp, i, a, what + ": profitable deviation to '" + c.game.action_labels(i)[a] + "'");
        return false;
      }
    }
    return true;
  };

  if (c.regime == Regime::kP1) {
    for (int f = 0; f < idx.total(); ++f) {
      auto tp = idx.at(f);
      const MixedProfile& prof = c.b->by_type_profile[f];
      for (int i = 0; i < c.game.players(); ++i) {
        if (!best_reply_check(c.mu.pops[i].types[tp[i]].utilities, i, prof, tp, "subjective Nash"))
          return report;
      }
    }
    return report;
  }

  if (c.regime == Regime::kP0) {
    auto x = population_aggregates(c);
    for (int i = 0; i < c.game.players(); ++i)
      for (int t = 0; t < c.mu.type_count(i); ++t) {
        MixedProfile prof;
        prof.strategies = x;
        prof.strategies[i] = c.s->by_pop_type[i][t];
        std::vector<int> tp(c.game.players(), -1);
        tp[i] = t;
        if (!best_reply_check(c.mu.pops[i].types[t].utilities, i, prof, tp, "Bayesian-Nash")) return report;
      }
    return report;
  }

  // Partial: the observing condition per matched tuple, then the ignorant
  // condition per (population, type) with expectation over opponents.
  for (int f = 0; f < idx.total(); ++f) {
    auto tp = idx.at(f);
    const MixedProfile& bp = c.b->by_type_profile[f];
    MixedProfile z = c.match_profile(tp);
    for (int i = 0; i < c.game.players(); ++i) {
      // Observing player i compares strategies against opponents' z-mixtures.
      MixedProfile prof = z;
      prof.strategies[i] = bp.strategies[i];
      if (!best_reply_check(c.mu.pops[i].types[tp[i]].utilities, i, prof, tp, "observing best response"))
        return report;
    }
  }
  for (int i = 0; i < c.game.players(); ++i)
    for (int t = 0; t < c.mu.type_count(i); ++t) {
      const auto& tensor = c.mu.pops[i].types[t].utilities;
      std::vector<Rational> action_value(c.game.actions(i), Rational(0));
      for (int f = 0; f < idx.total(); ++f) {
        auto tp = idx.at(f);
        if (tp[i] != t) continue;
        Rational w = c.mu_weight_excluding(tp, i);
        MixedProfile z = c.match_profile(tp);
        for (int a = 0; a < c.game.actions(i); ++a)
          action_value[a] += w * tensor_value_unilateral(c.game, tensor, i, a, z);
      }
      Rational val = 0;
      for (int a = 0; a < c.game.actions(i); ++a) val += c.s->by_pop_type[i][t][a] * action_value[a];
      for (int a = 0; a < c.game.actions(i); ++a)
        if (action_value[a] > val) {
          std::vector<int> tp(c.game.players(), -1);
          tp[i] = t;
          record(tp, i, a,
                 "ignorant best response: profitable deviation to '" + c.game.action_labels(i)[a] + "'");
          return report;
        }
    }
  return report;
}

AggregateOutcome aggregate_outcome(const Configuration& c) {
  check_structure(c);
  auto idx = c.indexer();
  AggregateOutcome out;
  out.correlated.weights.assign(c.game.profile_count(), Rational(0));
  for (int f = 0; f < idx.total(); ++f) {
    auto tp = idx.at(f);
    Rational w = c.mu_weight(tp);
    auto induced = induced_correlated(c.game, c.match_profile(tp));
    for (int a = 0; a < c.game.profile_count(); ++a) out.correlated.weights[a] += w * induced.weights[a];
  }
  if (c.regime == Regime::kP0) {
    MixedProfile x;
    x.strategies = population_aggregates(c);
    out.product = x;
  }
  return out;
}

Rational average_fitness(const Configuration& c, int population, int type_index) {
  check_structure(c);
  if (population < 0 || population >= c.game.players()) throw StructuralError("population out of range");
  if (type_index < 0 || type_index >= c.mu.type_count(population))
    throw StructuralError("unknown type in population " + std::to_string(population));
  auto idx = c.indexer();
  if (c.regime == Regime::kP0) {
    auto x = population_aggregates(c);
    MixedProfile prof;
    prof.strategies = x;
    prof.strategies[population] = c.s->by_pop_type[population][type_index];
    return expected_payoff(c.game, population, prof);
  }
  Rational total = 0;
  for (int f = 0; f < idx.total(); ++f) {
    auto tp = idx.at(f);
    if (tp[population] != type_index) continue;
    total += c.mu_weight_excluding(tp, population) *
             expected_payoff(c.game, population, c.match_profile(tp));
  }
  return total;
}

Poly average_fitness_observability_poly(const Configuration& c, int population, int type_index) {
  check_structure(c);
  if (!c.b || !c.s) throw StructuralError("observability polynomial needs both b and s");
  auto idx = c.indexer();
  const int n = c.game.players();
  Poly total(1);
  Poly pv = Poly::variable(1, 0);
  Poly one = Poly::constant(1, 1);
  for (int f = 0; f < idx.total(); ++f) {
    auto tp = idx.at(f);
    if (tp[population] != type_index) continue;
    Rational w = c.mu_weight_excluding(tp, population);
    const MixedProfile& bp = c.b->by_type_profile[f];
    for (int mask = 0; mask < (1 << n); ++mask) {
      // mask bit i set: player i ignorant, plays s_i(theta_i).
      MixedProfile prof;
      Poly weight = Poly::constant(1, w);
      for (int i = 0; i < n; ++i) {
        if (mask & (1 << i)) {
          prof.strategies.push_back(c.s->by_pop_type[i][tp[i]]);
          weight *= (one - pv);
        } else {
          prof.strategies.push_back(bp.strategies[i]);
          weight *= pv;
        }
      }
      total += weight.scaled(expected_payoff(c.game, population, prof));
    }
  }
  return total;
}

bool is_balanced(const Configuration& c) {
  for (int i = 0; i < c.game.players(); ++i) {
    Rational first = average_fitness(c, i, 0);
    for (int t = 1; t < c.mu.type_count(i); ++t)
      if (average_fitness(c, i, t) != first) return false;
  }
  return true;
}

Rational MutantSubProfile::norm() const {
  Rational m = 0;
  for (auto& [j, eps] : shares) m = std::max(m, eps);
  return m;
}

void check_mutants(const Game& g, const PreferenceDistribution& mu, const MutantSubProfile& mutants) {
  if (mutants.coalition.empty()) throw StructuralError("mutant coalition must be nonempty");
  std::vector<int> seen;
  for (int j : mutants.coalition) {
    if (j < 0 || j >= g.players()) throw StructuralError("coalition member out of range");
    if (std::find(seen.begin(), seen.end(), j) != seen.end())
      throw StructuralError("duplicate coalition member");
    seen.push_back(j);
    auto ti = mutants.types.find(j);
    auto si = mutants.shares.find(j);
    if (ti == mutants.types.end() || si == mutants.shares.end())
      throw StructuralError("mutant type/share missing for population " + std::to_string(j));
    if (ti->second.role != j) throw StructuralError("mutant role mismatch");
    if (static_cast<int>(ti->second.utilities.size()) != g.profile_count())
      throw StructuralError("mutant utility tensor size mismatch");
    if (si->second <= 0 || si->second >= 1) throw StructuralError("mutant share must be in (0,1)");
    for (auto& inc : mu.pops[j].types)
      if (inc.utilities == ti->second.utilities)
        throw StructuralError("mutant type coincides with an incumbent type");
  }
  if (!std::is_sorted(mutants.coalition.begin(), mutants.coalition.end()))
    throw StructuralError("coalition must be sorted");
}

PreferenceDistribution post_entry(const Game& g, const PreferenceDistribution& mu,
                                  const MutantSubProfile& mutants) {
  check_distribution(g, mu);
  check_mutants(g, mu, mutants);
  PreferenceDistribution out = mu;
  for (int j : mutants.coalition) {
    Rational eps = mutants.shares.at(j);
    for (auto& sh : out.pops[j].shares) sh *= (1 - eps);
    out.pops[j].types.push_back(mutants.types.at(j));
    out.pops[j].shares.push_back(eps);
  }
  return out;
}

}  // namespace prefstab
