#include "prefstab/stability.hpp"

#include <algorithm>
#include <atomic>
#include <thread>

#include "prefstab/equilibrium.hpp"
#include "prefstab/linalg.hpp"

namespace prefstab {

namespace {

constexpr const char* kRouteBalance = "balance-violation";
constexpr const char* kRouteSecretHandshake = "secret-handshake (efficiency necessity)";
constexpr const char* kRouteFitnessMismatch = "fitness-vector-mismatch";
constexpr const char* kRouteSearch = "invader-search";
constexpr const char* kRouteAggStrong = "aggregate-strong-nash";
constexpr const char* kRoutePEStrict = "pareto-efficient-strict-nash (two-player)";
constexpr const char* kRoutePairwise = "pairwise-bounding (two-population)";
constexpr const char* kRouteNotNashP0 = "aggregate-outcome-not-nash";
constexpr const char* kRouteMaterialist = "materialist";
constexpr const char* kRouteDominantP0 = "dominant-types coexistence (two-player)";
constexpr const char* kRouteHighObs = "strong-dominance above observability threshold";
constexpr const char* kRouteLowObs = "non-nash below observability threshold";
constexpr const char* kRouteDegenerate = "degenerate-single-action";

bool in_coalition(const MutantSubProfile& m, int pop) {
  return std::find(m.coalition.begin(), m.coalition.end(), pop) != m.coalition.end();
}

// ---------------------------------------------------------------------------
// Post-entry symbolic machinery. Member index per population: incumbents
// 0..K-1 as in the configuration, K = the mutant (coalition populations).
// Shares: incumbent t carries (1-e_j)*mu_j(t), the mutant carries e_j, where
// e_j is the polynomial variable of population j.
// ---------------------------------------------------------------------------

class PostEntry {
 public:
  PostEntry(const Configuration& config, const MutantSubProfile& mutants, const MutantAssignment& assignment)
      : c_(config), m_(mutants), a_(assignment), idx_(config.indexer()) {
    check_mutants(c_.game, c_.mu, m_);
    n_ = c_.game.players();
    for (int j = 0; j < n_; ++j) {
      int k = c_.mu.type_count(j);
      counts_.push_back(in_coalition(m_, j) ? k + 1 : k);
    }
  }

  int players() const { return n_; }
  int members(int pop) const { return counts_[pop]; }
  bool is_mutant(int pop, int member) const {
    return in_coalition(m_, pop) && member == c_.mu.type_count(pop);
  }
  bool has_mutant(const std::vector<int>& mp) const {
    for (int j = 0; j < n_; ++j)
      if (is_mutant(j, mp[j])) return true;
    return false;
  }

  Poly share_poly(int pop, int member) const {
    if (!in_coalition(m_, pop)) return Poly::constant(n_, c_.mu.share(pop, member));
    Poly e = Poly::variable(n_, pop);
    if (is_mutant(pop, member)) return e;
    return (Poly::constant(n_, 1) - e).scaled(c_.mu.share(pop, member));
  }

  const std::vector<Rational>& utilities(int pop, int member) const {
    return is_mutant(pop, member) ? m_.types.at(pop).utilities : c_.mu.pops[pop].types[member].utilities;
  }

  MixedStrategy s_of(int pop, int member) const {
    if (is_mutant(pop, member)) {
      auto it = a_.s_mutant.find(pop);
      if (it == a_.s_mutant.end()) throw StructuralError("assignment misses mutant strategy s~");
      return it->second;
    }
    auto it = a_.s_incumbent.find({pop, member});
    if (it != a_.s_incumbent.end()) return it->second;
    return c_.s->by_pop_type[pop][member];
  }

  MixedProfile b_of(const std::vector<int>& mp) const {
    if (!has_mutant(mp)) return c_.b->by_type_profile[idx_.flat(mp)];
    auto it = a_.b_entries.find(mp);
    if (it == a_.b_entries.end()) throw StructuralError("assignment misses a mutant-involved match");
    return it->second;
  }

  MixedProfile match_profile(const std::vector<int>& mp) const {
    MixedProfile out;
    switch (c_.regime) {
      case Regime::kP1:
        return b_of(mp);
      case Regime::kP0:
        for (int j = 0; j < n_; ++j) out.strategies.push_back(s_of(j, mp[j]));
        return out;
      case Regime::kPartial: {
        MixedProfile bp = b_of(mp);
        for (int j = 0; j < n_; ++j) {
          MixedStrategy sj = s_of(j, mp[j]);
          MixedStrategy z(c_.game.actions(j), Rational(0));
          for (int x = 0; x < c_.game.actions(j); ++x)
            z[x] = c_.p * bp.strategies[j][x] + (1 - c_.p) * sj[x];
          out.strategies.push_back(std::move(z));
        }
        return out;
      }
    }
    throw StructuralError("bad regime");
  }

  // Exact post-entry average fitness of one member as a polynomial in the
  // share variables.
  Poly fitness(int pop, int member) const {
    Poly total(n_);
    std::vector<int> mp(n_, 0);
    mp[pop] = member;
    for_each_opponents(pop, mp, [&](const std::vector<int>& full) {
      Poly w = Poly::constant(n_, 1);
      for (int j = 0; j < n_; ++j)
        if (j != pop) w *= share_poly(j, full[j]);
      total += w.scaled(expected_payoff(c_.game, pop, match_profile(full)));
    });
    return total;
  }

  // All mutant-involved member profiles, ordered by (#mutants, lex).
  std::vector<std::vector<int>> mutant_profiles() const {
    std::vector<std::vector<int>> out;
    std::vector<int> mp(n_, 0);
    auto rec = [&](auto&& self, int pop) -> void {
      if (pop == n_) {
        if (has_mutant(mp)) out.push_back(mp);
        return;
      }
      for (int t = 0; t < counts_[pop]; ++t) {
        mp[pop] = t;
        self(self, pop + 1);
      }
    };
    rec(rec, 0);
    std::stable_sort(out.begin(), out.end(), [&](const auto& x, const auto& y) {
      int cx = 0, cy = 0;
      for (int j = 0; j < n_; ++j) {
        cx += is_mutant(j, x[j]);
        cy += is_mutant(j, y[j]);
      }
      if (cx != cy) return cx < cy;
      return x < y;
    });
    return out;
  }

  const Configuration& config() const { return c_; }
  const MutantSubProfile& mutants() const { return m_; }
  const MutantAssignment& assignment() const { return a_; }

 private:
  template <typename F>
  void for_each_opponents(int pop, std::vector<int>& mp, F&& f) const {
    auto rec = [&](auto&& self, int j) -> void {
      if (j == n_) {
        f(mp);
        return;
      }
      if (j == pop) {
        self(self, j + 1);
        return;
      }
      for (int t = 0; t < counts_[j]; ++t) {
        mp[j] = t;
        self(self, j + 1);
      }
    };
    rec(rec, 0);
  }

  const Configuration& c_;
  const MutantSubProfile& m_;
  const MutantAssignment& a_;
  TypeIndexer idx_;
  int n_;
  std::vector<int> counts_;
};

// Largest t with poly >= 0 (or > 0) on the diagonal segment (0, t); nullopt
// when the sign near zero is already wrong.
std::optional<Rational> diagonal_nonneg_bound(const Poly& p) {
  UPoly u = p.restrict_to_diagonal();
  if (upoly_is_zero(u)) return Rational(1);
  if (sign_near_zero_plus(u) < 0) return std::nullopt;
  try {
    auto root = min_root_in(u, Rational(0), Rational(1));
    return root ? *root : Rational(1);
  } catch (const SolverLimitError&) {
    // Irrational first root: bisect an exact lower bound for it.
    Rational lo = 0, hi = 1;
    for (int it = 0; it < 40; ++it) {
      Rational mid = (lo + hi) / 2;
      if (count_roots(u, Rational(0), mid) == 0)
        lo = mid;
      else
        hi = mid;
    }
    return lo > 0 ? std::optional<Rational>(lo) : std::nullopt;
  }
}

// Equilibrium conditions of the post-entry assignment, as exact constraints;
// returns the largest diagonal share bound below which they all hold.
std::optional<Rational> validity_bound(const PostEntry& pe) {
  const Configuration& c = pe.config();
  const Game& g = c.game;
  const int n = pe.players();
  Rational bound = 1;
  auto tighten = [&](const std::optional<Rational>& b) -> bool {
    if (!b) return false;
    bound = std::min(bound, *b);
    return bound > 0;
  };

  if (c.regime == Regime::kP1 || c.regime == Regime::kPartial) {
    // Per mutant-involved match: each member's b-component is a best response
    // under its own utilities (against b-components at p=1, against the
    // z-mixtures in the partial regime). These checks carry no share terms.
    for (auto& mp : pe.mutant_profiles()) {
      MixedProfile bp = pe.b_of(mp);
      MixedProfile ref = (c.regime == Regime::kP1) ? bp : pe.match_profile(mp);
      for (int i = 0; i < n; ++i) {
        MixedProfile prof = ref;
        prof.strategies[i] = bp.strategies[i];
        const auto& u = pe.utilities(i, mp[i]);
        Rational val = tensor_value(g, u, prof);
        for (int dev = 0; dev < g.actions(i); ++dev)
          if (tensor_value_unilateral(g, u, i, dev, prof) > val) return std::nullopt;
      }
    }
  }
  if (c.regime == Regime::kP0 || c.regime == Regime::kPartial) {
    // Ignorant-side conditions against the post-entry population mixtures;
    // share-dependent, handled symbolically on the diagonal.
    for (int i = 0; i < n; ++i) {
      for (int member = 0; member < pe.members(i); ++member) {
        const auto& u = pe.utilities(i, member);
        MixedStrategy own = pe.s_of(i, member);
        std::vector<Poly> action_value(g.actions(i), Poly(n));
        std::vector<int> mp(n, 0);
        mp[i] = member;
        auto rec = [&](auto&& self, int j) -> void {
          if (j == n) {
            Poly w = Poly::constant(n, 1);
            for (int t = 0; t < n; ++t)
              if (t != i) w *= pe.share_poly(t, mp[t]);
            MixedProfile prof = pe.match_profile(mp);
            for (int a = 0; a < g.actions(i); ++a)
              action_value[a] += w.scaled(tensor_value_unilateral(g, u, i, a, prof));
            return;
          }
          if (j == i) {
            self(self, j + 1);
            return;
          }
          for (int t = 0; t < pe.members(j); ++t) {
            mp[j] = t;
            self(self, j + 1);
          }
        };
        rec(rec, 0);
        Poly val(n);
        for (int a = 0; a < g.actions(i); ++a) val += action_value[a].scaled(own[a]);
        for (int a = 0; a < g.actions(i); ++a)
          if (!tighten(diagonal_nonneg_bound(val - action_value[a]))) return std::nullopt;
      }
    }
  }
  return bound;
}

void check_assignment_coverage(const PostEntry& pe) {
  const Configuration& c = pe.config();
  if (c.regime != Regime::kP0) {
    for (auto& mp : pe.mutant_profiles()) {
      pe.b_of(mp);  // throws when missing
      check_profile_shape(c.game, pe.b_of(mp));
    }
  }
  if (c.regime != Regime::kP1) {
    for (int j : pe.mutants().coalition) {
      MixedStrategy s = pe.s_of(j, c.mu.type_count(j));
      if (static_cast<int>(s.size()) != c.game.actions(j))
        throw StructuralError("mutant strategy dimension mismatch");
      check_mixed_strategy(s);
    }
  }
}

std::vector<DiffPolynomial> diff_polynomials(const PostEntry& pe) {
  std::vector<DiffPolynomial> out;
  for (int j : pe.mutants().coalition) {
    Poly mutant = pe.fitness(j, pe.config().mu.type_count(j));
    for (int t = 0; t < pe.config().mu.type_count(j); ++t) {
      DiffPolynomial d;
      d.population = j;
      d.incumbent_type = t;
      d.diff = mutant - pe.fitness(j, t);
      out.push_back(std::move(d));
    }
  }
  return out;
}

// Certificate acceptance on the diagonal: within (0, t), every coalition
// population keeps a comparison >= 0 (the mutant is not wiped out there) and
// some comparison is nonzero (no across-the-board coexistence).
struct DiagonalCheck {
  bool ok = false;
  bool all_strict = false;
  Rational bound;  // positive radius
};

DiagonalCheck check_diffs_on_diagonal(const std::vector<int>& coalition,
                                      const std::vector<DiffPolynomial>& diffs, const Rational& cap) {
  DiagonalCheck out;
  Rational bound = cap;
  bool any_nonzero = false;
  out.all_strict = true;
  for (int j : coalition) {
    bool witness = false;
    bool strict_all = true;
    for (auto& d : diffs) {
      if (d.population != j) continue;
      UPoly u = d.diff.restrict_to_diagonal();
      if (upoly_is_zero(u)) {
        witness = true;
        strict_all = false;
        continue;
      }
      any_nonzero = true;
      if (sign_near_zero_plus(u) > 0) {
        witness = true;
        auto root = diagonal_nonneg_bound(d.diff);
        if (root) bound = std::min(bound, *root);
      } else {
        strict_all = false;
      }
    }
    if (!witness) return out;  // population j wipes the mutant out
    if (!strict_all) out.all_strict = false;
  }
  if (!any_nonzero) return out;  // full coexistence, not an invasion
  if (bound <= 0) return out;
  out.ok = true;
  out.bound = bound;
  return out;
}

std::optional<InvaderCertificate> make_certificate(const Configuration& config,
                                                   const MutantSubProfile& mutants,
                                                   const MutantAssignment& assignment, const char* route,
                                                   bool require_all_strict = false) {
  PostEntry pe(config, mutants, assignment);
  check_assignment_coverage(pe);
  auto vb = validity_bound(pe);
  if (!vb) return std::nullopt;
  auto diffs = diff_polynomials(pe);
  auto check = check_diffs_on_diagonal(mutants.coalition, diffs, *vb);
  if (!check.ok || (require_all_strict && !check.all_strict)) return std::nullopt;
  InvaderCertificate cert;
  cert.mutants = mutants;
  cert.assignment = assignment;
  cert.diffs = diffs;
  cert.route = route;
  bool all_nonneg = true;
  for (auto& d : cert.diffs) all_nonneg = all_nonneg && d.diff.all_coeffs_nonnegative();
  if (all_nonneg) {
    cert.region.kind = ValidityRegion::kBox;
    cert.region.bound = *vb;
  } else {
    cert.region.kind = ValidityRegion::kDiagonal;
    cert.region.bound = check.bound;
  }
  return cert;
}

Rational fresh_indifferent_level(const Configuration& c, int pop) {
  Rational level = 0;
  for (;;) {
    bool clash = false;
    for (auto& t : c.mu.pops[pop].types)
      if (utilities_indifferent(t.utilities) && t.utilities[0] == level) clash = true;
    if (!clash) return level;
    level += 1;
  }
}

MutantSubProfile indifferent_mutants(const Configuration& c, const std::vector<int>& coalition) {
  MutantSubProfile m;
  m.coalition = coalition;
  for (int j : coalition) {
    m.types.emplace(j, indifferent_type(c.game, j, fresh_indifferent_level(c, j)));
    m.shares.emplace(j, Rational(1, 2));  // symbolic machinery ignores the value
  }
  return m;
}

}  // namespace

std::vector<DiffPolynomial> fitness_diff_polynomials(const Configuration& config,
                                                     const MutantSubProfile& mutants,
                                                     const MutantAssignment& assignment) {
  PostEntry pe(config, mutants, assignment);
  check_assignment_coverage(pe);
  if (!validity_bound(pe))
    throw StructuralError("assignment is not a post-entry equilibrium for small shares");
  return diff_polynomials(pe);
}

std::optional<Rational> assignment_validity_bound(const Configuration& config,
                                                  const MutantSubProfile& mutants,
                                                  const MutantAssignment& assignment) {
  PostEntry pe(config, mutants, assignment);
  check_assignment_coverage(pe);
  return validity_bound(pe);
}

Poly aggregate_fitness_diff(const Configuration& config, const MutantSubProfile& mutants,
                            const MutantAssignment& assignment) {
  PostEntry pe(config, mutants, assignment);
  check_assignment_coverage(pe);
  Poly total(config.game.players());
  for (int j : mutants.coalition) {
    // Lexicographically least incumbent as the reference type per population.
    total += pe.fitness(j, 0) - pe.fitness(j, config.mu.type_count(j));
  }
  return total;
}

Configuration materialize_post_entry(const Configuration& config, const MutantSubProfile& mutants,
                                     const MutantAssignment& assignment,
                                     const std::map<int, Rational>& shares) {
  MutantSubProfile concrete = mutants;
  for (auto& [j, eps] : shares) concrete.shares[j] = eps;
  Configuration out;
  out.game = config.game;
  out.mu = post_entry(config.game, config.mu, concrete);
  out.regime = config.regime;
  out.p = config.p;
  PostEntry pe(config, concrete, assignment);
  const int n = config.game.players();
  if (config.regime != Regime::kP0) {
    std::vector<int> counts;
    for (int j = 0; j < n; ++j) counts.push_back(pe.members(j));
    TypeIndexer post_idx(counts);
    StrategyFunctionObservable b;
    b.by_type_profile.resize(post_idx.total());
    for (int f = 0; f < post_idx.total(); ++f) b.by_type_profile[f] = pe.b_of(post_idx.at(f));
    out.b = std::move(b);
  }
  if (config.regime != Regime::kP1) {
    StrategyFunctionUnobservable s;
    s.by_pop_type.resize(n);
    for (int j = 0; j < n; ++j)
      for (int m = 0; m < pe.members(j); ++m) s.by_pop_type[j].push_back(pe.s_of(j, m));
    out.s = std::move(s);
  }
  return out;
}

bool certificate_valid(const Configuration& config, const InvaderCertificate& cert) {
  try {
    PostEntry pe(config, cert.mutants, cert.assignment);
    check_assignment_coverage(pe);
    auto vb = validity_bound(pe);
    if (!vb || *vb < cert.region.bound) return false;
    auto fresh = diff_polynomials(pe);
    if (fresh.size() != cert.diffs.size()) return false;
    for (size_t i = 0; i < fresh.size(); ++i)
      if (!(fresh[i].diff == cert.diffs[i].diff)) return false;
    auto check = check_diffs_on_diagonal(cert.mutants.coalition, fresh, cert.region.bound);
    if (!check.ok) return false;
    if (cert.region.kind == ValidityRegion::kBox) {
      for (auto& d : fresh)
        if (!d.diff.all_coeffs_nonnegative()) return false;
    }
    return true;
  } catch (const std::runtime_error&) {
    return false;
  }
}

// ---------------------------------------------------------------------------
// Invader constructions and search (perfect observability).
// ---------------------------------------------------------------------------

namespace {

// Secret-handshake construction: indifferent mutants in every population
// mimic the match they replace and coordinate on `target` when all matched
// players are mutants. `reference` picks which incumbent tuple they mimic.
MutantAssignment handshake_assignment(const Configuration& c, const MutantSubProfile& mutants,
                                      const std::vector<int>& reference, const MixedProfile& target) {
  MutantAssignment empty;
  PostEntry probe(c, mutants, empty);
  MutantAssignment a;
  auto idx = c.indexer();
  for (auto& mp : probe.mutant_profiles()) {
    bool all_mutant = true;
    std::vector<int> as_incumbent(mp);
    for (int j = 0; j < c.game.players(); ++j) {
      if (probe.is_mutant(j, mp[j])) {
        as_incumbent[j] = reference[j];
      } else {
        all_mutant = false;
      }
    }
    if (all_mutant && c.regime == Regime::kP1) {
      a.b_entries[mp] = target;
    } else if (c.regime == Regime::kP1) {
      a.b_entries[mp] = c.b->by_type_profile[idx.flat(as_incumbent)];
    } else {  // Partial: b~ mimics except the all-mutant match; s~ mimics.
      a.b_entries[mp] = all_mutant ? target : c.b->by_type_profile[idx.flat(as_incumbent)];
    }
  }
  if (c.regime != Regime::kP1)
    for (int j : mutants.coalition) a.s_mutant[j] = c.s->by_pop_type[j][reference[j]];
  return a;
}

std::optional<InvaderCertificate> invader_from_dominated_match(const Configuration& c,
                                                               const StabilityOptions& options) {
  auto idx = c.indexer();
  for (int f = 0; f < idx.total(); ++f) {
    const MixedProfile& outcome = c.b->by_type_profile[f];
    auto eff = efficiency_status(c.game, outcome, options.grid_resolution);
    if (eff.verdict != EfficiencyVerdict::kDominated &&
        eff.verdict != EfficiencyVerdict::kWeaklyEfficientOnly)
      continue;
    std::vector<int> all(c.game.players());
    for (int i = 0; i < c.game.players(); ++i) all[i] = i;
    auto mutants = indifferent_mutants(c, all);
    auto assignment = handshake_assignment(c, mutants, idx.at(f), *eff.dominator);
    auto cert = make_certificate(c, mutants, assignment, kRouteSecretHandshake);
    if (cert) return cert;
  }
  return std::nullopt;
}

std::optional<InvaderCertificate> invader_from_fitness_mismatch(const Configuration& c) {
  auto idx = c.indexer();
  const int n = c.game.players();
  for (int j = 0; j < n; ++j) {
    for (int t1 = 0; t1 < c.mu.type_count(j); ++t1)
      for (int t2 = 0; t2 < c.mu.type_count(j); ++t2) {
        if (t1 == t2) continue;
        // Opponent tuples are type profiles with population j's slot ignored.
        for (int f = 0; f < idx.total(); ++f) {
          auto tp = idx.at(f);
          if (tp[j] != t1) continue;
          auto tp2 = tp;
          tp2[j] = t2;
          Rational hi = expected_payoff(c.game, j, c.b->by_type_profile[idx.flat(tp)]);
          Rational lo = expected_payoff(c.game, j, c.b->by_type_profile[idx.flat(tp2)]);
          if (hi <= lo) continue;
          // Mutant in population j copies t1 against these opponents and t2
          // everywhere else; it beats incumbent t2 by the observed gap.
          auto mutants = indifferent_mutants(c, {j});
          MutantAssignment a;
          PostEntry probe(c, mutants, a);
          for (auto& mp : probe.mutant_profiles()) {
            auto as_incumbent = mp;
            bool same_opponents = true;
            for (int i = 0; i < n; ++i)
              if (i != j && mp[i] != tp[i]) same_opponents = false;
            as_incumbent[j] = same_opponents ? t1 : t2;
            a.b_entries[mp] = c.b->by_type_profile[idx.flat(as_incumbent)];
          }
          auto cert = make_certificate(c, mutants, a, kRouteFitnessMismatch);
          if (cert) return cert;
        }
      }
  }
  return std::nullopt;
}

// Candidate profiles for one mutant-involved match of the pure search:
// pure profiles whose incumbent components are subjective best responses,
// mimic candidate first.
std::vector<MixedProfile> match_candidates(const Configuration& c, const PostEntry& pe,
                                           const std::vector<int>& mp, bool monomorphic_filter) {
  const Game& g = c.game;
  auto idx = c.indexer();
  std::vector<MixedProfile> out;
  std::vector<int> as_incumbent(mp);
  for (int j = 0; j < g.players(); ++j)
    if (pe.is_mutant(j, mp[j])) as_incumbent[j] = 0;
  MixedProfile mimic = c.b->by_type_profile[idx.flat(as_incumbent)];

  int mutant_count = 0;
  for (int j = 0; j < g.players(); ++j)
    if (pe.is_mutant(j, mp[j])) ++mutant_count;

  auto valid = [&](const MixedProfile& prof) {
    for (int i = 0; i < g.players(); ++i) {
      const auto& u = pe.utilities(i, mp[i]);
      Rational val = tensor_value(g, u, prof);
      for (int dev = 0; dev < g.actions(i); ++dev)
        if (tensor_value_unilateral(g, u, i, dev, prof) > val) return false;
    }
    return true;
  };
  // Single-mutant matches in monomorphic configurations: the zero-order term
  // of the mutant's comparison is its fitness here minus the incumbent value,
  // so fitness-losing candidates can never certify and are dropped.
  Rational incumbent_value;
  bool filter = false;
  if (monomorphic_filter && mutant_count == 1) {
    int j = -1;
    for (int i = 0; i < g.players(); ++i)
      if (pe.is_mutant(i, mp[i])) j = i;
    incumbent_value = expected_payoff(g, j, mimic);
    filter = true;
    (void)j;
  }
  if (valid(mimic)) out.push_back(mimic);
  for (int f = 0; f < g.profile_count(); ++f) {
    MixedProfile prof = MixedProfile::pure(g, g.profile_at(f));
    if (prof.strategies == mimic.strategies) continue;
    if (!valid(prof)) continue;
    if (filter) {
      int j = -1;
      for (int i = 0; i < g.players(); ++i)
        if (pe.is_mutant(i, mp[i])) j = i;
      if (expected_payoff(g, j, prof) < incumbent_value) continue;
    }
    out.push_back(prof);
  }
  return out;
}

struct SearchOutcome {
  std::optional<InvaderCertificate> certificate;
  bool capped = false;
};

// Assignment enumeration for the pure invader search. Candidates are
// validated per match (the perfect-observability equilibrium conditions are
// per-match), so evaluating an assignment reduces to combining precomputed
// payoffs with fixed share-weight polynomials.
class P1SearchEngine {
 public:
  P1SearchEngine(const Configuration& c, const std::vector<int>& coalition)
      : c_(c), mutants_(indifferent_mutants(c, coalition)), pe_(c, mutants_, empty_) {
    matches_ = pe_.mutant_profiles();
    bool monomorphic = true;
    for (int i = 0; i < c.game.players(); ++i) monomorphic = monomorphic && c.mu.type_count(i) == 1;
    for (auto& mp : matches_) {
      match_index_[mp] = static_cast<int>(candidates_.size());
      candidates_.push_back(match_candidates(c, pe_, mp, monomorphic));
      std::vector<std::vector<Rational>> pays;
      for (auto& prof : candidates_.back()) pays.push_back(expected_payoff(c.game, prof));
      payoffs_.push_back(std::move(pays));
    }
    feasible_ = true;
    total_ = 1;
    for (auto& cand : candidates_) {
      if (cand.empty()) feasible_ = false;
      total_ *= std::max<long>(1, static_cast<long>(cand.size()));
      if (total_ > (1L << 60)) break;
    }
    build_comparisons();
  }

  bool feasible() const { return feasible_; }
  long total() const { return total_; }

  // 2 = all-strict certificate, 1 = weak certificate, 0 = none.
  int evaluate(long index, std::vector<DiffPolynomial>* diffs_out) const {
    std::vector<size_t> choice(matches_.size());
    for (size_t m = matches_.size(); m-- > 0;) {
      choice[m] = index % candidates_[m].size();
      index /= candidates_[m].size();
    }
    std::vector<DiffPolynomial> diffs;
    for (auto& cmp : comparisons_) {
      DiffPolynomial d;
      d.population = cmp.population;
      d.incumbent_type = cmp.incumbent_type;
      Poly acc(c_.game.players());
      for (auto& term : cmp.terms) {
        Rational mut = term.mutant_match >= 0 ? payoffs_[term.mutant_match][choice[term.mutant_match]]
                                                       [cmp.population]
                                              : term.mutant_fixed;
        Rational inc = term.incumbent_match >= 0
                           ? payoffs_[term.incumbent_match][choice[term.incumbent_match]][cmp.population]
                           : term.incumbent_fixed;
        if (mut != inc) acc += term.weight.scaled(mut - inc);
      }
      d.diff = std::move(acc);
      diffs.push_back(std::move(d));
    }
    auto check = check_diffs_on_diagonal(mutants_.coalition, diffs, Rational(1));
    if (!check.ok) return 0;
    if (diffs_out) *diffs_out = diffs;
    return check.all_strict ? 2 : 1;
  }

  InvaderCertificate certificate_at(long index) const {
    std::vector<size_t> choice(matches_.size());
    long rest = index;
    for (size_t m = matches_.size(); m-- > 0;) {
      choice[m] = rest % candidates_[m].size();
      rest /= candidates_[m].size();
    }
    MutantAssignment a;
    for (size_t m = 0; m < matches_.size(); ++m) a.b_entries[matches_[m]] = candidates_[m][choice[m]];
    auto cert = make_certificate(c_, mutants_, a, kRouteSearch);
    if (!cert) throw StructuralError("search certificate failed re-verification");
    return *cert;
  }

 private:
  struct Term {
    Poly weight;
    int mutant_match = -1;     // candidate table index, or -1 with fixed value
    int incumbent_match = -1;  // (all-incumbent matches have fixed payoffs)
    Rational mutant_fixed, incumbent_fixed;
  };
  struct Comparison {
    int population;
    int incumbent_type;
    std::vector<Term> terms;
  };

  void build_comparisons() {
    const int n = c_.game.players();
    auto idx = c_.indexer();
    for (int j : mutants_.coalition) {
      for (int t = 0; t < c_.mu.type_count(j); ++t) {
        Comparison cmp;
        cmp.population = j;
        cmp.incumbent_type = t;
        std::vector<int> mp(n, 0);
        auto rec = [&](auto&& self, int pop) -> void {
          if (pop == n) {
            Term term;
            term.weight = Poly::constant(n, 1);
            for (int i = 0; i < n; ++i)
              if (i != j) term.weight *= pe_.share_poly(i, mp[i]);
            auto with = mp;
            with[j] = c_.mu.type_count(j);  // the mutant
            auto it = match_index_.find(with);
            if (it != match_index_.end()) {
              term.mutant_match = it->second;
            } else {
              term.mutant_fixed = expected_payoff(c_.game, j, pe_.match_profile(with));
            }
            auto inc = mp;
            inc[j] = t;
            auto it2 = match_index_.find(inc);
            if (it2 != match_index_.end()) {
              term.incumbent_match = it2->second;
            } else {
              term.incumbent_fixed =
                  expected_payoff(c_.game, j, c_.b->by_type_profile[idx.flat(inc)]);
            }
            cmp.terms.push_back(std::move(term));
            return;
          }
          if (pop == j) {
            self(self, pop + 1);
            return;
          }
          for (int m = 0; m < pe_.members(pop); ++m) {
            mp[pop] = m;
            self(self, pop + 1);
          }
        };
        rec(rec, 0);
        comparisons_.push_back(std::move(cmp));
      }
    }
  }

  const Configuration& c_;
  MutantSubProfile mutants_;
  MutantAssignment empty_;
  PostEntry pe_;
  std::vector<std::vector<int>> matches_;
  std::map<std::vector<int>, int> match_index_;
  std::vector<std::vector<MixedProfile>> candidates_;
  std::vector<std::vector<std::vector<Rational>>> payoffs_;  // [match][candidate][player]
  std::vector<Comparison> comparisons_;
  bool feasible_ = false;
  long total_ = 0;
};

SearchOutcome pure_search_p1(const Configuration& c, const std::vector<int>& coalition,
                             const StabilityOptions& options) {
  SearchOutcome out;
  P1SearchEngine engine(c, coalition);
  if (!engine.feasible()) return out;
  long total = engine.total();
  if (total > options.max_assignments) {
    out.capped = true;
    total = options.max_assignments;
  }

  const long kStrictNone = -1;
  int workers = std::max(1, options.threads);
  if (total < 1024) workers = 1;
  std::vector<long> strict_hit(workers, kStrictNone), weak_hit(workers, kStrictNone);
  std::atomic<long> strict_cap{total};
  auto scan = [&](int w) {
    for (long i = w; i < total; i += workers) {
      if (i >= strict_cap.load(std::memory_order_relaxed)) break;
      int kind = engine.evaluate(i, nullptr);
      if (kind == 2) {
        strict_hit[w] = i;
        long cur = strict_cap.load(std::memory_order_relaxed);
        while (i < cur && !strict_cap.compare_exchange_weak(cur, i)) {
        }
        break;
      }
      if (kind == 1 && weak_hit[w] == kStrictNone) weak_hit[w] = i;
    }
  };
  if (workers == 1) {
    scan(0);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(scan, w);
    for (auto& th : pool) th.join();
  }
  long best_strict = kStrictNone, best_weak = kStrictNone;
  for (int w = 0; w < workers; ++w) {
    if (strict_hit[w] != kStrictNone && (best_strict == kStrictNone || strict_hit[w] < best_strict))
      best_strict = strict_hit[w];
    if (weak_hit[w] != kStrictNone && (best_weak == kStrictNone || weak_hit[w] < best_weak))
      best_weak = weak_hit[w];
  }
  if (best_strict != kStrictNone)
    out.certificate = engine.certificate_at(best_strict);
  else if (best_weak != kStrictNone)
    out.certificate = engine.certificate_at(best_weak);
  return out;
}

// ---------------------------------------------------------------------------
// No-observability constructions.
// ---------------------------------------------------------------------------

// Focal attempt: incumbents unchanged, mutants play fixed strategies.
std::optional<InvaderCertificate> p0_invader(const Configuration& c, const MutantSubProfile& mutants,
                                             const std::map<int, MixedStrategy>& strategies,
                                             const char* route) {
  MutantAssignment a;
  a.s_mutant = strategies;
  if (auto cert = make_certificate(c, mutants, a, route)) return cert;
  std::string why;
  auto nearby = nearby_equilibrium(c, mutants, strategies, &why);
  if (!nearby) return std::nullopt;
  return make_certificate(c, mutants, nearby->assignment, route);
}

}  // namespace

std::optional<InvaderCertificate> find_invader(const Configuration& config, const std::vector<int>& coalition,
                                               const StabilityOptions& options) {
  if (coalition.empty()) throw StructuralError("coalition must be nonempty");
  if (config.regime == Regime::kP1) {
    if (static_cast<int>(coalition.size()) == config.game.players()) {
      if (auto cert = invader_from_dominated_match(config, options)) return cert;
    }
    if (coalition.size() == 1) {
      if (auto cert = invader_from_fitness_mismatch(config)) return cert;
    }
    return pure_search_p1(config, coalition, options).certificate;
  }
  if (config.regime == Regime::kP0) {
    // Dominant-action entrants against a non-Nash aggregate outcome.
    auto agg = aggregate_outcome(config);
    for (int k : coalition) {
      if (coalition.size() != 1) break;
      for (int action = 0; action < config.game.actions(k); ++action) {
        Rational gain = unilateral_payoff(config.game, k, action, *agg.product) -
                        expected_payoff(config.game, k, *agg.product);
        if (gain <= 0) continue;
        MutantSubProfile mutants;
        mutants.coalition = {k};
        mutants.types.emplace(k, dominant_action_type(config.game, k, action));
        mutants.shares.emplace(k, Rational(1, 2));
        if (config.mu.pops[k].types.size() == 1 &&
            config.mu.pops[k].types[0].utilities == mutants.types.at(k).utilities)
          continue;
        MixedStrategy pure(config.game.actions(k), Rational(0));
        pure[action] = 1;
        if (auto cert = p0_invader(config, mutants, {{k, pure}}, kRouteNotNashP0)) return cert;
      }
    }
    return std::nullopt;
  }
  // Partial observability: secret-handshake entrants against a pure outcome.
  auto agg = aggregate_outcome(config);
  if (static_cast<int>(coalition.size()) != config.game.players()) return std::nullopt;
  auto idx = config.indexer();
  for (int f = 0; f < idx.total(); ++f) {
    const MixedProfile& outcome = config.b->by_type_profile[f];
    if (!outcome.is_pure()) continue;
    auto mutants = indifferent_mutants(config, coalition);
    // Coordination targets: the strong dominator first, then pure profiles.
    std::vector<MixedProfile> targets;
    auto eff = efficiency_status(config.game, outcome, options.grid_resolution);
    if (eff.dominator) targets.push_back(*eff.dominator);
    for (int t = 0; t < config.game.profile_count(); ++t)
      targets.push_back(MixedProfile::pure(config.game, config.game.profile_at(t)));
    for (auto& target : targets) {
      auto assignment = handshake_assignment(config, mutants, idx.at(f), target);
      if (auto cert = make_certificate(config, mutants, assignment, kRouteSecretHandshake)) return cert;
    }
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Nearby equilibria (no observability).
// ---------------------------------------------------------------------------

std::optional<NearbyResult> nearby_equilibrium(const Configuration& config, const MutantSubProfile& mutants,
                                               const std::map<int, MixedStrategy>& mutant_strategies,
                                               std::string* reason) {
  auto fail = [&](const std::string& why) -> std::optional<NearbyResult> {
    if (reason) *reason = why;
    return std::nullopt;
  };
  if (config.regime != Regime::kP0) return fail("nearby construction implemented for no observability");
  check_mutants(config.game, config.mu, mutants);
  const Game& g = config.game;
  const int n = g.players();

  for (int j : mutants.coalition)
    if (!mutant_strategies.count(j)) return fail("missing mutant strategy");

  // Route 1: aggregate-preserving rebalance. Every incumbent of a coalition
  // population shifts by the same formula, keeping the population mixture
  // exactly at its pre-entry value; all best-response sets are untouched.
  MutantAssignment a;
  a.s_mutant = mutant_strategies;
  bool aggregate_ok = true;
  Rational validity = 1;
  for (int j : mutants.coalition) {
    const MixedStrategy& q = mutant_strategies.at(j);
    Rational eps = mutants.shares.at(j);
    for (int t = 0; t < config.mu.type_count(j); ++t) {
      const MixedStrategy& base = config.s->by_pop_type[j][t];
      MixedStrategy adj(g.actions(j), Rational(0));
      for (int x = 0; x < g.actions(j); ++x) {
        if (q[x] > 0 && base[x] == 0) {
          aggregate_ok = false;
          break;
        }
        if (q[x] > 0) validity = std::min(validity, Rational(base[x] / q[x]));
        adj[x] = (base[x] - eps * q[x]) / (1 - eps);
      }
      if (!aggregate_ok) break;
      a.s_incumbent[{j, t}] = adj;
    }
    if (!aggregate_ok) break;
  }
  if (aggregate_ok) {
    for (int j : mutants.coalition)
      if (mutants.shares.at(j) >= validity)
        return fail("share " + format_rational(mutants.shares.at(j)) + " outside validity bound " +
                    format_rational(validity));
    PostEntry pe(config, mutants, a);
    // The equilibrium must verify exactly at the concrete shares.
    auto post = materialize_post_entry(config, mutants, a, {});
    if (validate_configuration(post).ok) {
      NearbyResult out;
      out.assignment = a;
      out.validity_bound = validity;
      out.distance_sq = 0;
      for (auto& [key, adj] : a.s_incumbent) {
        const MixedStrategy& base = config.s->by_pop_type[key.first][key.second];
        Rational d2 = 0;
        for (int x = 0; x < g.actions(key.first); ++x) d2 += (adj[x] - base[x]) * (adj[x] - base[x]);
        out.distance_sq = std::max(out.distance_sq, d2);
      }
      return out;
    }
  }

  // Route 2 (two players, monomorphic): keep incumbents on the support of
  // their pre-entry strategy and solve the opponent's indifference across
  // that support, Example-5 style.
  if (n != 2) return fail("support rebalancing implemented for two players");
  for (int i = 0; i < n; ++i)
    if (config.mu.type_count(i) != 1) return fail("support rebalancing needs monomorphic populations");

  MutantAssignment b;
  b.s_mutant = mutant_strategies;
  Rational dist_sq = 0;
  for (int j = 0; j < n; ++j) {
    if (!in_coalition(mutants, j)) continue;
    int opp = 1 - j;
    const MixedStrategy& base = config.s->by_pop_type[j][0];
    const MixedStrategy& q = mutant_strategies.at(j);
    Rational eps = mutants.shares.at(j);
    std::vector<int> support;
    for (int x = 0; x < g.actions(j); ++x)
      if (base[x] > 0) support.push_back(x);
    // Unknowns: incumbent weights on the support. Constraints: the opponent
    // type is indifferent across its own support against the post-entry
    // mixture (1-eps)*w + eps*q.
    const auto& opp_type = config.mu.pops[opp].types[0].utilities;
    const MixedStrategy& opp_strategy = config.s->by_pop_type[opp][0];
    std::vector<int> opp_support;
    for (int x = 0; x < g.actions(opp); ++x)
      if (opp_strategy[x] > 0) opp_support.push_back(x);
    auto value_against = [&](int opp_action, int j_action) {
      PureProfile pr(2);
      pr[opp] = opp_action;
      pr[j] = j_action;
      return opp_type[g.flat_index(pr)];
    };
    Mat rows;
    Vec rhs;
    for (size_t r = 1; r < opp_support.size(); ++r) {
      Vec row(support.size(), Rational(0));
      Rational c0 = 0;
      for (size_t t = 0; t < support.size(); ++t)
        row[t] = (1 - eps) * (value_against(opp_support[0], support[t]) -
                              value_against(opp_support[r], support[t]));
      for (int x = 0; x < g.actions(j); ++x)
        c0 += eps * q[x] * (value_against(opp_support[0], x) - value_against(opp_support[r], x));
      rows.push_back(row);
      rhs.push_back(-c0);
    }
    rows.push_back(Vec(support.size(), Rational(1)));
    rhs.push_back(1);
    auto sol = solve_linear(rows, rhs);
    if (!sol.consistent) return fail("support rebalancing system inconsistent");
    MixedStrategy adj(g.actions(j), Rational(0));
    for (size_t t = 0; t < support.size(); ++t) {
      if (sol.solution[t] < 0)
        return fail("share " + format_rational(eps) + " outside validity bound of the rebalancing");
      adj[support[t]] = sol.solution[t];
    }
    b.s_incumbent[{j, 0}] = adj;
    Rational d2 = 0;
    for (int x = 0; x < g.actions(j); ++x) d2 += (adj[x] - base[x]) * (adj[x] - base[x]);
    dist_sq = std::max(dist_sq, d2);
  }
  auto post = materialize_post_entry(config, mutants, b, {});
  if (!validate_configuration(post).ok)
    return fail("rebalanced strategies do not form a Bayesian-Nash equilibrium");
  NearbyResult out;
  out.assignment = b;
  out.distance_sq = dist_sq;
  out.validity_bound = 1;
  return out;
}

// ---------------------------------------------------------------------------
// Observability thresholds.
// ---------------------------------------------------------------------------

ObservabilityThresholds observability_thresholds(const Configuration& config, const PureProfile& a_star,
                                                 const std::optional<MixedProfile>& strong_dominator,
                                                 const std::optional<std::pair<int, int>>& deviation) {
  const Game& g = config.game;
  const int n = g.players();
  MixedProfile star = MixedProfile::pure(g, a_star);
  auto base = expected_payoff(g, star);
  ObservabilityThresholds out;

  if (strong_dominator) {
    if (dominance_relation(g, *strong_dominator, star) != Dominance::kStrong)
      throw StructuralError("profile does not strongly dominate the outcome");
    // Entrant advantage per player: observers jointly reach the dominator,
    // the ignorant stay on a*.
    Poly p = Poly::variable(1, 0);
    Poly one = Poly::constant(1, 1);
    Rational worst_root = 0;
    for (int i = 0; i < n; ++i) {
      Poly gi(1);
      for (int mask = 0; mask < (1 << n); ++mask) {
        MixedProfile prof = *strong_dominator;
        Poly w = Poly::constant(1, 1);
        for (int j = 0; j < n; ++j) {
          if (mask & (1 << j)) {  // ignorant
            prof.strategies[j] = star.strategies[j];
            w *= one - p;
          } else {
            w *= p;
          }
        }
        gi += w.scaled(expected_payoff(g, i, prof) - base[i]);
      }
      out.advantage_polys_high.push_back(gi);
      UPoly u = gi.restrict_to_diagonal();
      // Largest root in (0,1); the advantage is positive beyond it.
      auto roots = rational_roots(u);
      Rational last = 0;
      for (auto& r : roots)
        if (r > 0 && r < 1) last = std::max(last, r);
      int interior = count_roots(u, Rational(0), Rational(1)) - (upoly_eval(u, Rational(1)) == 0 ? 1 : 0);
      int found = 0;
      for (auto& r : roots)
        if (r > 0 && r < 1) ++found;
      if (found != interior) throw SolverLimitError("irrational observability threshold");
      if (!upoly_positive_on(u, last, Rational(1)))
        throw StructuralError("dominance advantage not positive near full observability");
      worst_root = std::max(worst_root, last);
    }
    out.p_bar_high = worst_root;
  }

  if (deviation) {
    for (int i = 0; i < n; ++i)
      if (config.mu.type_count(i) != 1)
        throw SolverLimitError("deviation threshold implemented for monomorphic populations");
    auto [k, action] = *deviation;
    Rational gain = unilateral_payoff(g, k, action, star) - base[k];
    if (gain <= 0) throw StructuralError("deviation is not profitable at the outcome");
    // Worst case over the observers' subjective replies to the entrant.
    Poly p = Poly::variable(1, 0);
    Poly one = Poly::constant(1, 1);
    std::optional<Rational> best;
    std::optional<Poly> best_poly;
    std::vector<int> others;
    for (int j = 0; j < n; ++j)
      if (j != k) others.push_back(j);
    std::vector<int> reply(others.size(), 0);
    for (;;) {
      // Observers' reply profile must be a subjective equilibrium among
      // themselves given the entrant's action (ignorant opponents keep a*).
      MixedProfile prof = star;
      MixedStrategy mk(g.actions(k), Rational(0));
      mk[action] = 1;
      prof.strategies[k] = mk;
      for (size_t t = 0; t < others.size(); ++t) {
        MixedStrategy r(g.actions(others[t]), Rational(0));
        r[reply[t]] = 1;
        prof.strategies[others[t]] = r;
      }
      bool valid = true;
      for (size_t t = 0; t < others.size() && valid; ++t) {
        int j = others[t];
        const auto& u = config.mu.pops[j].types[0].utilities;
        Rational val = tensor_value(g, u, prof);
        for (int dev = 0; dev < g.actions(j); ++dev)
          if (tensor_value_unilateral(g, u, j, dev, prof) > val) valid = false;
      }
      if (valid) {
        Poly gk(1);
        // z_j = p * reply_j + (1-p) * a*_j for each observerable opponent.
        for (int mask = 0; mask < (1 << static_cast<int>(others.size())); ++mask) {
          MixedProfile mix = prof;
          Poly w = Poly::constant(1, 1);
          for (size_t t = 0; t < others.size(); ++t) {
            if (mask & (1 << t)) {  // ignorant
              mix.strategies[others[t]] = star.strategies[others[t]];
              w *= one - p;
            } else {
              w *= p;
            }
          }
          gk += w.scaled(expected_payoff(g, k, mix) - base[k]);
        }
        UPoly u = gk.restrict_to_diagonal();
        Rational root = 1;
        auto first = [&]() -> std::optional<Rational> {
          try {
            return min_root_in(u, Rational(0), Rational(1));
          } catch (const SolverLimitError&) {
            return Rational(0);
          }
        }();
        if (first) root = *first;
        if (!best || root > *best) {
          best = root;
          best_poly = gk;
        }
      }
      int slot = static_cast<int>(others.size()) - 1;
      while (slot >= 0 && ++reply[slot] == g.actions(others[slot])) reply[slot--] = 0;
      if (slot < 0) break;
    }
    if (best) {
      out.p_bar_low = best;
      out.advantage_poly_low = best_poly;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Two-population bounding route (Example-1 pattern).
// ---------------------------------------------------------------------------

namespace {

struct ReplyRegion {
  int reply;                 // opponent's pure reply
  std::vector<Vec> vertices; // of { sigma : reply is a subjective best reply }
  bool mimic_only = false;   // region == { outcome strategy }
};

// Best-reply regions of population `k`'s (single) type against mixtures of
// population `d`; the region of reply r is a polytope in Delta(A_d).
std::vector<ReplyRegion> reply_regions(const Configuration& c, int d, int k) {
  const Game& g = c.game;
  const auto& u = c.mu.pops[k].types[0].utilities;
  std::vector<ReplyRegion> regions;
  auto util = [&](int ad, int ak) {
    PureProfile pr(2);
    pr[d] = ad;
    pr[k] = ak;
    return u[g.flat_index(pr)];
  };
  for (int r = 0; r < g.actions(k); ++r) {
    std::vector<std::pair<Vec, Rational>> cuts;
    for (int r2 = 0; r2 < g.actions(k); ++r2) {
      if (r2 == r) continue;
      Vec row(g.actions(d), Rational(0));
      for (int ad = 0; ad < g.actions(d); ++ad) row[ad] = util(ad, r2) - util(ad, r);
      cuts.push_back({row, Rational(0)});
    }
    ReplyRegion region;
    region.reply = r;
    region.vertices = polytope_vertices(g.actions(d), cuts);
    regions.push_back(std::move(region));
  }
  return regions;
}

Rational payoff_vs(const Game& g, int who, int pop_d, const Vec& sigma_d, int pop_k, int reply_k) {
  Rational total = 0;
  for (int ad = 0; ad < g.actions(pop_d); ++ad) {
    if (sigma_d[ad] == 0) continue;
    PureProfile pr(2);
    pr[pop_d] = ad;
    pr[pop_k] = reply_k;
    total += sigma_d[ad] * g.payoff(who, pr);
  }
  return total;
}

}  // namespace

std::optional<PairwiseBoundReport> pairwise_bounding(const Configuration& c, int grid_resolution) {
  const Game& g = c.game;
  if (g.players() != 2 || c.regime != Regime::kP1) return std::nullopt;
  for (int i = 0; i < 2; ++i)
    if (c.mu.type_count(i) != 1) return std::nullopt;
  const MixedProfile& outcome = c.b->by_type_profile[0];
  if (!outcome.is_pure()) return std::nullopt;
  PureProfile a_star = outcome.as_pure();
  std::vector<Rational> pi_star = expected_payoff(g, outcome);

  // Pareto efficiency of the outcome vector, certified over correlated
  // strategies (covers the all-mimic branch).
  if (correlated_dominance_slack(g, pi_star) != 0) return std::nullopt;

  for (int d = 0; d < 2; ++d) {
    const int k = 1 - d;
    std::vector<std::string> premises;
    premises.push_back("pi(a*) Pareto efficient (correlated LP slack 0)");

    // Mutant ceiling per reply region of the opponent type.
    auto regions_d = reply_regions(c, d, k);  // replies of k to mutants in d
    bool sound = true;
    Rational w_full_d = pi_star[d];
    Rational w_nonmimic = g.min_payoff(d);
    bool have_nonmimic = false;
    for (auto& region : regions_d) {
      if (region.vertices.empty()) continue;
      bool only_mimic = true;
      Rational best = g.min_payoff(d);
      for (auto& v : region.vertices) {
        Rational val = payoff_vs(g, d, d, v, k, region.reply);
        best = std::max(best, val);
        Vec mimic(g.actions(d), Rational(0));
        mimic[a_star[d]] = 1;
        if (v != mimic) only_mimic = false;
      }
      region.mimic_only = only_mimic;
      w_full_d = std::max(w_full_d, best);
      if (!only_mimic) {
        w_nonmimic = have_nonmimic ? std::max(w_nonmimic, best) : best;
        have_nonmimic = true;
      }
    }
    if (w_full_d > pi_star[d]) continue;  // a lone entrant could beat the incumbents
    premises.push_back("single entrants cannot exceed the incumbent fitness (reply-region maxima)");
    if (!have_nonmimic || w_nonmimic >= pi_star[d]) continue;
    premises.push_back("non-mimicking entrants fall short by a fixed margin in the defended population");

    // Protected population: outcome payoff is the global maximum.
    if (pi_star[k] != g.max_payoff(k)) continue;
    premises.push_back("protected population earns its maximal payoff at the outcome");
    // Symmetric single-entrant soundness for the protected population.
    auto regions_k = reply_regions(c, k, d);  // replies of d to mutants in k
    Rational w_full_k = pi_star[k];
    for (auto& region : regions_k)
      for (auto& v : region.vertices)
        w_full_k = std::max(w_full_k, payoff_vs(g, k, k, v, d, region.reply));
    if (w_full_k > pi_star[k]) continue;

    // Replies to a mimicking entrant in d: equal-payoff face must carry the
    // protected population to its maximum as well.
    const auto& u_k = c.mu.pops[k].types[0].utilities;
    std::vector<int> br_k_to_mimic;
    {
      Rational best = u_k[0];
      std::vector<Rational> vals;
      for (int r = 0; r < g.actions(k); ++r) {
        PureProfile pr(2);
        pr[d] = a_star[d];
        pr[k] = r;
        vals.push_back(u_k[g.flat_index(pr)]);
      }
      best = *std::max_element(vals.begin(), vals.end());
      for (int r = 0; r < g.actions(k); ++r)
        if (vals[r] == best) br_k_to_mimic.push_back(r);
    }
    Rational L = 0;
    bool r6 = true;
    for (int r : br_k_to_mimic) {
      PureProfile pr(2);
      pr[d] = a_star[d];
      pr[k] = r;
      Rational gd = pi_star[d] - g.payoff(d, pr);
      Rational gk = pi_star[k] - g.payoff(k, pr);
      if (gd == 0 && gk != 0) r6 = false;
      if (gd > 0) L = std::max(L, Rational(gk / gd));
    }
    if (!r6) continue;
    premises.push_back("replies preserving the defender's payoff preserve the protected one");

    // Frontier slope: product payoffs live in the hull of pure payoffs.
    Rational Q = 0;
    bool pe_ok = true;
    for (int f = 0; f < g.profile_count(); ++f) {
      Rational xd = g.payoff_flat(f)[d], yk = g.payoff_flat(f)[k];
      if (xd > pi_star[d]) {
        if (yk >= pi_star[k]) pe_ok = false;
        else Q = std::max(Q, Rational((xd - pi_star[d]) / (pi_star[k] - yk)));
      }
    }
    if (!pe_ok) continue;

    // Incumbent-reply slopes against entrants in the protected population.
    Rational K = 0;
    bool r9 = true;
    for (auto& region : regions_k) {
      for (auto& v : region.vertices) {
        Rational delta = pi_star[k] - payoff_vs(g, k, k, v, d, region.reply);
        Rational pd = payoff_vs(g, d, k, v, d, region.reply);
        if (delta == 0) {
          if (pd < pi_star[d]) r9 = false;
        } else if (pd < pi_star[d]) {
          K = std::max(K, Rational((pi_star[d] - pd) / delta));
        }
      }
    }
    if (!r9) continue;
    premises.push_back("entrant strategies that keep the protected payoff maximal also keep the defender whole");

    Rational spread = g.max_payoff(d) - g.min_payoff(d);
    Rational gap = pi_star[d] - w_nonmimic;
    Rational t_a = gap / (gap + spread);
    Rational lqk = L * Q + L * K;
    Rational t_b = std::min(Rational(1, 2), Rational(1) / (1 + lqk));

    PairwiseBoundReport report;
    report.defended = d;
    report.premises = premises;
    report.nonmimic_value_bound = w_nonmimic;
    report.barrier_nonmimic = t_a;
    report.barrier_mimic_branch = t_b;
    report.barrier = std::min(t_a, t_b);
    // Incumbent floor: pi_d(a*) (1 - e_k) + min pi_d * e_k.
    Poly ek = Poly::variable(2, k);
    report.incumbent_floor =
        (Poly::constant(2, 1) - ek).scaled(pi_star[d]) + ek.scaled(g.min_payoff(d));
    // Grid of entrant strategies with per-point ceilings and thresholds.
    for (auto& sigma : grid_strategies(g.actions(d), grid_resolution)) {
      PairwiseBoundReport::GridPoint pt;
      pt.sigma = sigma;
      bool any = false;
      Rational v = g.min_payoff(d);
      for (auto& region : regions_d) {
        if (region.mimic_only || region.vertices.empty()) continue;
        // Membership test: sigma inside region(reply)?
        bool inside = true;
        for (int r2 = 0; r2 < g.actions(k) && inside; ++r2) {
          Rational lhs = 0;
          for (int ad = 0; ad < g.actions(d); ++ad) {
            PureProfile p1(2), p2(2);
            p1[d] = ad;
            p1[k] = r2;
            p2[d] = ad;
            p2[k] = region.reply;
            lhs += sigma[ad] * (c.mu.pops[k].types[0].utilities[g.flat_index(p1)] -
                                c.mu.pops[k].types[0].utilities[g.flat_index(p2)]);
          }
          if (lhs > 0) inside = false;
        }
        if (!inside) continue;
        any = true;
        v = std::max(v, payoff_vs(g, d, d, sigma, k, region.reply));
      }
      if (!any) continue;
      pt.per_match_value = v;
      pt.ceiling = (Poly::constant(2, 1) - ek).scaled(v) + ek.scaled(g.max_payoff(d));
      Rational margin = pi_star[d] - v;
      if (margin > 0) pt.threshold = margin / (margin + g.max_payoff(d) - g.min_payoff(d));
      report.grid.push_back(std::move(pt));
    }
    return report;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// check_stability dispatch.
// ---------------------------------------------------------------------------

namespace {

bool all_single_action(const Game& g) {
  for (int i = 0; i < g.players(); ++i)
    if (g.actions(i) > 1) return false;
  return true;
}

bool dominant_type_populations(const Configuration& c, const PureProfile& a_star) {
  // Every incumbent type's subjectively dominant action is the outcome one.
  const Game& g = c.game;
  for (int i = 0; i < g.players(); ++i)
    for (auto& t : c.mu.pops[i].types) {
      for (int f = 0; f < g.profile_count(); ++f) {
        PureProfile prof = g.profile_at(f);
        if (prof[i] == a_star[i]) continue;
        PureProfile alt = prof;
        alt[i] = a_star[i];
        if (t.utilities[g.flat_index(alt)] <= t.utilities[f]) return false;
      }
    }
  return true;
}

Rational aggregate_strong_barrier(const Game& g, const PureProfile& a_star) {
  // min over subsets S of m_S / (m_S + D_S); deviations range over pure
  // sub-profiles fully off the outcome inside S.
  auto base = expected_payoff(g, MixedProfile::pure(g, a_star));
  Rational barrier = 1;
  for (auto& s : nonempty_subsets(g.players())) {
    Rational m_s;
    bool have_m = false;
    Rational d_s = 0;
    for (auto& sprime : nonempty_subsets(static_cast<int>(s.size()))) {
      std::vector<int> members;
      for (int pos : sprime) members.push_back(s[pos]);
      // All pure deviations with every member off its outcome action.
      std::vector<std::vector<int>> options;
      for (int j : members) {
        std::vector<int> alts;
        for (int a = 0; a < g.actions(j); ++a)
          if (a != a_star[j]) alts.push_back(a);
        options.push_back(alts);
      }
      bool any_empty = false;
      for (auto& o : options) any_empty = any_empty || o.empty();
      if (any_empty) continue;
      std::vector<size_t> cur(members.size(), 0);
      for (;;) {
        PureProfile dev = a_star;
        for (size_t t = 0; t < members.size(); ++t) dev[members[t]] = options[t][cur[t]];
        auto v = expected_payoff(g, MixedProfile::pure(g, dev));
        Rational drop = 0;
        for (int i : s) drop += base[i] - v[i];
        if (!have_m || drop < m_s) {
          m_s = drop;
          have_m = true;
        }
        for (int i = 0; i < g.players(); ++i) {
          bool inside = std::find(s.begin(), s.end(), i) != s.end();
          if (!inside && v[i] > base[i]) d_s = std::max(d_s, Rational(v[i] - base[i]));
        }
        int slot = static_cast<int>(members.size()) - 1;
        while (slot >= 0 && ++cur[slot] == options[slot].size()) cur[slot--] = 0;
        if (slot < 0) break;
      }
    }
    if (!have_m) continue;
    if (m_s <= 0) return 0;  // not actually aggregate strong
    barrier = std::min(barrier, Rational(m_s / (m_s + d_s)));
  }
  return barrier;
}

StabilityVerdict stable_verdict(const char* route, std::vector<std::string> premises,
                                std::optional<Rational> barrier) {
  StabilityVerdict v;
  v.kind = VerdictKind::kStable;
  v.route = route;
  v.premises = std::move(premises);
  v.uniform_barrier = barrier;
  return v;
}

StabilityVerdict unstable_verdict(InvaderCertificate cert) {
  StabilityVerdict v;
  v.kind = VerdictKind::kUnstable;
  v.route = cert.route;
  v.certificate = std::move(cert);
  return v;
}

StabilityVerdict unknown_verdict(const std::string& reason) {
  StabilityVerdict v;
  v.kind = VerdictKind::kUnknown;
  v.reason = reason;
  return v;
}

StabilityVerdict check_p1(const Configuration& c, const StabilityOptions& options) {
  const Game& g = c.game;
  // Necessity: a dominated equilibrium outcome or a fitness-vector mismatch
  // yields an explicit entrant.
  if (auto cert = invader_from_dominated_match(c, options)) return unstable_verdict(std::move(*cert));
  if (auto cert = invader_from_fitness_mismatch(c)) return unstable_verdict(std::move(*cert));

  std::optional<PureProfile> pure_outcome;
  {
    const MixedProfile& first = c.b->by_type_profile[0];
    bool constant_pure = first.is_pure();
    auto idx = c.indexer();
    for (int f = 1; f < idx.total() && constant_pure; ++f)
      constant_pure = c.b->by_type_profile[f].strategies == first.strategies;
    if (constant_pure) pure_outcome = first.as_pure();
  }
  if (pure_outcome) {
    if (is_aggregate_strong_nash(g, MixedProfile::pure(g, *pure_outcome)) &&
        dominant_type_populations(c, *pure_outcome)) {
      return stable_verdict(kRouteAggStrong,
                            {"outcome is an aggregate strong Nash equilibrium",
                             "every incumbent type has the outcome action strictly dominant"},
                            aggregate_strong_barrier(g, *pure_outcome));
    }
    if (g.players() == 2 && is_strict_nash(g, MixedProfile::pure(g, *pure_outcome)) &&
        dominant_type_populations(c, *pure_outcome)) {
      auto eff = efficiency_status(g, MixedProfile::pure(g, *pure_outcome), options.grid_resolution);
      if (eff.verdict == EfficiencyVerdict::kParetoEfficient) {
        StabilityVerdict v = stable_verdict(
            kRoutePEStrict,
            {"outcome is a Pareto-efficient strict Nash equilibrium (two players)",
             "every incumbent type has the outcome action strictly dominant"},
            std::nullopt);
        if (auto bounds = pairwise_bounding(c, options.grid_resolution)) {
          v.bounds = bounds;
          v.uniform_barrier = bounds->barrier;
        }
        return v;
      }
    }
  }
  if (auto bounds = pairwise_bounding(c, options.grid_resolution)) {
    StabilityVerdict v = stable_verdict(kRoutePairwise, bounds->premises, bounds->barrier);
    v.bounds = bounds;
    return v;
  }

  // General search over indifferent entrants with pure assignments.
  bool capped = false;
  for (auto& coalition : nonempty_subsets(g.players())) {
    auto outcome = pure_search_p1(c, coalition, options);
    if (outcome.certificate) return unstable_verdict(std::move(*outcome.certificate));
    capped = capped || outcome.capped;
  }
  return unknown_verdict(capped ? "solver-limit" : "search-exhausted");
}

StabilityVerdict check_p0(const Configuration& c, const StabilityOptions& options) {
  const Game& g = c.game;
  auto agg = aggregate_outcome(c);
  const MixedProfile& x = *agg.product;

  if (!is_nash(g, x)) {
    for (auto& coalition : nonempty_subsets(g.players())) {
      if (coalition.size() != 1) continue;
      if (auto cert = find_invader(c, coalition, options)) return unstable_verdict(std::move(*cert));
    }
    return unknown_verdict("aggregate outcome is not Nash but no constructive entrant verified");
  }

  bool materialist = true;
  for (int i = 0; i < g.players(); ++i)
    for (auto& t : c.mu.pops[i].types)
      materialist = materialist && utilities_materialist(g, i, t.utilities);
  if (materialist) {
    if (x.is_pure() && is_strict_nash(g, x))
      return stable_verdict(kRouteMaterialist,
                            {"materialist populations", "aggregate outcome is a strict Nash equilibrium"},
                            std::nullopt);
    auto cls = [&]() -> std::optional<NashClassification> {
      try {
        return classify_nash(g, x, options.support_limit);
      } catch (const std::runtime_error&) {
        return std::nullopt;
      }
    }();
    if (cls && cls->completely_mixed)
      return stable_verdict(kRouteMaterialist,
                            {"materialist populations", "aggregate outcome is completely mixed"},
                            std::nullopt);
    if (cls && cls->unique == TriState::kYes)
      return stable_verdict(kRouteMaterialist,
                            {"materialist populations", "aggregate outcome is the unique Nash equilibrium"},
                            std::nullopt);
    return unknown_verdict("materialist route needs a strict, completely mixed, or unique equilibrium; "
                           "nearby-equilibrium construction fails otherwise");
  }

  // Dominant-type coexistence route (two players).
  if (g.players() == 2 && x.is_pure()) {
    PureProfile a_star = x.as_pure();
    if (dominant_type_populations(c, a_star)) {
      // Tie faces: actions with the outcome payoff against the outcome.
      std::vector<std::vector<int>> ties(2);
      auto base = expected_payoff(g, x);
      for (int i = 0; i < 2; ++i)
        for (int a = 0; a < g.actions(i); ++a)
          if (unilateral_payoff(g, i, a, x) == base[i]) ties[i].push_back(a);
      bool face_equal = true;
      for (int t1 : ties[0])
        for (int t2 : ties[1]) {
          PureProfile sel{t1, t2};
          face_equal = face_equal && g.payoff(0, sel) == base[0] && g.payoff(1, sel) == base[1];
        }
      if (face_equal) {
        Rational m;
        bool have = false;
        for (int i = 0; i < 2; ++i)
          for (int a = 0; a < g.actions(i); ++a) {
            if (std::find(ties[i].begin(), ties[i].end(), a) != ties[i].end()) continue;
            Rational gap = base[i] - unilateral_payoff(g, i, a, x);
            if (!have || gap < m) {
              m = gap;
              have = true;
            }
          }
        Rational spread = std::max(g.max_payoff(0) - g.min_payoff(0), g.max_payoff(1) - g.min_payoff(1));
        Rational barrier = have ? m / (m + 2 * spread) : Rational(1);
        return stable_verdict(kRouteDominantP0,
                              {"every incumbent type has the outcome action strictly dominant",
                               "aggregate outcome is a Nash equilibrium",
                               "tied deviations replicate the outcome fitness exactly"},
                              barrier);
      }
    }
  }
  return unknown_verdict("search-exhausted");
}

StabilityVerdict check_partial(const Configuration& c, const StabilityOptions& options) {
  const Game& g = c.game;
  auto idx = c.indexer();
  std::optional<PureProfile> pure_outcome;
  {
    bool constant_pure = c.b->by_type_profile[0].is_pure();
    for (int f = 0; f < idx.total() && constant_pure; ++f)
      constant_pure = c.b->by_type_profile[f].strategies == c.b->by_type_profile[0].strategies;
    if (constant_pure) {
      for (int i = 0; i < g.players() && constant_pure; ++i)
        for (int t = 0; t < c.mu.type_count(i) && constant_pure; ++t)
          constant_pure = c.s->by_pop_type[i][t] == c.b->by_type_profile[0].strategies[i];
      if (constant_pure) pure_outcome = c.b->by_type_profile[0].as_pure();
    }
  }
  if (!pure_outcome)
    return unknown_verdict("partial-observability analysis covers pure-strategy outcomes");
  PureProfile a_star = *pure_outcome;
  MixedProfile star = MixedProfile::pure(g, a_star);

  // Destabilization by coordinated entrants above the dominance threshold.
  auto eff = efficiency_status(g, star, options.grid_resolution);
  if (eff.dominator && eff.dominator_kind == Dominance::kStrong) {
    auto th = observability_thresholds(c, a_star, eff.dominator, std::nullopt);
    if (th.p_bar_high && c.p > *th.p_bar_high) {
      std::vector<int> all(g.players());
      for (int i = 0; i < g.players(); ++i) all[i] = i;
      auto mutants = indifferent_mutants(c, all);
      auto assignment = handshake_assignment(c, mutants, idx.at(0), *eff.dominator);
      if (auto cert = make_certificate(c, mutants, assignment, kRouteHighObs))
        return unstable_verdict(std::move(*cert));
    }
  }
  // Destabilization by a best-responding entrant below the Nash threshold.
  if (!is_nash(g, star)) {
    for (int k = 0; k < g.players(); ++k)
      for (int action = 0; action < g.actions(k); ++action) {
        if (unilateral_payoff(g, k, action, star) <= expected_payoff(g, k, star)) continue;
        auto th = observability_thresholds(c, a_star, std::nullopt, std::make_pair(k, action));
        if (!th.p_bar_low || c.p >= *th.p_bar_low) continue;
        MutantSubProfile mutants;
        mutants.coalition = {k};
        mutants.types.emplace(k, dominant_action_type(g, k, action));
        mutants.shares.emplace(k, Rational(1, 2));
        bool clash = false;
        for (auto& inc : c.mu.pops[k].types)
          clash = clash || inc.utilities == mutants.types.at(k).utilities;
        if (clash) continue;
        MutantAssignment a;
        MixedStrategy pure(g.actions(k), Rational(0));
        pure[action] = 1;
        a.s_mutant[k] = pure;
        // Entrant plays its dominant action whether observing or observed.
        PostEntry probe(c, mutants, a);
        for (auto& mp : probe.mutant_profiles()) {
          auto as_incumbent = mp;
          as_incumbent[k] = 0;
          MixedProfile bp = c.b->by_type_profile[idx.flat(as_incumbent)];
          bp.strategies[k] = pure;
          a.b_entries[mp] = bp;
        }
        if (auto cert = make_certificate(c, mutants, a, kRouteLowObs))
          return unstable_verdict(std::move(*cert));
      }
  }

  // Robust sufficiency routes.
  if (is_aggregate_strong_nash(g, star) && dominant_type_populations(c, a_star))
    return stable_verdict(kRouteAggStrong,
                          {"outcome is an aggregate strong Nash equilibrium",
                           "every incumbent type has the outcome action strictly dominant",
                           "holds for every observability degree"},
                          aggregate_strong_barrier(g, a_star));
  if (g.players() == 2 && is_strict_nash(g, star) && dominant_type_populations(c, a_star) &&
      eff.verdict == EfficiencyVerdict::kParetoEfficient)
    return stable_verdict(kRoutePEStrict,
                          {"outcome is a Pareto-efficient strict Nash equilibrium (two players)",
                           "every incumbent type has the outcome action strictly dominant",
                           "holds for every observability degree"},
                          std::nullopt);

  // Secret-handshake search at this exact observability degree.
  std::vector<int> all(g.players());
  for (int i = 0; i < g.players(); ++i) all[i] = i;
  if (auto cert = find_invader(c, all, options)) return unstable_verdict(std::move(*cert));
  return unknown_verdict("search-exhausted");
}

}  // namespace

StabilityVerdict check_stability(const Configuration& config, const StabilityOptions& options) {
  auto validation = validate_configuration(config);
  if (!validation.ok) throw ContractError("check_stability requires a validated configuration");
  if (all_single_action(config.game))
    return stable_verdict(kRouteDegenerate, {"single-action game: entrants cannot alter any outcome"},
                          Rational(1));
  if (!is_balanced(config)) {
    StabilityVerdict v;
    v.kind = VerdictKind::kUnstable;
    v.route = kRouteBalance;
    for (int i = 0; i < config.game.players(); ++i) {
      Rational first = average_fitness(config, i, 0);
      for (int t = 1; t < config.mu.type_count(i); ++t)
        if (average_fitness(config, i, t) != first)
          v.balance_violations.push_back(
              {{}, i, -1,
               "incumbent types 0 and " + std::to_string(t) + " earn different average fitness"});
    }
    return v;
  }
  switch (config.regime) {
    case Regime::kP1:
      return check_p1(config, options);
    case Regime::kP0:
      return check_p0(config, options);
    case Regime::kPartial:
      return check_partial(config, options);
  }
  return unknown_verdict("bad regime");
}

std::optional<Rational> uniform_invasion_barrier(const Configuration& config,
                                                 const StabilityVerdict& verdict) {
  if (verdict.kind != VerdictKind::kStable) return std::nullopt;
  if (all_single_action(config.game)) return Rational(1);
  return verdict.uniform_barrier;
}

}  // namespace prefstab
