#include "prefstab/equilibrium.hpp"

#include <algorithm>

#include "prefstab/linalg.hpp"
#include "prefstab/poly.hpp"

namespace prefstab {

bool is_nash(const Game& g, const MixedProfile& p) {
  check_profile_shape(g, p);
  auto value = expected_payoff(g, p);
  for (int i = 0; i < g.players(); ++i)
    for (int a = 0; a < g.actions(i); ++a)
      if (unilateral_payoff(g, i, a, p) > value[i]) return false;
  return true;
}

bool is_strict_nash(const Game& g, const MixedProfile& p) {
  check_profile_shape(g, p);
  PureProfile x = p.as_pure();
  auto value = expected_payoff(g, p);
  for (int i = 0; i < g.players(); ++i)
    for (int a = 0; a < g.actions(i); ++a) {
      if (a == x[i]) continue;
      if (unilateral_payoff(g, i, a, p) >= value[i]) return false;
    }
  return true;
}

std::vector<PureProfile> enumerate_pure_nash(const Game& g) {
  std::vector<PureProfile> out;
  for (int f = 0; f < g.profile_count(); ++f) {
    PureProfile a = g.profile_at(f);
    if (is_nash(g, MixedProfile::pure(g, a))) out.push_back(a);
  }
  return out;
}

std::vector<std::vector<int>> nonempty_subsets(int n) {
  std::vector<std::vector<int>> out;
  for (int mask = 1; mask < (1 << n); ++mask) {
    std::vector<int> s;
    for (int i = 0; i < n; ++i)
      if (mask & (1 << i)) s.push_back(i);
    out.push_back(s);
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    return a < b;
  });
  return out;
}

std::vector<MixedStrategy> grid_strategies(int dim, int grid) {
  std::vector<MixedStrategy> out;
  MixedStrategy cur(dim, Rational(0));
  auto rec = [&](auto&& self, int slot, int left) -> void {
    if (slot == dim - 1) {
      cur[slot] = Rational(left, grid);
      out.push_back(cur);
      return;
    }
    for (int k = left; k >= 0; --k) {
      cur[slot] = Rational(k, grid);
      self(self, slot + 1, left - k);
    }
  };
  if (dim >= 1 && grid >= 1) rec(rec, 0, grid);
  return out;
}

namespace {

std::vector<std::vector<int>> supports_of_size_upto(int dim, int limit) {
  std::vector<std::vector<int>> out;
  for (int mask = 1; mask < (1 << dim); ++mask) {
    std::vector<int> s;
    for (int i = 0; i < dim; ++i)
      if (mask & (1 << i)) s.push_back(i);
    if (static_cast<int>(s.size()) <= limit) out.push_back(s);
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    return a < b;
  });
  return out;
}

void append_if_new(std::vector<MixedProfile>& list, const MixedProfile& p) {
  for (auto& q : list)
    if (q.strategies == p.strategies) return;
  list.push_back(p);
}

// Two-player support pair: exact indifference/feasibility solve.
void solve_support_2p(const Game& g, const std::vector<int>& s1, const std::vector<int>& s2,
                      MixedNashResult& res) {
  // Unknowns: weights of player 2 on s2 (make player 1 indifferent over s1),
  // then weights of player 1 on s1 (make player 2 indifferent over s2).
  struct SideResult {
    bool found = false;
    bool degenerate = false;  // underdetermined indifference system
    MixedStrategy strategy;
  };
  auto solve_side = [&](int mover, int opp, const std::vector<int>& sm, const std::vector<int>& so) {
    // Opponent strategy over `so` equalizing mover's payoff across `sm`.
    SideResult out;
    Mat a;
    Vec b;
    const int k = static_cast<int>(so.size());
    for (size_t r = 1; r < sm.size(); ++r) {
      Vec row(k, Rational(0));
      for (int c = 0; c < k; ++c) {
        PureProfile pr(2);
        pr[mover] = sm[0];
        pr[opp] = so[c];
        Rational base = g.payoff(mover, pr);
        pr[mover] = sm[r];
        row[c] = base - g.payoff(mover, pr);
      }
      a.push_back(row);
      b.push_back(0);
    }
    a.push_back(Vec(k, Rational(1)));
    b.push_back(1);
    auto sol = solve_linear(a, b);
    if (!sol.consistent) return out;
    out.degenerate = !sol.unique;
    if (out.degenerate && k > 1) {
      // Pick an interior representative when the solution set allows one:
      // average the basic solution with the uniform point if feasible.
      bool interior = true;
      for (auto& w : sol.solution) interior = interior && w > 0;
      if (!interior) {
        Vec uniform(k, Rational(1, k));
        bool uniform_solves = true;
        for (size_t r = 0; r + 1 < a.size(); ++r) {
          Rational lhs = 0;
          for (int c = 0; c < k; ++c) lhs += a[r][c] * uniform[c];
          uniform_solves = uniform_solves && lhs == 0;
        }
        if (uniform_solves) sol.solution = uniform;
      }
    }
    for (auto& w : sol.solution)
      if (w <= 0) return out;  // outside the interior of this support
    out.found = true;
    out.strategy.assign(g.actions(opp), Rational(0));
    for (int c = 0; c < k; ++c) out.strategy[so[c]] = sol.solution[c];
    return out;
  };

  auto y = solve_side(0, 1, s1, s2);
  auto x = solve_side(1, 0, s2, s1);
  if (y.degenerate || x.degenerate) res.complete = false;  // continuum of solutions
  if (!y.found || !x.found) return;
  MixedProfile p;
  p.strategies = {x.strategy, y.strategy};
  if (is_nash(g, p)) append_if_new(res.equilibria, p);
}

struct Bilinear {  // c0 + cu*u + cv*v + cuv*u*v
  Rational c0, cu, cv, cuv;
  Rational eval(const Rational& u, const Rational& v) const { return c0 + cu * u + cv * v + cuv * u * v; }
};

// Player `i` of a 3-player game, support {a,a'}, opponents j<k with
// strategies parameterized by one weight each (or fixed pure actions).
// Returns the indifference form in the opponents' free weights.
Bilinear indifference_form(const Game& g, int i, int ai0, int ai1, int j, int sj0, int sj1, int k, int sk0,
                           int sk1) {
  // Opponent j plays sj0 with weight u, sj1 with 1-u (sj1 < 0 means pure sj0,
  // u formally 1); same for k with v.
  auto diff = [&](int aj, int ak) {
    PureProfile p(3);
    p[i] = ai0;
    p[j] = aj;
    p[k] = ak;
    Rational hi = g.payoff(i, p);
    p[i] = ai1;
    return hi - g.payoff(i, p);
  };
  Bilinear f{0, 0, 0, 0};
  if (sj1 < 0 && sk1 < 0) {
    f.c0 = diff(sj0, sk0);
  } else if (sj1 < 0) {
    f.c0 = diff(sj0, sk1);
    f.cv = diff(sj0, sk0) - diff(sj0, sk1);
  } else if (sk1 < 0) {
    f.c0 = diff(sj1, sk0);
    f.cu = diff(sj0, sk0) - diff(sj1, sk0);
  } else {
    f.c0 = diff(sj1, sk1);
    f.cu = diff(sj0, sk1) - diff(sj1, sk1);
    f.cv = diff(sj1, sk0) - diff(sj1, sk1);
    f.cuv = diff(sj0, sk0) - diff(sj0, sk1) - diff(sj1, sk0) + diff(sj1, sk1);
  }
  return f;
}

void solve_support_3p(const Game& g, const std::vector<std::vector<int>>& sup, MixedNashResult& res) {
  // sup[i] has size 1 or 2. Unknown weight per support-2 player.
  std::vector<int> free_players;
  for (int i = 0; i < 3; ++i)
    if (sup[i].size() == 2) free_players.push_back(i);

  auto build_profile = [&](const std::vector<Rational>& w) -> std::optional<MixedProfile> {
    MixedProfile p;
    int wi = 0;
    for (int i = 0; i < 3; ++i) {
      MixedStrategy s(g.actions(i), Rational(0));
      if (sup[i].size() == 1) {
        s[sup[i][0]] = 1;
      } else {
        Rational u = w[wi++];
        if (u <= 0 || u >= 1) return std::nullopt;  // interior of the support
        s[sup[i][0]] = u;
        s[sup[i][1]] = 1 - u;
      }
      p.strategies.push_back(std::move(s));
    }
    return p;
  };
  auto try_accept = [&](const std::vector<Rational>& w) {
    auto p = build_profile(w);
    if (p && is_nash(g, *p)) append_if_new(res.equilibria, *p);
  };

  auto form_for = [&](int i) {
    int j = -1, k = -1;
    for (int t = 0; t < 3; ++t)
      if (t != i) (j < 0 ? j : k) = t;
    return indifference_form(g, i, sup[i][0], sup[i][1], j, sup[j][0], sup[j].size() == 2 ? sup[j][1] : -1, k,
                             sup[k][0], sup[k].size() == 2 ? sup[k][1] : -1);
  };

  const size_t nfree = free_players.size();
  if (nfree == 0) {
    try_accept({});
    return;
  }
  if (nfree == 1) {
    // The free player's indifference involves only pure opponents: it is a
    // constant; zero constant means a continuum over the free weight.
    Bilinear f = form_for(free_players[0]);
    if (f.c0 == 0) {
      res.complete = false;
      try_accept({Rational(1, 2)});
    }
    return;
  }
  if (nfree == 2) {
    // Each support-2 player's indifference is linear in the other's weight.
    int p1 = free_players[0], p2 = free_players[1];
    Bilinear f1 = form_for(p1);  // depends on the other free player only
    Bilinear f2 = form_for(p2);
    auto linear_root = [&](const Bilinear& f, bool var_is_first) -> std::optional<std::optional<Rational>> {
      // f as alpha * t + beta; returns nullopt if inconsistent, inner
      // nullopt if identically zero (continuum).
      Rational alpha = var_is_first ? f.cu : f.cv;
      Rational beta = f.c0;
      if (alpha == 0) {
        if (beta != 0) return std::nullopt;
        return std::optional<std::optional<Rational>>(std::optional<Rational>());
      }
      return std::optional<std::optional<Rational>>(std::optional<Rational>(-beta / alpha));
    };
    // f1 constrains the weight of the *other* free player; the form's u-slot
    // is the lower-indexed opponent.
    auto slot_of = [&](int focal, int target) {
      int j = -1, k = -1;
      for (int t = 0; t < 3; ++t)
        if (t != focal) (j < 0 ? j : k) = t;
      return target == j;  // true: u-slot, false: v-slot
    };
    auto r1 = linear_root(f1, slot_of(p1, p2));
    auto r2 = linear_root(f2, slot_of(p2, p1));
    if (!r1 || !r2) return;
    std::optional<Rational> w2 = *r1;  // weight of p2 from p1's indifference
    std::optional<Rational> w1 = *r2;
    if (!w1 && !w2) {
      res.complete = false;
      try_accept({Rational(1, 2), Rational(1, 2)});
      return;
    }
    if (!w1) {
      res.complete = false;
      w1 = Rational(1, 2);
    }
    if (!w2) {
      res.complete = false;
      w2 = Rational(1, 2);
    }
    try_accept({*w1, *w2});
    return;
  }

  // Three support-2 players: eliminate down to one variable.
  // Unknowns u0,u1,u2 = weights of players 0,1,2 on their first support
  // action. g0(u1,u2)=0, g1(u0,u2)=0, g2(u0,u1)=0.
  Bilinear g0 = form_for(0), g1 = form_for(1), g2 = form_for(2);
  // From g1: u0*(cu + cuv*u2) = -(c0 + cv*u2)  [u-slot of g1 is player 0]
  // From g2: u0*(cu + cuv*u1) = -(c0 + cv*u1)  [u-slot of g2 is player 0]
  // From g0: relates u1 (u-slot) and u2 (v-slot).
  // Solve g0 for u1 in terms of u2: u1 = -(c0 + cv*u2)/(cu + cuv*u2).
  // Substitute into g2 to express u0, then match with g1's expression;
  // clearing denominators yields a univariate polynomial in u2.
  auto num_den_u1 = [&](const Poly& u2, int nv) {  // over vars {u2}
    Poly num = Poly::constant(nv, -g0.c0) - u2.scaled(g0.cv);
    Poly den = Poly::constant(nv, g0.cu) + u2.scaled(g0.cuv);
    return std::make_pair(num, den);
  };
  const int nv = 1;
  Poly u2 = Poly::variable(nv, 0);
  auto [n1, d1] = num_den_u1(u2, nv);  // u1 = n1/d1
  // g2(u0,u1)=0 -> u0 = -(c0 + cv*u1)/(cu + cuv*u1) = -(c0*d1 + cv*n1)/(cu*d1 + cuv*n1)
  Poly n0 = (d1.scaled(-g2.c0) - n1.scaled(g2.cv));
  Poly d0 = (d1.scaled(g2.cu) + n1.scaled(g2.cuv));
  // g1(u0,u2)=0 -> c0 + cu*u0 + cv*u2 + cuv*u0*u2 = 0, multiply by d0:
  Poly resultant = d0.scaled(g1.c0) + n0.scaled(g1.cu) + (u2 * d0).scaled(g1.cv) + (u2 * n0).scaled(g1.cuv);
  UPoly uni = resultant.restrict_to_ray({Rational(1)});
  if (upoly_is_zero(uni)) {
    res.complete = false;  // continuum
    return;
  }
  auto roots = rational_roots(uni);
  int interior = count_roots(uni, Rational(0), Rational(1)) - (upoly_eval(uni, Rational(1)) == 0 ? 1 : 0);
  int rational_interior = 0;
  for (auto& r : roots)
    if (r > 0 && r < 1) ++rational_interior;
  if (rational_interior < interior) res.complete = false;  // irrational branch
  for (auto& r : roots) {
    if (r <= 0 || r >= 1) continue;
    Rational den1v = g0.cu + g0.cuv * r;
    if (den1v == 0) {
      res.complete = false;
      continue;
    }
    Rational u1v = (-g0.c0 - g0.cv * r) / den1v;
    Rational den0v = g2.cu + g2.cuv * u1v;
    if (den0v == 0) {
      res.complete = false;
      continue;
    }
    Rational u0v = (-g2.c0 - g2.cv * u1v) / den0v;
    try_accept({u0v, u1v, r});
  }
}

}  // namespace

MixedNashResult solve_mixed_nash(const Game& g, int support_limit) {
  if (support_limit < 1) throw StructuralError("support_limit must be >= 1");
  MixedNashResult res;
  const int n = g.players();
  if (n == 2) {
    auto s1s = supports_of_size_upto(g.actions(0), support_limit);
    auto s2s = supports_of_size_upto(g.actions(1), support_limit);
    for (auto& s1 : s1s)
      for (auto& s2 : s2s) solve_support_2p(g, s1, s2, res);
    return res;
  }
  if (n == 3) {
    int lim = std::min(support_limit, 2);
    if (support_limit > 2) res.complete = false;  // declared solver limit
    auto s1s = supports_of_size_upto(g.actions(0), lim);
    auto s2s = supports_of_size_upto(g.actions(1), lim);
    auto s3s = supports_of_size_upto(g.actions(2), lim);
    for (auto& s1 : s1s)
      for (auto& s2 : s2s)
        for (auto& s3 : s3s) solve_support_3p(g, {s1, s2, s3}, res);
    return res;
  }
  throw SolverLimitError("solve_mixed_nash supports two or three players");
}

NashClassification classify_nash(const Game& g, const MixedProfile& p, int support_limit) {
  if (!is_nash(g, p)) throw ContractError("classify_nash requires a Nash equilibrium");
  NashClassification out;
  out.strict = p.is_pure() && is_strict_nash(g, p);
  out.completely_mixed = true;
  for (int i = 0; i < g.players(); ++i)
    for (int a = 0; a < g.actions(i); ++a)
      if (p.strategies[i][a] == 0) out.completely_mixed = false;

  int full_support = 0;
  for (int i = 0; i < g.players(); ++i) full_support = std::max(full_support, g.actions(i));
  int limit = std::max(support_limit, full_support);
  std::vector<MixedProfile> all;
  bool complete = true;
  try {
    auto mixed = solve_mixed_nash(g, limit);
    complete = mixed.complete;
    all = mixed.equilibria;
  } catch (const SolverLimitError&) {
    complete = false;
  }
  for (auto& a : enumerate_pure_nash(g)) {
    MixedProfile q = MixedProfile::pure(g, a);
    bool seen = false;
    for (auto& e : all) seen = seen || e.strategies == q.strategies;
    if (!seen) all.push_back(q);
  }
  int distinct = 0;
  bool self_seen = false;
  for (auto& e : all) {
    ++distinct;
    if (e.strategies == p.strategies) self_seen = true;
  }
  if (!self_seen) ++distinct;
  if (distinct >= 2)
    out.unique = TriState::kNo;
  else
    out.unique = complete ? TriState::kYes : TriState::kUnknown;
  return out;
}

bool is_aggregate_strong_nash(const Game& g, const MixedProfile& p) {
  check_profile_shape(g, p);
  PureProfile x = p.as_pure();
  for (auto& coalition : nonempty_subsets(g.players())) {
    Rational base = coalition_payoff_sum(g, coalition, p);
    // All pure coalition deviations a_J != x_J.
    std::vector<int> dims;
    for (int j : coalition) dims.push_back(g.actions(j));
    std::vector<int> cur(coalition.size(), 0);
    for (;;) {
      bool same = true;
      for (size_t t = 0; t < coalition.size(); ++t) same = same && cur[t] == x[coalition[t]];
      if (!same) {
        PureProfile dev = x;
        for (size_t t = 0; t < coalition.size(); ++t) dev[coalition[t]] = cur[t];
        if (coalition_payoff_sum(g, coalition, MixedProfile::pure(g, dev)) >= base) return false;
      }
      int slot = static_cast<int>(coalition.size()) - 1;
      while (slot >= 0 && ++cur[slot] == dims[slot]) cur[slot--] = 0;
      if (slot < 0) break;
    }
  }
  return true;
}

StrictlyStrongResult is_strictly_strong_nash(const Game& g, const MixedProfile& p, int grid_resolution) {
  check_profile_shape(g, p);
  if (grid_resolution < 1) throw StructuralError("grid_resolution must be >= 1");
  PureProfile x = p.as_pure();
  StrictlyStrongResult out;
  auto base = expected_payoff(g, p);
  for (auto& coalition : nonempty_subsets(g.players())) {
    // Candidate deviations: pure profiles plus a grid over mixtures.
    std::vector<std::vector<MixedStrategy>> per_member;
    for (int j : coalition) per_member.push_back(grid_strategies(g.actions(j), grid_resolution));
    std::vector<size_t> cur(coalition.size(), 0);
    for (;;) {
      MixedProfile dev = p;
      bool same = true;
      for (size_t t = 0; t < coalition.size(); ++t) {
        dev.strategies[coalition[t]] = per_member[t][cur[t]];
        same = same && dev.strategies[coalition[t]] == p.strategies[coalition[t]];
      }
      if (!same) {
        auto v = expected_payoff(g, dev);
        bool someone_hurt = false;
        for (int j : coalition) someone_hurt = someone_hurt || v[j] < base[j];
        if (!someone_hurt) {
          out.verdict = TriState::kNo;
          out.coalition = coalition;
          out.deviation = dev;
          return out;
        }
      }
      int slot = static_cast<int>(coalition.size()) - 1;
      while (slot >= 0 && ++cur[slot] == per_member[slot].size()) cur[slot--] = 0;
      if (slot < 0) break;
    }
  }
  if (is_aggregate_strong_nash(g, p)) {
    out.verdict = TriState::kYes;
    return out;
  }
  out.verdict = TriState::kUnknown;
  return out;
}

}  // namespace prefstab
