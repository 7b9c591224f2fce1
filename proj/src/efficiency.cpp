#include "prefstab/efficiency.hpp"

#include "prefstab/equilibrium.hpp"
#include "prefstab/linalg.hpp"

namespace prefstab {

Dominance dominance_relation(const Game& g, const MixedProfile& sigma, const MixedProfile& sigma_prime) {
  auto a = expected_payoff(g, sigma);
  auto b = expected_payoff(g, sigma_prime);
  bool all_ge = true, all_gt = true, some_gt = false;
  for (int i = 0; i < g.players(); ++i) {
    if (a[i] < b[i]) all_ge = false;
    if (a[i] <= b[i]) all_gt = false;
    if (a[i] > b[i]) some_gt = true;
  }
  if (all_gt) return Dominance::kStrong;
  if (all_ge && some_gt) return Dominance::kWeak;
  return Dominance::kNone;
}

namespace {

// Shared scaffolding: variables phi(a) for every pure profile plus extras.
LinearProgram base_program(const Game& g, int extra_vars) {
  LinearProgram lp;
  const int na = g.profile_count();
  lp.nvars = na + extra_vars;
  lp.objective.assign(lp.nvars, Rational(0));
  Vec ones(lp.nvars, Rational(0));
  for (int a = 0; a < na; ++a) ones[a] = 1;
  lp.eq.push_back({ones, Rational(1)});
  return lp;
}

}  // namespace

Rational correlated_dominance_slack(const Game& g, const std::vector<Rational>& target) {
  const int na = g.profile_count();
  const int n = g.players();
  LinearProgram lp = base_program(g, n);  // extra vars: t_i
  for (int i = 0; i < n; ++i) lp.objective[na + i] = 1;
  for (int i = 0; i < n; ++i) {
    // target_i + t_i - pi_i(phi) <= 0
    Vec row(lp.nvars, Rational(0));
    for (int a = 0; a < na; ++a) row[a] = -g.payoff_flat(a)[i];
    row[na + i] = 1;
    lp.le.push_back({row, -target[i]});
  }
  auto res = solve_lp(lp);
  if (res.status != LpResult::kOptimal) throw StructuralError("dominance LP must be bounded and feasible");
  return res.value;
}

Rational correlated_strong_slack(const Game& g, const std::vector<Rational>& target) {
  const int na = g.profile_count();
  const int n = g.players();
  LinearProgram lp = base_program(g, 1);  // extra var: m
  lp.objective[na] = 1;
  for (int i = 0; i < n; ++i) {
    Vec row(lp.nvars, Rational(0));
    for (int a = 0; a < na; ++a) row[a] = -g.payoff_flat(a)[i];
    row[na] = 1;
    lp.le.push_back({row, -target[i]});
  }
  auto res = solve_lp(lp);
  if (res.status != LpResult::kOptimal) throw StructuralError("dominance LP must be bounded and feasible");
  return res.value;
}

EfficiencyResult efficiency_status(const Game& g, const MixedProfile& sigma, int grid_resolution) {
  if (grid_resolution < 1) throw StructuralError("grid_resolution must be >= 1");
  check_profile_shape(g, sigma);
  auto target = expected_payoff(g, sigma);

  EfficiencyResult out;
  out.lp_slack = correlated_dominance_slack(g, target);
  if (out.lp_slack == 0) {
    out.verdict = EfficiencyVerdict::kParetoEfficient;
    out.weakly_efficient = true;
    return out;
  }
  out.weakly_efficient = correlated_strong_slack(g, target) == 0;

  // Dominator search in the paper's product-strategy sense: pure profiles
  // first, then the weight grid; strong dominators take precedence.
  std::optional<MixedProfile> weak_witness;
  auto scan = [&](const MixedProfile& cand) -> bool {
    Dominance d = dominance_relation(g, cand, sigma);
    if (d == Dominance::kStrong) {
      out.dominator = cand;
      out.dominator_kind = Dominance::kStrong;
      return true;
    }
    if (d == Dominance::kWeak && !weak_witness) weak_witness = cand;
    return false;
  };
  for (int f = 0; f < g.profile_count(); ++f)
    if (scan(MixedProfile::pure(g, g.profile_at(f)))) break;
  if (!out.dominator) {
    std::vector<std::vector<MixedStrategy>> grids;
    for (int i = 0; i < g.players(); ++i) grids.push_back(grid_strategies(g.actions(i), grid_resolution));
    std::vector<size_t> cur(g.players(), 0);
    bool done = false;
    while (!done) {
      MixedProfile cand;
      for (int i = 0; i < g.players(); ++i) cand.strategies.push_back(grids[i][cur[i]]);
      if (scan(cand)) break;
      int slot = g.players() - 1;
      while (slot >= 0 && ++cur[slot] == grids[slot].size()) cur[slot--] = 0;
      done = slot < 0;
    }
  }

  if (out.dominator) {
    out.verdict = EfficiencyVerdict::kDominated;
    return out;
  }
  if (weak_witness) {
    out.dominator = weak_witness;
    out.dominator_kind = Dominance::kWeak;
    // Weakly dominated only; when the strict-slack LP rules out strong
    // dominators the profile is weakly efficient but not Pareto efficient.
    out.verdict = out.weakly_efficient ? EfficiencyVerdict::kWeaklyEfficientOnly
                                       : EfficiencyVerdict::kDominated;
    return out;
  }
  // Correlated dominators exist but no product witness at this resolution.
  out.verdict = EfficiencyVerdict::kUnknown;
  return out;
}

}  // namespace prefstab
