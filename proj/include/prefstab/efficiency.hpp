#pragma once

#include <optional>

#include "prefstab/game.hpp"

namespace prefstab {

enum class Dominance { kNone, kWeak, kStrong };

// Weak = the paper's "Pareto dominates": >= everywhere, > somewhere.
Dominance dominance_relation(const Game& g, const MixedProfile& sigma, const MixedProfile& sigma_prime);

enum class EfficiencyVerdict { kParetoEfficient, kWeaklyEfficientOnly, kDominated, kUnknown };

struct EfficiencyResult {
  EfficiencyVerdict verdict = EfficiencyVerdict::kUnknown;
  // Product-strategy dominator (pure or grid) when verdict == kDominated.
  std::optional<MixedProfile> dominator;
  Dominance dominator_kind = Dominance::kNone;
  bool weakly_efficient = false;  // no strong dominator exists (LP-certified)
  Rational lp_slack;              // optimum of the correlated dominance LP
};

// Phase 1: exact LP over correlated strategies. Slack 0 certifies Pareto
// efficiency (no correlated dominator implies no product one). Phase 2:
// pure then grid product search for an explicit dominator. A correlated
// dominator without a product witness stays kUnknown.
EfficiencyResult efficiency_status(const Game& g, const MixedProfile& sigma, int grid_resolution);

// Optimum of max sum t_i s.t. pi_i(phi) >= target_i + t_i, t_i >= 0, phi in
// Delta(A). Zero iff no correlated weak dominator of `target` exists.
Rational correlated_dominance_slack(const Game& g, const std::vector<Rational>& target);

// Optimum of max m s.t. pi_i(phi) >= target_i + m for all i, m >= 0.
// Zero iff no correlated strong dominator exists.
Rational correlated_strong_slack(const Game& g, const std::vector<Rational>& target);

}  // namespace prefstab
