#pragma once

#include <map>
#include <string>
#include <vector>

#include "prefstab/rational.hpp"

namespace prefstab {

using PureProfile = std::vector<int>;        // action index per player
using MixedStrategy = std::vector<Rational>; // weight per action of one player

struct GameLimits {
  int max_players = 4;
  int max_actions = 6;
};

// Finite n-player normal-form game with a dense exact-rational payoff tensor.
// Immutable after construction; profiles are indexed player-0-major so that
// flat order equals lexicographic order on action indices.
class Game {
 public:
  Game() : n_(0) {}  // empty placeholder, to be assigned before use
  Game(std::vector<std::vector<std::string>> action_labels,
       std::vector<std::vector<Rational>> payoffs,  // [flat profile][player]
       const GameLimits& limits = GameLimits{});

  int players() const { return n_; }
  int actions(int player) const { return static_cast<int>(labels_[player].size()); }
  const std::vector<std::string>& action_labels(int player) const { return labels_[player]; }
  int profile_count() const { return static_cast<int>(payoffs_.size()); }

  int flat_index(const PureProfile& a) const;
  PureProfile profile_at(int flat) const;

  const std::vector<Rational>& payoff(const PureProfile& a) const { return payoffs_[flat_index(a)]; }
  const std::vector<Rational>& payoff_flat(int flat) const { return payoffs_[flat]; }
  Rational payoff(int player, const PureProfile& a) const { return payoffs_[flat_index(a)][player]; }

  Rational min_payoff(int player) const;
  Rational max_payoff(int player) const;

  // Lexicographic enumeration of the full cross product A.
  std::vector<PureProfile> all_profiles() const;

 private:
  int n_;
  std::vector<std::vector<std::string>> labels_;
  std::vector<std::vector<Rational>> payoffs_;
  std::vector<int> stride_;
};

struct MixedProfile {
  std::vector<MixedStrategy> strategies;  // one per player

  bool operator==(const MixedProfile&) const = default;
  static MixedProfile pure(const Game& g, const PureProfile& a);
  bool is_pure() const;
  // Action indices when pure; throws StructuralError otherwise.
  PureProfile as_pure() const;
};

struct CorrelatedStrategy {
  std::vector<Rational> weights;  // per flat profile
};

void check_mixed_strategy(const MixedStrategy& s);
void check_profile_shape(const Game& g, const MixedProfile& p);
void check_correlated_shape(const Game& g, const CorrelatedStrategy& c);

// Multilinear extension of the payoff tensor.
std::vector<Rational> expected_payoff(const Game& g, const MixedProfile& p);
std::vector<Rational> expected_payoff(const Game& g, const CorrelatedStrategy& c);
Rational expected_payoff(const Game& g, int player, const MixedProfile& p);

// phi_sigma(a) = prod_i sigma_i(a_i)
CorrelatedStrategy induced_correlated(const Game& g, const MixedProfile& p);

Rational coalition_payoff_sum(const Game& g, const std::vector<int>& coalition, const MixedProfile& p);

// Expected payoff to `player` when they play `strategy` and everyone else
// follows `p`; the workhorse for best-response checks.
Rational unilateral_payoff(const Game& g, int player, const MixedStrategy& strategy, const MixedProfile& p);

// Same, where the deviant plays a pure action.
Rational unilateral_payoff(const Game& g, int player, int action, const MixedProfile& p);

// Expected value of an arbitrary utility tensor (indexed per flat profile)
// under a mixed profile; used for subjective-game best-response checks.
Rational tensor_value(const Game& g, const std::vector<Rational>& tensor, const MixedProfile& p);
Rational tensor_value_unilateral(const Game& g, const std::vector<Rational>& tensor, int player, int action,
                                 const MixedProfile& p);

}  // namespace prefstab
