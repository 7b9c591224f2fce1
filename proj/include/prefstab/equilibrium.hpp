#pragma once

#include <optional>
#include <vector>

#include "prefstab/game.hpp"

namespace prefstab {

bool is_nash(const Game& g, const MixedProfile& p);

// Pure input only; every unilateral pure deviation must strictly lose.
bool is_strict_nash(const Game& g, const MixedProfile& p);

// Lexicographic by action index.
std::vector<PureProfile> enumerate_pure_nash(const Game& g);

struct MixedNashResult {
  std::vector<MixedProfile> equilibria;  // all pass is_nash, deterministic order
  bool complete = true;                  // false beyond declared solver limits
};

// Support enumeration: exact linear systems for two players, rational
// elimination for three players with supports of size <= 2. Degenerate
// (continuum) supports and irrational roots flip `complete` to false; a
// representative equilibrium is still reported when one is found.
MixedNashResult solve_mixed_nash(const Game& g, int support_limit);

enum class TriState { kYes, kNo, kUnknown };

struct NashClassification {
  bool strict = false;
  bool completely_mixed = false;
  TriState unique = TriState::kUnknown;
};

NashClassification classify_nash(const Game& g, const MixedProfile& p, int support_limit);

// Pure input; every coalition's payoff sum must drop strictly under every
// coalition deviation. Pure deviations suffice: the coalition sum is
// multilinear in sigma_J, so its maximum over deviations is attained at a
// vertex, and any mixed sigma_J != x_J keeps weight < 1 on x_J.
bool is_aggregate_strong_nash(const Game& g, const MixedProfile& p);

// `no` is certified by an explicit deviation; `yes` only through the
// aggregate-strong sufficient condition. The existential quantifier over
// coalition members is not reducible to pure deviations, hence `unknown`.
struct StrictlyStrongResult {
  TriState verdict = TriState::kUnknown;
  std::vector<int> coalition;            // witness for `no`
  std::optional<MixedProfile> deviation; // witness for `no`
};

StrictlyStrongResult is_strictly_strong_nash(const Game& g, const MixedProfile& p, int grid_resolution);

// All nonempty subsets of {0..n-1}, by size then lexicographic.
std::vector<std::vector<int>> nonempty_subsets(int n);

// Weight vectors over `dim` actions with entries in multiples of 1/grid.
std::vector<MixedStrategy> grid_strategies(int dim, int grid);

}  // namespace prefstab
