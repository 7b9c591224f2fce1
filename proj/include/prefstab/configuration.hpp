#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "prefstab/game.hpp"
#include "prefstab/poly.hpp"

namespace prefstab {

// A preference type is a utility tensor over pure action profiles for one
// player role. Tags are validated claims, not free-form labels.
struct PreferenceType {
  int role = 0;
  std::vector<Rational> utilities;  // indexed by flat pure profile
  bool materialist_tag = false;
  bool indifferent_tag = false;
  std::string name;  // optional, serialization only
};

bool utilities_materialist(const Game& g, int role, const std::vector<Rational>& u);
bool utilities_indifferent(const std::vector<Rational>& u);
PreferenceType indifferent_type(const Game& g, int role, const Rational& level = 0);
PreferenceType materialist_type(const Game& g, int role);
// Utility tensor with `action` strictly dominant for `role` (subjective).
PreferenceType dominant_action_type(const Game& g, int role, int action);

struct Population {
  std::vector<PreferenceType> types;
  std::vector<Rational> shares;
};

struct PreferenceDistribution {
  std::vector<Population> pops;

  int populations() const { return static_cast<int>(pops.size()); }
  int type_count(int i) const { return static_cast<int>(pops[i].types.size()); }
  const Rational& share(int i, int t) const { return pops[i].shares[t]; }
};

void check_distribution(const Game& g, const PreferenceDistribution& mu);

// Odometer over type profiles (one incumbent type index per population),
// player-0-major so iteration order is lexicographic.
class TypeIndexer {
 public:
  explicit TypeIndexer(std::vector<int> counts);
  int total() const { return total_; }
  int flat(const std::vector<int>& tp) const;
  std::vector<int> at(int flat) const;

 private:
  std::vector<int> counts_, stride_;
  int total_;
};

// b: supp mu -> profiles, one Nash profile of the matched subjective game per
// type profile; indexed flat via TypeIndexer over incumbent type counts.
struct StrategyFunctionObservable {
  std::vector<MixedProfile> by_type_profile;
};

// s: per population, one mixed strategy per incumbent type.
struct StrategyFunctionUnobservable {
  std::vector<std::vector<MixedStrategy>> by_pop_type;
};

enum class Regime { kP1, kP0, kPartial };

struct Configuration {
  Game game;
  PreferenceDistribution mu;
  Regime regime = Regime::kP1;
  Rational p;  // degree of observability, Partial only, strictly in (0,1)
  std::optional<StrategyFunctionObservable> b;
  std::optional<StrategyFunctionUnobservable> s;

  TypeIndexer indexer() const;
  // Per-player behavior of the matched tuple `tp`; in the Partial regime this
  // is the observation mixture z_i = p*b_i(theta) + (1-p)*s_i(theta_i).
  MixedProfile match_profile(const std::vector<int>& tp) const;
  Rational mu_weight(const std::vector<int>& tp) const;       // prod_i mu_i(t_i)
  Rational mu_weight_excluding(const std::vector<int>& tp, int skip) const;
};

struct Violation {
  std::vector<int> type_profile;  // empty for structural findings
  int population = -1;
  int deviation = -1;  // action index
  std::string message;
};

struct ValidationReport {
  bool ok = true;
  std::vector<Violation> violations;
};

// Checks structure plus the regime-appropriate equilibrium condition under
// the subjective utilities. Equilibrium failures are reported, not thrown.
ValidationReport validate_configuration(const Configuration& config);

struct AggregateOutcome {
  CorrelatedStrategy correlated;
  std::optional<MixedProfile> product;  // P0: the inducing profile x(mu, s)
};

AggregateOutcome aggregate_outcome(const Configuration& config);

Rational average_fitness(const Configuration& config, int population, int type_index);
// Partial-regime average fitness as a polynomial in the observability degree
// (single variable); P1/P0 values are its evaluations at 1 and 0.
Poly average_fitness_observability_poly(const Configuration& config, int population, int type_index);

bool is_balanced(const Configuration& config);

struct MutantSubProfile {
  std::vector<int> coalition;                 // sorted, nonempty
  std::map<int, PreferenceType> types;        // per coalition member
  std::map<int, Rational> shares;             // per coalition member, in (0,1)

  Rational norm() const;
};

void check_mutants(const Game& g, const PreferenceDistribution& mu, const MutantSubProfile& mutants);

PreferenceDistribution post_entry(const Game& g, const PreferenceDistribution& mu,
                                  const MutantSubProfile& mutants);

}  // namespace prefstab
