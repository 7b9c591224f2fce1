#pragma once

#include <iosfwd>
#include <vector>

#include "prefstab/stability.hpp"

namespace prefstab {

struct TrajectoryPoint {
  int step = 0;
  std::vector<std::vector<Rational>> shares;   // per population, per member
  std::vector<std::vector<Rational>> fitness;  // per population, per member
};

struct ReplicatorRule {
  // share'(m) proportional to share(m) * (fitness(m) - f_min + shift), with
  // f_min the population's minimum fitness this step. The default shift keeps
  // every weight strictly positive for arbitrary payoff signs.
  std::optional<Rational> shift;  // default: 1 + |min payoff|
};

// Discrete-time replicator over post-entry type shares. Strategies stay
// frozen at the assignment (preference evolution is slow against learning);
// fitness is recomputed each step from the current shares.
std::vector<TrajectoryPoint> simulate(const Configuration& config, const MutantSubProfile& mutants,
                                      const MutantAssignment& assignment, int steps,
                                      const ReplicatorRule& rule = ReplicatorRule{});

// step,population,type_id,share,fitness with exact rationals.
void write_trajectory_csv(std::ostream& os, const std::vector<TrajectoryPoint>& trajectory);

}  // namespace prefstab
