#include "prefstab/dynamics.hpp"

#include <ostream>

namespace prefstab {

std::vector<TrajectoryPoint> simulate(const Configuration& config, const MutantSubProfile& mutants,
                                      const MutantAssignment& assignment, int steps,
                                      const ReplicatorRule& rule) {
  if (steps <= 0) throw StructuralError("steps must be positive");
  Configuration post = materialize_post_entry(config, mutants, assignment, {});
  const int n = post.game.players();
  Rational shift;
  if (rule.shift) {
    shift = *rule.shift;
    if (shift <= 0) throw StructuralError("replicator shift must be positive");
  } else {
    Rational lo = post.game.min_payoff(0);
    for (int i = 1; i < n; ++i) lo = std::min(lo, post.game.min_payoff(i));
    shift = 1 + (lo < 0 ? -lo : lo);
  }

  std::vector<TrajectoryPoint> out;
  for (int step = 0; step <= steps; ++step) {
    TrajectoryPoint pt;
    pt.step = step;
    pt.shares.resize(n);
    pt.fitness.resize(n);
    for (int i = 0; i < n; ++i) {
      pt.shares[i] = post.mu.pops[i].shares;
      for (int t = 0; t < post.mu.type_count(i); ++t) pt.fitness[i].push_back(average_fitness(post, i, t));
    }
    out.push_back(pt);
    if (step == steps) break;
    for (int i = 0; i < n; ++i) {
      Rational fmin = pt.fitness[i][0];
      for (auto& f : pt.fitness[i]) fmin = std::min(fmin, f);
      std::vector<Rational> weight(post.mu.type_count(i));
      Rational total = 0;
      for (int t = 0; t < post.mu.type_count(i); ++t) {
        weight[t] = post.mu.pops[i].shares[t] * (pt.fitness[i][t] - fmin + shift);
        total += weight[t];
      }
      for (int t = 0; t < post.mu.type_count(i); ++t) post.mu.pops[i].shares[t] = weight[t] / total;
    }
  }
  return out;
}

void write_trajectory_csv(std::ostream& os, const std::vector<TrajectoryPoint>& trajectory) {
  os << "step,population,type_id,share,fitness\n";
  for (auto& pt : trajectory)
    for (size_t i = 0; i < pt.shares.size(); ++i)
      for (size_t t = 0; t < pt.shares[i].size(); ++t)
        os << pt.step << "," << i << "," << t << "," << format_rational(pt.shares[i][t]) << ","
           << format_rational(pt.fitness[i][t]) << "\n";
}

}  // namespace prefstab
