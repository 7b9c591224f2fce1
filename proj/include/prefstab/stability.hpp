#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "prefstab/configuration.hpp"
#include "prefstab/efficiency.hpp"
#include "prefstab/poly.hpp"

namespace prefstab {

struct StabilityOptions {
  int grid_resolution = 10;
  int support_limit = 6;
  long max_assignments = 4000000;  // search cap; beyond -> solver-limit Unknown
  int threads = 1;
};

// Strategies of a post-entry environment on mutant-involved matches.
// Member indices per population: 0..K_i-1 incumbents, K_i the mutant.
struct MutantAssignment {
  // P1/Partial: per mutant-involved member profile, the match profile b~.
  std::map<std::vector<int>, MixedProfile> b_entries;
  // P0/Partial: mutant strategies s~_j per coalition population.
  std::map<int, MixedStrategy> s_mutant;
  // Nearby equilibria: incumbents' adjusted strategies (population, type).
  std::map<std::pair<int, int>, MixedStrategy> s_incumbent;
};

struct DiffPolynomial {
  int population = 0;
  int incumbent_type = 0;
  Poly diff;  // Pi_mutant - Pi_incumbent in the eps variables (one per population)
};

struct ValidityRegion {
  enum Kind { kBox, kDiagonal } kind = kDiagonal;
  // Box: eps_j in (0, bound) each; diagonal: eps_j = t, t in (0, bound).
  Rational bound;
};

struct InvaderCertificate {
  MutantSubProfile mutants;
  MutantAssignment assignment;
  std::vector<DiffPolynomial> diffs;
  ValidityRegion region;
  std::string route;
};

enum class VerdictKind { kStable, kUnstable, kUnknown };

struct PairwiseBoundReport {
  int defended = 0;               // population whose bound drives the barrier
  Poly incumbent_floor;           // lower bound on the incumbent's fitness
  struct GridPoint {
    MixedStrategy sigma;          // mutant strategy against incumbents
    Rational per_match_value;     // bound on the mutant's per-match fitness
    Poly ceiling;                 // upper bound on the mutant's fitness
    std::optional<Rational> threshold;  // eps below which floor > ceiling
  };
  std::vector<GridPoint> grid;
  Rational nonmimic_value_bound;  // sup of per-match values off the mimic point
  Rational barrier_nonmimic;      // kills any non-mimicking mutant in `defended`
  Rational barrier_mimic_branch;  // covers the mimic/cross branch
  Rational barrier;               // min of the two
  std::vector<std::string> premises;
};

struct StabilityVerdict {
  VerdictKind kind = VerdictKind::kUnknown;
  std::string route;
  std::vector<std::string> premises;
  std::optional<InvaderCertificate> certificate;
  std::optional<Rational> uniform_barrier;
  std::optional<PairwiseBoundReport> bounds;
  std::string reason;  // Unknown: search-exhausted | solver-limit | ...
  std::vector<Violation> balance_violations;
};

// Exact symbolic expansion of Pi_mutant - Pi_incumbent per (population in J,
// incumbent type). Throws StructuralError when the assignment is not a valid
// (focal/nearby) post-entry equilibrium for all small shares.
std::vector<DiffPolynomial> fitness_diff_polynomials(const Configuration& config,
                                                     const MutantSubProfile& mutants,
                                                     const MutantAssignment& assignment);

// Largest t such that the assignment's equilibrium conditions hold exactly
// for shares eps_j = t' * 1 with t' in (0, t); nullopt when they fail near 0.
std::optional<Rational> assignment_validity_bound(const Configuration& config,
                                                  const MutantSubProfile& mutants,
                                                  const MutantAssignment& assignment);

// Concrete post-entry configuration (distribution + extended strategy
// functions) at given shares; the independent re-verification path for
// certificates.
Configuration materialize_post_entry(const Configuration& config, const MutantSubProfile& mutants,
                                     const MutantAssignment& assignment,
                                     const std::map<int, Rational>& shares);

// Checks the certificate's polynomial claims: within the region (on the
// diagonal ray), every population of J has a survivor comparison >= 0,
// at least one comparison is strictly positive, and the assignment stays a
// valid post-entry equilibrium.
bool certificate_valid(const Configuration& config, const InvaderCertificate& cert);

std::optional<InvaderCertificate> find_invader(const Configuration& config, const std::vector<int>& coalition,
                                               const StabilityOptions& options);

StabilityVerdict check_stability(const Configuration& config, const StabilityOptions& options);

// Alternate aggregate comparison (sum over populations of the fitness
// differences), the Taylor-style criterion discussed alongside the first
// stability definition; exposed for the two-player discussion example.
Poly aggregate_fitness_diff(const Configuration& config, const MutantSubProfile& mutants,
                            const MutantAssignment& assignment);

struct NearbyResult {
  MutantAssignment assignment;
  Rational distance_sq;        // max over populations of squared Euclidean move
  Rational validity_bound;     // shares must stay below this bound
};

// Constructive nearby-equilibrium search for P0: aggregate-preserving
// rebalancing when mutant supports allow it, otherwise the support-face
// rebalancing for two players. Mutant strategies are the proposed s~_j.
// Returns nullopt (with `reason`) when no constructive branch applies.
std::optional<NearbyResult> nearby_equilibrium(const Configuration& config, const MutantSubProfile& mutants,
                                               const std::map<int, MixedStrategy>& mutant_strategies,
                                               std::string* reason = nullptr);

struct ObservabilityThresholds {
  std::optional<Rational> p_bar_high;      // dominance route: unstable for p above
  std::optional<Rational> p_bar_low;       // non-Nash route: unstable for p below
  std::vector<Poly> advantage_polys_high;  // per player, polynomial in p
  std::optional<Poly> advantage_poly_low;  // deviating player's polynomial in p
};

ObservabilityThresholds observability_thresholds(const Configuration& config, const PureProfile& a_star,
                                                 const std::optional<MixedProfile>& strong_dominator,
                                                 const std::optional<std::pair<int, int>>& deviation);

// Barrier for a Stable verdict whose route is constructive; nullopt for
// non-constructive routes.
std::optional<Rational> uniform_invasion_barrier(const Configuration& config, const StabilityVerdict& verdict);

// Two-population bounding route (perfect observability, monomorphic, pure
// outcome): certifies stability with an explicit uniform barrier from
// incumbent floor / mutant ceiling comparisons.
std::optional<PairwiseBoundReport> pairwise_bounding(const Configuration& config, int grid_resolution);

}  // namespace prefstab
