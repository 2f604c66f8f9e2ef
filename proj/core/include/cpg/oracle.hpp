#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "cpg/gradient.hpp"
#include "cpg/kinds.hpp"
#include "cpg/mdp.hpp"
#include "cpg/policy.hpp"

namespace cpg {

/// v per state and q per flattened (state, action) pair.
struct ValueTable {
  std::vector<double> v;
  std::vector<double> q;
};

/// rows[t][s] = Pr(S_t = s) for t < horizon; d[s] is the row average.
struct OccupancyTable {
  std::vector<std::vector<double>> rows;
  std::vector<double> d;
};

struct WeightedTrajectory {
  Trajectory trajectory;
  double probability;
};

inline constexpr std::size_t kDefaultEnumerationLimit = 10'000'000;

/// h rounds of v <- r_pi + gamma P_pi v from v = 0, then
/// q(s, a) = r(s, a) + gamma sum_s' P(s'|s, a) v(s').
/// Exact for valid models because transient dynamics vanish within h steps.
ValueTable state_action_values(const TabularMdp& mdp, const PolicyParams& theta);

OccupancyTable time_occupancy(const TabularMdp& mdp, const PolicyParams& theta);

/// J_s = sum_s mu(s) v(s).
double objective_start(const TabularMdp& mdp, const PolicyParams& theta);

/// J_c = sum_s d(s) v(s), the sum running over every state including the
/// absorbing one.
double objective_classical(const TabularMdp& mdp, const PolicyParams& theta);

/// Objective matching a gradient kind: start -> J_s, classical kinds -> J_c.
/// `dropped` has no objective and is rejected with std::invalid_argument.
double objective(const TabularMdp& mdp, const PolicyParams& theta, GradientKind kind);

/// Upper bound on the number of trajectories enumeration would visit,
/// saturating at `cap + 1`. Depends only on the support of P and mu.
std::size_t count_trajectories(const TabularMdp& mdp, std::size_t cap = kDefaultEnumerationLimit);

/// Depth-first visit of every positive-probability trajectory. Throws
/// EnumerationLimitError before visiting anything if the count exceeds `limit`.
void for_each_trajectory(const TabularMdp& mdp, const PolicyParams& theta,
                         const std::function<void(const Trajectory&, double)>& visit,
                         std::size_t limit = kDefaultEnumerationLimit);

std::vector<WeightedTrajectory> enumerate_trajectories(const TabularMdp& mdp,
                                                       const PolicyParams& theta,
                                                       std::size_t limit = kDefaultEnumerationLimit);

/// Expectation of the per-trajectory gradient integrand over all
/// trajectories, with exact q values inside the integrand.
///   start:      sum_t gamma^t q(S_t, A_t) score_t
///   dropped:    sum_t q(S_t, A_t) score_t
///   classical:  (1/h) sum_t q(S_t, A_t) sum_{i<=t} w(i, t) score_i
/// `classical_oracle_q` is treated as `classical`.
Gradient exact_gradient(const TabularMdp& mdp, const PolicyParams& theta, GradientKind kind,
                        std::size_t limit = kDefaultEnumerationLimit);

inline constexpr double kDefaultFiniteDifferenceStep = 1e-4;

/// Central differences of the exact objective for `kind` (start or classical).
Gradient finite_difference_gradient(const TabularMdp& mdp, const PolicyParams& theta,
                                    GradientKind kind, double eps = kDefaultFiniteDifferenceStep);

}  // namespace cpg
