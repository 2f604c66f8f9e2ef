#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "cpg/gradient.hpp"
#include "cpg/kinds.hpp"
#include "cpg/mdp.hpp"
#include "cpg/oracle.hpp"
#include "cpg/policy.hpp"

namespace cpg {

/// w(i, t) = 1 for i != t; for i == t it is sum_{k<=t} gamma^k, i.e.
/// (1 - gamma^(t+1)) / (1 - gamma) when gamma < 1 and t + 1 when gamma == 1
/// (exact comparison). Throws std::invalid_argument if i > t.
double discount_weight(std::size_t i, std::size_t t, double gamma);

/// G_t = sum_{k>=t} gamma^(k-t) R_k, one backward pass.
std::vector<double> returns_to_go(const Trajectory& traj, double gamma);

/// sum_t gamma^t G_t score_t
Gradient grad_sample_start(const Trajectory& traj, const PolicyParams& theta, double gamma);

/// sum_t G_t score_t
Gradient grad_sample_dropped(const Trajectory& traj, const PolicyParams& theta, double gamma);

/// (1/h) sum_t G_t sum_{i<=t} w(i, t) score_i. Throws std::invalid_argument
/// when the trajectory is longer than h.
Gradient grad_sample_classical(const Trajectory& traj, const PolicyParams& theta, double gamma,
                               int horizon);

/// Classical integrand with q(S_t, A_t) from `values` in place of G_t.
Gradient grad_sample_classical_oracle_q(const Trajectory& traj, const PolicyParams& theta,
                                        double gamma, int horizon, const ValueTable& values);

struct GradientEstimate {
  Gradient mean;
  std::vector<double> standard_error;  // sample std-dev / sqrt(N)
  GradientKind kind = GradientKind::classical;
  std::size_t episodes = 0;
  std::uint64_t master_seed = 0;
};

struct EstimateOptions {
  /// 0 picks std::thread::hardware_concurrency(). Results do not depend on it.
  unsigned workers = 0;
};

/// Monte Carlo average over `episodes` sampled trajectories. Episode j uses
/// RngStream(master_seed, j); samples are reduced in episode order so the
/// result is bit-identical for every worker count.
GradientEstimate estimate_gradient(const TabularMdp& mdp, const PolicyParams& theta,
                                   GradientKind kind, std::size_t episodes,
                                   std::uint64_t master_seed, EstimateOptions options = {});

}  // namespace cpg
