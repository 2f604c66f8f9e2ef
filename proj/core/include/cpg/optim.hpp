#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "cpg/kinds.hpp"
#include "cpg/mdp.hpp"
#include "cpg/policy.hpp"

namespace cpg {

struct TrainConfig {
  GradientKind kind = GradientKind::classical;
  double step_size = 0.1;
  std::size_t batch_size = 100;
  std::size_t iterations = 2000;
  std::uint64_t master_seed = 0;
  unsigned workers = 0;
};

/// Exact objectives at theta_k. `grad_norm` is the 2-norm of the batch mean
/// used to step away from theta_k; the record for the final parameters has none.
struct TrainRecord {
  std::size_t iteration = 0;
  double objective_classical = 0.0;
  double objective_start = 0.0;
  std::optional<double> grad_norm;
  double theta_norm = 0.0;
};

struct TrainResult {
  PolicyParams theta;
  std::vector<TrainRecord> log;  // iterations + 1 records
};

using TrainObserver = std::function<void(const TrainRecord&)>;

/// Plain stochastic gradient ascent: theta <- theta + step_size * mean of a
/// batch estimate, with batch k seeded by derive_seed(master_seed, k).
/// `observer` sees each record as soon as it is computed, so a caller can
/// keep a partial log if training aborts with NonFiniteError.
TrainResult train(const TabularMdp& mdp, const PolicyParams& initial, const TrainConfig& config,
                  const TrainObserver& observer = {});

}  // namespace cpg
