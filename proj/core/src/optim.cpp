#include "cpg/optim.hpp"

#include <cmath>
#include <stdexcept>

#include "cpg/errors.hpp"
#include "cpg/estimators.hpp"
#include "cpg/gradient.hpp"
#include "cpg/oracle.hpp"
#include "cpg/rng.hpp"

namespace cpg {
namespace {

TrainRecord snapshot(const TabularMdp& mdp, const PolicyParams& theta, std::size_t iteration) {
  TrainRecord record;
  record.iteration = iteration;
  record.objective_classical = objective_classical(mdp, theta);
  record.objective_start = objective_start(mdp, theta);
  record.theta_norm = l2_norm(theta.values());
  return record;
}

}  // namespace

TrainResult train(const TabularMdp& mdp, const PolicyParams& initial, const TrainConfig& config,
                  const TrainObserver& observer) {
  if (!(config.step_size > 0.0)) throw std::invalid_argument("step size must be positive");
  if (config.batch_size < 1) throw std::invalid_argument("batch size must be at least 1");
  if (config.iterations < 1) throw std::invalid_argument("iterations must be at least 1");
  require_compatible(mdp, initial);

  TrainResult result{initial, {}};
  result.log.reserve(config.iterations + 1);
  auto emit = [&](TrainRecord record) {
    result.log.push_back(record);
    if (observer) observer(record);
  };

  PolicyParams& theta = result.theta;
  for (std::size_t k = 0; k < config.iterations; ++k) {
    const auto estimate = estimate_gradient(mdp, theta, config.kind, config.batch_size,
                                            derive_seed(config.master_seed, k),
                                            EstimateOptions{config.workers});
    TrainRecord record = snapshot(mdp, theta, k);
    record.grad_norm = l2_norm(estimate.mean);
    emit(record);

    if (!std::isfinite(*record.grad_norm)) throw NonFiniteError(k, "gradient estimate is not finite");
    axpy(config.step_size, estimate.mean, theta.values());
    if (!theta.all_finite()) throw NonFiniteError(k, "policy parameters became non-finite");
  }
  emit(snapshot(mdp, theta, config.iterations));
  return result;
}

}  // namespace cpg
