#include "cpg/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>

#include "cpg/rng.hpp"
#include "cpg/simulator.hpp"

namespace cpg {

double discount_weight(std::size_t i, std::size_t t, double gamma) {
  if (i > t) {
    throw std::invalid_argument("discount_weight needs i <= t (got i=" + std::to_string(i) +
                                ", t=" + std::to_string(t) + ")");
  }
  if (i != t) return 1.0;
  if (gamma == 1.0) return static_cast<double>(t + 1);
  // (1 - gamma^(t+1)) / (1 - gamma). Once gamma^(t+1) nears 1 the rounding
  // error of pow dominates the numerator, so expm1 takes over there.
  const double n = static_cast<double>(t + 1);
  const double power = std::pow(gamma, n);
  if (power < 0.5) return (1.0 - power) / (1.0 - gamma);
  return -std::expm1(n * std::log(gamma)) / (1.0 - gamma);
}

std::vector<double> returns_to_go(const Trajectory& traj, double gamma) {
  std::vector<double> g(traj.length(), 0.0);
  double running = 0.0;
  for (std::size_t t = traj.length(); t-- > 0;) {
    running = traj.steps[t].reward + gamma * running;
    g[t] = running;
  }
  return g;
}

Gradient grad_sample_start(const Trajectory& traj, const PolicyParams& theta, double gamma) {
  const auto g = returns_to_go(traj, gamma);
  Gradient grad(theta.size(), 0.0);
  double discount = 1.0;
  for (std::size_t t = 0; t < traj.length(); ++t) {
    accumulate_log_policy_gradient(theta, traj.steps[t].state, traj.steps[t].action, discount * g[t], grad);
    discount *= gamma;
  }
  return grad;
}

Gradient grad_sample_dropped(const Trajectory& traj, const PolicyParams& theta, double gamma) {
  const auto g = returns_to_go(traj, gamma);
  Gradient grad(theta.size(), 0.0);
  for (std::size_t t = 0; t < traj.length(); ++t) {
    accumulate_log_policy_gradient(theta, traj.steps[t].state, traj.steps[t].action, g[t], grad);
  }
  return grad;
}

namespace {

// (1/h) sum_t target_t sum_{i<=t} w(i,t) score_i, regrouped by score index:
// score_i is scaled by w(i,i) target_i + sum_{t>i} target_t.
Gradient classical_integrand(const Trajectory& traj, const PolicyParams& theta, double gamma,
                             int horizon, std::span<const double> targets) {
  if (traj.length() > static_cast<std::size_t>(horizon)) {
    throw std::invalid_argument("trajectory of length " + std::to_string(traj.length()) +
                                " exceeds the horizon " + std::to_string(horizon));
  }
  Gradient grad(theta.size(), 0.0);
  const double inv_h = 1.0 / static_cast<double>(horizon);
  double later = 0.0;
  for (std::size_t i = traj.length(); i-- > 0;) {
    const double coefficient = discount_weight(i, i, gamma) * targets[i] + later;
    accumulate_log_policy_gradient(theta, traj.steps[i].state, traj.steps[i].action,
                                   coefficient * inv_h, grad);
    later += targets[i];
  }
  return grad;
}

}  // namespace

Gradient grad_sample_classical(const Trajectory& traj, const PolicyParams& theta, double gamma,
                               int horizon) {
  const auto g = returns_to_go(traj, gamma);
  return classical_integrand(traj, theta, gamma, horizon, g);
}

Gradient grad_sample_classical_oracle_q(const Trajectory& traj, const PolicyParams& theta,
                                        double gamma, int horizon, const ValueTable& values) {
  std::vector<double> q(traj.length());
  for (std::size_t t = 0; t < traj.length(); ++t) {
    q[t] = values.q[theta.layout().index(traj.steps[t].state, traj.steps[t].action)];
  }
  return classical_integrand(traj, theta, gamma, horizon, q);
}

namespace {

constexpr std::size_t kChunkEpisodes = 8192;

struct SampleContext {
  const TabularMdp& mdp;
  const PolicyParams& theta;
  GradientKind kind;
  std::uint64_t master_seed;
  const ValueTable* values;

  Gradient sample(std::size_t episode) const {
    RngStream stream(master_seed, episode);
    const Trajectory traj = sample_episode(mdp, theta, stream);
    switch (kind) {
      case GradientKind::start: return grad_sample_start(traj, theta, mdp.gamma());
      case GradientKind::dropped: return grad_sample_dropped(traj, theta, mdp.gamma());
      case GradientKind::classical:
        return grad_sample_classical(traj, theta, mdp.gamma(), mdp.horizon());
      case GradientKind::classical_oracle_q:
        return grad_sample_classical_oracle_q(traj, theta, mdp.gamma(), mdp.horizon(), *values);
    }
    throw std::invalid_argument("unknown gradient kind");
  }
};

void fill_chunk(const SampleContext& ctx, std::size_t first, std::vector<Gradient>& samples,
                unsigned workers) {
  const std::size_t count = samples.size();
  const std::size_t threads = std::min<std::size_t>(workers, count);
  if (threads <= 1) {
    for (std::size_t k = 0; k < count; ++k) samples[k] = ctx.sample(first + k);
    return;
  }
  std::vector<std::exception_ptr> errors(threads);
  {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (std::size_t w = 0; w < threads; ++w) {
      const std::size_t lo = count * w / threads;
      const std::size_t hi = count * (w + 1) / threads;
      pool.emplace_back([&, w, lo, hi] {
        try {
          for (std::size_t k = lo; k < hi; ++k) samples[k] = ctx.sample(first + k);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
  }
  for (const auto& error : errors) {
    if (error) std::rethrow_exception(error);
  }
}

}  // namespace

GradientEstimate estimate_gradient(const TabularMdp& mdp, const PolicyParams& theta,
                                   GradientKind kind, std::size_t episodes,
                                   std::uint64_t master_seed, EstimateOptions options) {
  if (episodes < 1) throw std::invalid_argument("need at least one episode");
  require_compatible(mdp, theta);
  std::optional<ValueTable> values;
  if (kind == GradientKind::classical_oracle_q) values = state_action_values(mdp, theta);
  const SampleContext ctx{mdp, theta, kind, master_seed, values ? &*values : nullptr};

  unsigned workers = options.workers;
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());

  const std::size_t dim = theta.size();
  GradientEstimate est;
  est.kind = kind;
  est.episodes = episodes;
  est.master_seed = master_seed;
  est.mean.assign(dim, 0.0);
  std::vector<double> m2(dim, 0.0);

  // Welford updates in episode order.
  std::size_t seen = 0;
  std::vector<Gradient> samples;
  for (std::size_t first = 0; first < episodes; first += kChunkEpisodes) {
    samples.assign(std::min(kChunkEpisodes, episodes - first), Gradient{});
    fill_chunk(ctx, first, samples, workers);
    for (const auto& x : samples) {
      ++seen;
      const double n = static_cast<double>(seen);
      for (std::size_t k = 0; k < dim; ++k) {
        const double delta = x[k] - est.mean[k];
        est.mean[k] += delta / n;
        m2[k] += delta * (x[k] - est.mean[k]);
      }
    }
  }

  est.standard_error.assign(dim, 0.0);
  if (episodes > 1) {
    const double n = static_cast<double>(episodes);
    for (std::size_t k = 0; k < dim; ++k) est.standard_error[k] = std::sqrt(m2[k] / (n - 1.0) / n);
  }
  return est;
}

}  // namespace cpg
