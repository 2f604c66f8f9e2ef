#include "cpg/oracle.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "cpg/errors.hpp"
#include "cpg/estimators.hpp"

namespace cpg {

ValueTable state_action_values(const TabularMdp& mdp, const PolicyParams& theta) {
  require_compatible(mdp, theta);
  const auto& layout = mdp.layout();
  const std::size_t n = mdp.num_states();
  ValueTable table{std::vector<double>(n, 0.0), std::vector<double>(layout.size(), 0.0)};

  std::vector<std::vector<double>> policy(n);
  for (State s = 0; s < n; ++s) policy[s] = action_probabilities(theta, s);

  for (int round = 0; round < mdp.horizon(); ++round) {
    for (State s = 0; s < n; ++s) {
      for (Action a = 0; a < mdp.num_actions(s); ++a) {
        const auto row = mdp.transition(s, a);
        double expected_next = 0.0;
        for (State next = 0; next < n; ++next) expected_next += row[next] * table.v[next];
        table.q[layout.index(s, a)] = mdp.reward(s, a) + mdp.gamma() * expected_next;
      }
    }
    for (State s = 0; s < n; ++s) {
      double v = 0.0;
      for (Action a = 0; a < mdp.num_actions(s); ++a) v += policy[s][a] * table.q[layout.index(s, a)];
      table.v[s] = v;
    }
  }
  return table;
}

OccupancyTable time_occupancy(const TabularMdp& mdp, const PolicyParams& theta) {
  require_compatible(mdp, theta);
  const std::size_t n = mdp.num_states();
  const auto h = static_cast<std::size_t>(mdp.horizon());

  // P_pi[s][s'] = sum_a pi(s, a) P(s' | s, a)
  std::vector<std::vector<double>> step(n, std::vector<double>(n, 0.0));
  for (State s = 0; s < n; ++s) {
    const auto probs = action_probabilities(theta, s);
    for (Action a = 0; a < probs.size(); ++a) {
      const auto row = mdp.transition(s, a);
      for (State next = 0; next < n; ++next) step[s][next] += probs[a] * row[next];
    }
  }

  OccupancyTable table;
  table.rows.reserve(h);
  table.rows.emplace_back(mdp.start().begin(), mdp.start().end());
  for (std::size_t t = 1; t < h; ++t) {
    const auto& prev = table.rows.back();
    std::vector<double> row(n, 0.0);
    for (State s = 0; s < n; ++s) {
      if (prev[s] == 0.0) continue;
      for (State next = 0; next < n; ++next) row[next] += prev[s] * step[s][next];
    }
    table.rows.push_back(std::move(row));
  }
  table.d.assign(n, 0.0);
  for (const auto& row : table.rows) {
    for (State s = 0; s < n; ++s) table.d[s] += row[s];
  }
  for (double& d : table.d) d /= static_cast<double>(h);
  return table;
}

double objective_start(const TabularMdp& mdp, const PolicyParams& theta) {
  const auto values = state_action_values(mdp, theta);
  double total = 0.0;
  for (State s = 0; s < mdp.num_states(); ++s) total += mdp.start()[s] * values.v[s];
  return total;
}

double objective_classical(const TabularMdp& mdp, const PolicyParams& theta) {
  const auto values = state_action_values(mdp, theta);
  const auto occupancy = time_occupancy(mdp, theta);
  double total = 0.0;
  for (State s = 0; s < mdp.num_states(); ++s) total += occupancy.d[s] * values.v[s];
  return total;
}

double objective(const TabularMdp& mdp, const PolicyParams& theta, GradientKind kind) {
  switch (kind) {
    case GradientKind::start: return objective_start(mdp, theta);
    case GradientKind::classical:
    case GradientKind::classical_oracle_q: return objective_classical(mdp, theta);
    case GradientKind::dropped: break;
  }
  throw std::invalid_argument("the dropped-discount estimator has no objective");
}

std::size_t count_trajectories(const TabularMdp& mdp, std::size_t cap) {
  const std::size_t overflow = cap + 1;
  auto saturating_add = [overflow](std::size_t a, std::size_t b) {
    return (a >= overflow || b >= overflow - a) ? overflow : a + b;
  };
  const auto h = static_cast<std::size_t>(mdp.horizon());
  // paths[s] = number of trajectories starting in s with at most `depth` steps left.
  std::vector<std::size_t> paths(mdp.num_states(), 1);
  for (std::size_t depth = 1; depth <= h; ++depth) {
    std::vector<std::size_t> next_paths(mdp.num_states(), 0);
    for (State s = 0; s < mdp.num_states(); ++s) {
      if (s == mdp.absorbing()) {
        next_paths[s] = 1;
        continue;
      }
      for (Action a = 0; a < mdp.num_actions(s); ++a) {
        const auto row = mdp.transition(s, a);
        for (State next = 0; next < row.size(); ++next) {
          if (row[next] > 0.0) next_paths[s] = saturating_add(next_paths[s], paths[next]);
        }
      }
    }
    paths = std::move(next_paths);
  }
  std::size_t total = 0;
  for (State s = 0; s < mdp.num_states(); ++s) {
    if (mdp.start()[s] > 0.0) total = saturating_add(total, paths[s]);
  }
  return total;
}

namespace {

struct Enumerator {
  const TabularMdp& mdp;
  std::vector<std::vector<double>> policy;
  const std::function<void(const Trajectory&, double)>& visit;
  Trajectory path;

  void descend(State s, double probability) {
    if (s == mdp.absorbing()) {
      visit(path, probability);
      return;
    }
    if (path.steps.size() == static_cast<std::size_t>(mdp.horizon())) {
      throw std::logic_error("trajectory outlives the horizon; model is invalid");
    }
    for (Action a = 0; a < mdp.num_actions(s); ++a) {
      const double with_action = probability * policy[s][a];
      if (with_action == 0.0) continue;
      path.steps.push_back({s, a, mdp.reward(s, a)});
      const auto row = mdp.transition(s, a);
      for (State next = 0; next < row.size(); ++next) {
        if (row[next] > 0.0) descend(next, with_action * row[next]);
      }
      path.steps.pop_back();
    }
  }
};

}  // namespace

void for_each_trajectory(const TabularMdp& mdp, const PolicyParams& theta,
                         const std::function<void(const Trajectory&, double)>& visit,
                         std::size_t limit) {
  require_compatible(mdp, theta);
  if (const auto count = count_trajectories(mdp, limit); count > limit) {
    throw EnumerationLimitError(limit, "trajectory enumeration exceeds the limit of " +
                                           std::to_string(limit) + " paths");
  }
  Enumerator walker{mdp, {}, visit, {}};
  walker.policy.reserve(mdp.num_states());
  for (State s = 0; s < mdp.num_states(); ++s) walker.policy.push_back(action_probabilities(theta, s));
  for (State s = 0; s < mdp.num_states(); ++s) {
    if (mdp.start()[s] > 0.0) walker.descend(s, mdp.start()[s]);
  }
}

std::vector<WeightedTrajectory> enumerate_trajectories(const TabularMdp& mdp,
                                                       const PolicyParams& theta,
                                                       std::size_t limit) {
  std::vector<WeightedTrajectory> out;
  for_each_trajectory(
      mdp, theta, [&out](const Trajectory& traj, double p) { out.push_back({traj, p}); }, limit);
  return out;
}

Gradient exact_gradient(const TabularMdp& mdp, const PolicyParams& theta, GradientKind kind,
                        std::size_t limit) {
  const auto values = state_action_values(mdp, theta);
  const auto& layout = mdp.layout();
  const double gamma = mdp.gamma();
  const double h = static_cast<double>(mdp.horizon());
  Gradient total(layout.size(), 0.0);

  for_each_trajectory(
      mdp, theta,
      [&](const Trajectory& traj, double probability) {
        const std::size_t length = traj.length();
        std::vector<Gradient> scores;
        scores.reserve(length);
        for (const auto& step : traj.steps) scores.push_back(log_policy_gradient(theta, step.state, step.action));

        for (std::size_t t = 0; t < length; ++t) {
          const double q = values.q[layout.index(traj.steps[t].state, traj.steps[t].action)];
          switch (kind) {
            case GradientKind::start:
              axpy(probability * std::pow(gamma, static_cast<double>(t)) * q, scores[t], total);
              break;
            case GradientKind::dropped:
              axpy(probability * q, scores[t], total);
              break;
            case GradientKind::classical:
            case GradientKind::classical_oracle_q:
              for (std::size_t i = 0; i <= t; ++i) {
                axpy(probability * q * discount_weight(i, t, gamma) / h, scores[i], total);
              }
              break;
          }
        }
      },
      limit);
  return total;
}

Gradient finite_difference_gradient(const TabularMdp& mdp, const PolicyParams& theta,
                                    GradientKind kind, double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("finite-difference step must be positive");
  if (kind == GradientKind::dropped) {
    throw std::invalid_argument("finite differences need an objective; 'dropped' has none");
  }
  require_compatible(mdp, theta);
  Gradient grad(theta.size(), 0.0);
  PolicyParams probe = theta;
  for (std::size_t k = 0; k < theta.size(); ++k) {
    const double original = theta.values()[k];
    probe.values()[k] = original + eps;
    const double up = objective(mdp, probe, kind);
    probe.values()[k] = original - eps;
    const double down = objective(mdp, probe, kind);
    probe.values()[k] = original;
    grad[k] = (up - down) / (2.0 * eps);
  }
  return grad;
}

}  // namespace cpg
