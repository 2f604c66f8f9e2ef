#include "cpg/simulator.hpp"

#include <stdexcept>

namespace cpg {
namespace {

State draw(std::span<const double> probs, RngStream& stream) {
  const double u = stream.uniform();
  double cumulative = 0.0;
  State last_positive = 0;
  for (State s = 0; s < probs.size(); ++s) {
    if (probs[s] <= 0.0) continue;
    cumulative += probs[s];
    last_positive = s;
    if (u < cumulative) return s;
  }
  // Rounding left u above the accumulated mass.
  return last_positive;
}

}  // namespace

Trajectory sample_episode(const TabularMdp& mdp, const PolicyParams& theta, RngStream& stream) {
  require_compatible(mdp, theta);
  Trajectory traj;
  traj.steps.reserve(static_cast<std::size_t>(mdp.horizon()));
  State s = draw(mdp.start(), stream);
  while (s != mdp.absorbing()) {
    if (traj.steps.size() == static_cast<std::size_t>(mdp.horizon())) {
      throw std::logic_error("episode did not absorb within the horizon; model is invalid");
    }
    const Action a = sample_action(theta, s, stream);
    traj.steps.push_back({s, a, mdp.reward(s, a)});
    s = draw(mdp.transition(s, a), stream);
  }
  return traj;
}

}  // namespace cpg
