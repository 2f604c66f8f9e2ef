#pragma once

#include "cpg/mdp.hpp"
#include "cpg/policy.hpp"
#include "cpg/rng.hpp"

namespace cpg {

/// Samples one episode: S0 ~ start, A_t ~ pi(S_t), S_{t+1} ~ P(. | S_t, A_t).
/// Draw order per step is action then next state. Recording stops on the
/// first arrival at the absorbing state.
///
/// Throws ShapeError for an incompatible `theta` and std::logic_error if the
/// episode outlives the horizon (only possible for an invalid model).
Trajectory sample_episode(const TabularMdp& mdp, const PolicyParams& theta, RngStream& stream);

}  // namespace cpg
