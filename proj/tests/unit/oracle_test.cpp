#include "cpg/oracle.hpp"

#include <gtest/gtest.h>

#include <chrono>
#include <cmath>
#include <random>

#include "cpg/errors.hpp"
#include "test_support.hpp"

namespace cpg {
namespace {

using testing::fixture;

void expect_vector_near(const std::vector<double>& actual, const std::vector<double>& expected,
                        double tol) {
  ASSERT_EQ(actual.size(), expected.size());
  for (std::size_t k = 0; k < actual.size(); ++k) EXPECT_NEAR(actual[k], expected[k], tol) << "k=" << k;
}

TabularMdp zero_reward(TabularMdp mdp) {
  for (State s = 0; s < mdp.num_states(); ++s) {
    for (Action a = 0; a < mdp.num_actions(s); ++a) mdp.reward(s, a) = 0.0;
  }
  return mdp;
}

TabularMdp with_gamma(TabularMdp mdp, double gamma) {
  mdp.set_gamma(gamma);
  return mdp;
}

TEST(StateActionValues, Chain3) {
  const auto mdp = fixture("chain3");
  const auto values = state_action_values(mdp, PolicyParams::zeros_for(mdp));
  EXPECT_EQ(values.v, (std::vector<double>{0.5, 1.0, 0.0}));
  EXPECT_EQ(values.q, (std::vector<double>{0.5, 1.0, 0.0}));
}

TEST(StateActionValues, Split2) {
  const auto mdp = fixture("split2");
  const auto values = state_action_values(mdp, PolicyParams::zeros_for(mdp));
  EXPECT_EQ(values.v, (std::vector<double>{1.0, 2.0, 0.0}));
  EXPECT_EQ(values.q, (std::vector<double>{1.0, 1.0, 2.0, 0.0}));
}

TEST(StateActionValues, ZeroRewardIsZero) {
  std::mt19937_64 rng(8);
  const auto mdp = zero_reward(testing::random_valid_mdp(rng));
  const auto values = state_action_values(mdp, testing::random_theta(rng, mdp));
  for (double v : values.v) EXPECT_EQ(v, 0.0);
  for (double q : values.q) EXPECT_EQ(q, 0.0);
}

TEST(StateActionValues, MatchEnumerationOnRandomModels) {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 60; ++trial) {
    const auto mdp = testing::random_valid_mdp(rng);
    const auto theta = testing::random_theta(rng, mdp);
    const auto values = state_action_values(mdp, theta);
    EXPECT_EQ(values.v[mdp.absorbing()], 0.0);
    for (State s = 0; s < mdp.num_states(); ++s) {
      EXPECT_NEAR(values.v[s], testing::enumerated_state_value(mdp, theta, s), 1e-12);
      const auto probs = action_probabilities(theta, s);
      double mixed = 0.0;
      for (Action a = 0; a < probs.size(); ++a) mixed += probs[a] * values.q[mdp.layout().index(s, a)];
      EXPECT_NEAR(values.v[s], mixed, 1e-12);
    }
    for (Action a = 0; a < mdp.num_actions(mdp.absorbing()); ++a) {
      EXPECT_EQ(values.q[mdp.layout().index(mdp.absorbing(), a)], 0.0);
    }
  }
}

TEST(TimeOccupancy, Chain3) {
  const auto mdp = fixture("chain3");
  const auto occ = time_occupancy(mdp, PolicyParams::zeros_for(mdp));
  ASSERT_EQ(occ.rows.size(), 2u);
  EXPECT_EQ(occ.rows[0], (std::vector<double>{1, 0, 0}));
  EXPECT_EQ(occ.rows[1], (std::vector<double>{0, 1, 0}));
  EXPECT_EQ(occ.d, (std::vector<double>{0.5, 0.5, 0}));
}

TEST(TimeOccupancy, Split2) {
  const auto mdp = fixture("split2");
  const auto occ = time_occupancy(mdp, PolicyParams::zeros_for(mdp));
  EXPECT_EQ(occ.rows[1], (std::vector<double>{0, 0.5, 0.5}));
  EXPECT_EQ(occ.d, (std::vector<double>{0.5, 0.25, 0.25}));
}

TEST(TimeOccupancy, HorizonOneIsStartDistribution) {
  std::mt19937_64 rng(13);
  int checked = 0;
  while (checked < 10) {
    const auto mdp = testing::random_valid_mdp(rng, 5, 3, 1);
    if (mdp.horizon() != 1) continue;
    const auto occ = time_occupancy(mdp, testing::random_theta(rng, mdp));
    EXPECT_EQ(occ.d, std::vector<double>(mdp.start().begin(), mdp.start().end()));
    ++checked;
  }
}

TEST(TimeOccupancy, MatchesEnumerationOnRandomModels) {
  std::mt19937_64 rng(14);
  for (int trial = 0; trial < 60; ++trial) {
    const auto mdp = testing::random_valid_mdp(rng);
    const auto theta = testing::random_theta(rng, mdp);
    const auto occ = time_occupancy(mdp, theta);
    const auto expected = testing::enumerated_occupancy(mdp, theta);
    ASSERT_EQ(occ.rows.size(), expected.size());
    for (std::size_t t = 0; t < occ.rows.size(); ++t) {
      expect_vector_near(occ.rows[t], expected[t], 1e-12);
      double sum = 0.0;
      for (double p : occ.rows[t]) sum += p;
      EXPECT_NEAR(sum, 1.0, 1e-12);
    }
    double total = 0.0;
    for (State s = 0; s < mdp.num_states(); ++s) {
      double avg = 0.0;
      for (const auto& row : occ.rows) avg += row[s];
      EXPECT_NEAR(occ.d[s], avg / mdp.horizon(), 1e-15);
      total += occ.d[s];
    }
    EXPECT_NEAR(total, 1.0, 1e-12);
  }
}

TEST(Objectives, FixtureValues) {
  const auto chain3 = fixture("chain3");
  const auto split2 = fixture("split2");
  EXPECT_DOUBLE_EQ(objective_start(chain3, PolicyParams::zeros_for(chain3)), 0.5);
  EXPECT_DOUBLE_EQ(objective_classical(chain3, PolicyParams::zeros_for(chain3)), 0.75);
  EXPECT_DOUBLE_EQ(objective_start(split2, PolicyParams::zeros_for(split2)), 1.0);
  EXPECT_DOUBLE_EQ(objective_classical(split2, PolicyParams::zeros_for(split2)), 1.0);

  const auto zero = zero_reward(split2);
  EXPECT_EQ(objective_start(zero, PolicyParams::zeros_for(zero)), 0.0);
  EXPECT_EQ(objective_classical(zero, PolicyParams::zeros_for(zero)), 0.0);
  EXPECT_THROW(objective(split2, PolicyParams::zeros_for(split2), GradientKind::dropped),
               std::invalid_argument);
}

TEST(Objectives, GammaZeroClassicalIsStartAtGammaOneOverHorizon) {
  const auto split2 = fixture("split2");
  const auto theta = PolicyParams::zeros_for(split2);
  EXPECT_NEAR(objective_classical(with_gamma(split2, 0.0), theta), 0.75, 1e-12);
  EXPECT_NEAR(objective_start(with_gamma(split2, 1.0), theta), 1.5, 1e-12);

  std::mt19937_64 rng(15);
  for (int trial = 0; trial < 50; ++trial) {
    const auto mdp = testing::random_valid_mdp(rng);
    const auto th = testing::random_theta(rng, mdp);
    EXPECT_NEAR(objective_classical(with_gamma(mdp, 0.0), th),
                objective_start(with_gamma(mdp, 1.0), th) / mdp.horizon(), 1e-12);
  }
}

TEST(Objectives, MatchEnumeratedExpectations) {
  std::mt19937_64 rng(16);
  for (int trial = 0; trial < 60; ++trial) {
    const auto mdp = testing::random_valid_mdp(rng);
    const auto theta = testing::random_theta(rng, mdp);
    EXPECT_NEAR(objective_start(mdp, theta), testing::enumerated_discounted_return(mdp, theta), 1e-12);

    // (1/h) E[sum_{t<h} v(S_t)], with S_t absorbing after the episode ends.
    const auto values = state_action_values(mdp, theta);
    double expected = 0.0;
    for (const auto& [traj, p] : enumerate_trajectories(mdp, theta)) {
      for (std::size_t t = 0; t < traj.length(); ++t) expected += p * values.v[traj.steps[t].state];
    }
    expected /= mdp.horizon();
    EXPECT_NEAR(objective_classical(mdp, theta), expected, 1e-12);
  }
}

TEST(Objectives, Split2bClosedForm) {
  const auto mdp = fixture("split2b");
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    const auto theta = testing::random_theta(rng, mdp);
    const auto pi0 = action_probabilities(theta, 0);
    const auto pi1 = action_probabilities(theta, 1);
    EXPECT_NEAR(objective_classical(mdp, theta), 0.5 * pi0[0] + 1.5 * pi0[1] * pi1[0], 1e-14);
  }
}

TEST(EnumerateTrajectories, Examples) {
  const auto chain3 = fixture("chain3");
  auto paths = enumerate_trajectories(chain3, PolicyParams::zeros_for(chain3));
  ASSERT_EQ(paths.size(), 1u);
  EXPECT_EQ(paths[0].probability, 1.0);

  const auto split2 = fixture("split2");
  paths = enumerate_trajectories(split2, PolicyParams::zeros_for(split2));
  ASSERT_EQ(paths.size(), 2u);
  EXPECT_EQ(paths[0].probability, 0.5);
  EXPECT_EQ(paths[1].probability, 0.5);
  EXPECT_EQ(paths[0].trajectory, (Trajectory{{{0, 0, 1.0}}}));
  EXPECT_EQ(paths[1].trajectory, (Trajectory{{{0, 1, 0.0}, {1, 0, 2.0}}}));

  PolicyParams saturated = PolicyParams::zeros_for(split2);
  saturated(0, 0) = 50.0;
  saturated(0, 1) = -50.0;
  paths = enumerate_trajectories(split2, saturated);
  EXPECT_NEAR(paths[0].probability, 1.0, 1e-12);
}

TEST(EnumerateTrajectories, ProbabilitiesSumToOne) {
  std::mt19937_64 rng(18);
  for (int trial = 0; trial < 60; ++trial) {
    const auto mdp = testing::random_valid_mdp(rng);
    double total = 0.0;
    for (const auto& path : enumerate_trajectories(mdp, testing::random_theta(rng, mdp))) {
      total += path.probability;
      EXPECT_LE(path.trajectory.length(), static_cast<std::size_t>(mdp.horizon()));
    }
    EXPECT_NEAR(total, 1.0, 1e-12);
  }
}

TEST(EnumerateTrajectories, GuardRefusesLargeModels) {
  const auto split2 = fixture("split2");
  EXPECT_THROW(enumerate_trajectories(split2, PolicyParams::zeros_for(split2), 1), EnumerationLimitError);

  // Eight layers of ten actions each: 10^8 paths.
  constexpr std::size_t layers = 8;
  std::vector<std::size_t> counts(layers, 10);
  counts.push_back(1);
  TabularMdp wide(ActionLayout(counts), layers, static_cast<int>(layers), 1.0);
  for (State s = 0; s < layers; ++s) {
    for (Action a = 0; a < 10; ++a) wide.transition(s, a)[s + 1] = 1.0;
  }
  wide.transition(layers, 0)[layers] = 1.0;
  wide.start()[0] = 1.0;
  ASSERT_TRUE(validate(wide).ok());
  EXPECT_GT(count_trajectories(wide), kDefaultEnumerationLimit);

  const auto begin = std::chrono::steady_clock::now();
  EXPECT_THROW(exact_gradient(wide, PolicyParams::zeros_for(wide), GradientKind::start),
               EnumerationLimitError);
  EXPECT_LT(std::chrono::steady_clock::now() - begin, std::chrono::seconds(1));
}

TEST(ExactGradient, Split2) {
  const auto mdp = fixture("split2");
  const auto theta = PolicyParams::zeros_for(mdp);
  expect_vector_near(exact_gradient(mdp, theta, GradientKind::start), {0, 0, 0, 0}, 1e-15);
  expect_vector_near(exact_gradient(mdp, theta, GradientKind::classical), {-0.25, 0.25, 0, 0}, 1e-15);
}

TEST(ExactGradient, Split2bDroppedDiffersFromStart) {
  const auto mdp = fixture("split2b");
  const auto theta = PolicyParams::zeros_for(mdp);
  expect_vector_near(exact_gradient(mdp, theta, GradientKind::dropped),
                     {0.125, -0.125, 0.25, -0.25, 0}, 1e-15);
  expect_vector_near(exact_gradient(mdp, theta, GradientKind::start),
                     {0.125, -0.125, 0.125, -0.125, 0}, 1e-15);
}

TEST(FiniteDifferenceGradient, Examples) {
  const auto split2 = fixture("split2");
  expect_vector_near(finite_difference_gradient(split2, PolicyParams::zeros_for(split2), GradientKind::classical),
                     {-0.25, 0.25, 0, 0}, 1e-6);
  const auto split2b = fixture("split2b");
  expect_vector_near(finite_difference_gradient(split2b, PolicyParams::zeros_for(split2b), GradientKind::classical),
                     {-0.0625, 0.0625, 0.1875, -0.1875, 0}, 1e-6);
  const auto chain3 = fixture("chain3");
  std::mt19937_64 rng(19);
  const auto theta = testing::random_theta(rng, chain3);
  for (auto kind : {GradientKind::start, GradientKind::classical}) {
    for (double c : finite_difference_gradient(chain3, theta, kind)) EXPECT_EQ(c, 0.0);
  }
  EXPECT_THROW(finite_difference_gradient(split2, PolicyParams::zeros_for(split2), GradientKind::dropped),
               std::invalid_argument);
  EXPECT_THROW(finite_difference_gradient(split2, PolicyParams::zeros_for(split2), GradientKind::start, 0.0),
               std::invalid_argument);
}

TEST(ExactGradient, AgreesWithFiniteDifferences) {
  std::mt19937_64 rng(20);
  for (int trial = 0; trial < 30; ++trial) {
    const auto mdp = testing::random_valid_mdp(rng);
    const auto theta = testing::random_theta(rng, mdp);
    for (auto kind : {GradientKind::start, GradientKind::classical}) {
      EXPECT_LE(max_abs_diff(exact_gradient(mdp, theta, kind),
                             finite_difference_gradient(mdp, theta, kind)),
                1e-6);
    }
  }
}

TEST(ExactGradient, ShiftInvariant) {
  std::mt19937_64 rng(22);
  for (int trial = 0; trial < 20; ++trial) {
    const auto mdp = testing::random_valid_mdp(rng);
    const auto theta = testing::random_theta(rng, mdp);
    PolicyParams shifted = theta;
    for (State s = 0; s < mdp.num_states(); ++s) {
      for (Action a = 0; a < mdp.num_actions(s); ++a) shifted(s, a) += 0.5 * static_cast<double>(s);
    }
    for (auto kind : {GradientKind::start, GradientKind::dropped, GradientKind::classical}) {
      EXPECT_LE(max_abs_diff(exact_gradient(mdp, theta, kind), exact_gradient(mdp, shifted, kind)), 1e-12);
    }
  }
}

}  // namespace
}  // namespace cpg
