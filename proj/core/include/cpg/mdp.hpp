#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace cpg {

using State = std::size_t;
using Action = std::size_t;

/// Ragged (state, action) index space. Pairs are ordered by state, then by
/// action; this order is the coordinate system of every parameter and
/// gradient vector in the library.
class ActionLayout {
 public:
  ActionLayout() = default;
  explicit ActionLayout(std::vector<std::size_t> actions_per_state);

  std::size_t num_states() const noexcept { return counts_.size(); }
  std::size_t num_actions(State s) const { return counts_.at(s); }
  std::size_t size() const noexcept { return offsets_.empty() ? 0 : offsets_.back(); }

  /// First flattened index belonging to state `s`.
  std::size_t offset(State s) const { return offsets_.at(s); }
  std::size_t index(State s, Action a) const;

  const std::vector<std::size_t>& actions_per_state() const noexcept { return counts_; }

  /// "s<state>a<action>" label of a flattened index.
  std::string label(std::size_t flat_index) const;

  friend bool operator==(const ActionLayout& a, const ActionLayout& b) {
    return a.counts_ == b.counts_;
  }

 private:
  std::vector<std::size_t> counts_;
  std::vector<std::size_t> offsets_;  // num_states + 1 entries
};

/// Finite-horizon episodic MDP with deterministic rewards r(s, a).
///
/// The object may hold an invalid model (rows that do not sum to one, a
/// horizon that does not bound episode length, ...); `validate` reports
/// such defects and every algorithm assumes a model that passed it.
class TabularMdp {
 public:
  TabularMdp() = default;
  /// All transition, reward and start entries start at zero.
  TabularMdp(ActionLayout layout, State absorbing, int horizon, double gamma);

  const ActionLayout& layout() const noexcept { return layout_; }
  std::size_t num_states() const noexcept { return layout_.num_states(); }
  std::size_t num_actions(State s) const { return layout_.num_actions(s); }

  State absorbing() const noexcept { return absorbing_; }
  int horizon() const noexcept { return horizon_; }
  double gamma() const noexcept { return gamma_; }
  void set_gamma(double gamma) noexcept { gamma_ = gamma; }

  /// P(. | s, a) as a dense row over next states.
  std::span<const double> transition(State s, Action a) const;
  std::span<double> transition(State s, Action a);

  double reward(State s, Action a) const { return reward_[layout_.index(s, a)]; }
  double& reward(State s, Action a) { return reward_[layout_.index(s, a)]; }

  std::span<const double> start() const noexcept { return start_; }
  std::span<double> start() noexcept { return start_; }

  friend bool operator==(const TabularMdp&, const TabularMdp&) = default;

 private:
  ActionLayout layout_;
  State absorbing_ = 0;
  int horizon_ = 1;
  double gamma_ = 1.0;
  std::vector<double> transition_;  // [state-action][next state]
  std::vector<double> reward_;      // [state-action]
  std::vector<double> start_;       // [state]
};

struct Step {
  State state;
  Action action;
  double reward;

  friend bool operator==(const Step&, const Step&) = default;
};

/// Steps from t = 0 up to (excluding) the first arrival at the absorbing state.
struct Trajectory {
  std::vector<Step> steps;

  std::size_t length() const noexcept { return steps.size(); }
  friend bool operator==(const Trajectory&, const Trajectory&) = default;
};

struct ValidationCheck {
  std::string name;
  std::vector<std::string> violations;

  bool passed() const noexcept { return violations.empty(); }
};

struct ValidationReport {
  std::vector<ValidationCheck> checks;

  bool ok() const noexcept;
  /// Every violation message, in check order.
  std::vector<std::string> violations() const;
};

/// Probability sums are checked to this absolute tolerance.
inline constexpr double kProbabilityTolerance = 1e-12;

/// Checks every model invariant. Violations are returned, never thrown.
///
/// Termination is checked by powering the boolean reachability matrix B
/// over non-absorbing states (B[s][s'] set iff some action moves s to s'
/// with positive probability): episodes are guaranteed to absorb within
/// `horizon` steps exactly when B^horizon is the zero matrix.
ValidationReport validate(const TabularMdp& mdp);

}  // namespace cpg
