#pragma once

#include <span>
#include <vector>

#include "cpg/gradient.hpp"
#include "cpg/mdp.hpp"
#include "cpg/rng.hpp"

namespace cpg {

/// Tabular softmax preferences theta[s][a], stored flattened in layout order.
class PolicyParams {
 public:
  PolicyParams() = default;
  /// All-zero preferences (uniform policy).
  explicit PolicyParams(ActionLayout layout);
  /// Throws std::invalid_argument on a size mismatch or a non-finite value.
  PolicyParams(ActionLayout layout, std::vector<double> values);

  static PolicyParams zeros_for(const TabularMdp& mdp) { return PolicyParams(mdp.layout()); }

  const ActionLayout& layout() const noexcept { return layout_; }
  std::size_t size() const noexcept { return values_.size(); }

  std::span<const double> values() const noexcept { return values_; }
  std::span<double> values() noexcept { return values_; }

  std::span<const double> preferences(State s) const;

  double operator()(State s, Action a) const { return values_[layout_.index(s, a)]; }
  double& operator()(State s, Action a) { return values_[layout_.index(s, a)]; }

  bool all_finite() const noexcept;
  bool compatible_with(const TabularMdp& mdp) const noexcept { return layout_ == mdp.layout(); }

  friend bool operator==(const PolicyParams&, const PolicyParams&) = default;

 private:
  ActionLayout layout_;
  std::vector<double> values_;
};

/// Throws ShapeError unless `theta` has the MDP's action layout.
void require_compatible(const TabularMdp& mdp, const PolicyParams& theta);

/// pi(s, . , theta) = softmax(theta[s]), evaluated with max-subtraction.
std::vector<double> action_probabilities(const PolicyParams& theta, State s);

/// Inverse-CDF draw over the action order of `s`.
Action sample_action(const PolicyParams& theta, State s, RngStream& stream);

/// d ln pi(s, a, theta) / d theta: component (s, b) is 1{b == a} - pi(s, b),
/// every other state's components are zero.
Gradient log_policy_gradient(const PolicyParams& theta, State s, Action a);

/// out += scale * log_policy_gradient(theta, s, a), touching only state s.
void accumulate_log_policy_gradient(const PolicyParams& theta, State s, Action a, double scale,
                                    std::span<double> out);

}  // namespace cpg
