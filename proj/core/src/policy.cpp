#include "cpg/policy.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "cpg/errors.hpp"

namespace cpg {

PolicyParams::PolicyParams(ActionLayout layout)
    : layout_(std::move(layout)), values_(layout_.size(), 0.0) {}

PolicyParams::PolicyParams(ActionLayout layout, std::vector<double> values)
    : layout_(std::move(layout)), values_(std::move(values)) {
  if (values_.size() != layout_.size()) {
    throw std::invalid_argument("expected " + std::to_string(layout_.size()) +
                                " policy parameters, got " + std::to_string(values_.size()));
  }
  if (!all_finite()) throw std::invalid_argument("policy parameters must be finite");
}

std::span<const double> PolicyParams::preferences(State s) const {
  return std::span<const double>(values_).subspan(layout_.offset(s), layout_.num_actions(s));
}

bool PolicyParams::all_finite() const noexcept {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

void require_compatible(const TabularMdp& mdp, const PolicyParams& theta) {
  if (!theta.compatible_with(mdp)) {
    throw ShapeError("policy parameters have " + std::to_string(theta.size()) +
                     " entries in a layout that does not match the MDP (" +
                     std::to_string(mdp.layout().size()) + " state-action pairs)");
  }
}

std::vector<double> action_probabilities(const PolicyParams& theta, State s) {
  if (s >= theta.layout().num_states()) {
    throw std::out_of_range("state " + std::to_string(s) + " out of range");
  }
  const auto prefs = theta.preferences(s);
  const double peak = *std::max_element(prefs.begin(), prefs.end());
  std::vector<double> probs(prefs.size());
  double total = 0.0;
  for (std::size_t a = 0; a < prefs.size(); ++a) {
    probs[a] = std::exp(prefs[a] - peak);
    total += probs[a];
  }
  for (double& p : probs) p /= total;
  return probs;
}

Action sample_action(const PolicyParams& theta, State s, RngStream& stream) {
  const auto probs = action_probabilities(theta, s);
  if (probs.size() == 1) return 0;
  const double u = stream.uniform();
  double cumulative = 0.0;
  for (Action a = 0; a + 1 < probs.size(); ++a) {
    cumulative += probs[a];
    if (u < cumulative) return a;
  }
  return probs.size() - 1;
}

void accumulate_log_policy_gradient(const PolicyParams& theta, State s, Action a, double scale,
                                    std::span<double> out) {
  if (a >= theta.layout().num_actions(s)) {
    throw std::out_of_range("action " + std::to_string(a) + " out of range for state " +
                            std::to_string(s));
  }
  if (out.size() != theta.size()) throw std::invalid_argument("gradient buffer size mismatch");
  const auto probs = action_probabilities(theta, s);
  const std::size_t base = theta.layout().offset(s);
  for (Action b = 0; b < probs.size(); ++b) {
    out[base + b] += scale * ((b == a ? 1.0 : 0.0) - probs[b]);
  }
}

Gradient log_policy_gradient(const PolicyParams& theta, State s, Action a) {
  Gradient grad(theta.size(), 0.0);
  accumulate_log_policy_gradient(theta, s, a, 1.0, grad);
  return grad;
}

}  // namespace cpg
