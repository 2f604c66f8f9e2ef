#include "cpg/mdp.hpp"

#include <cmath>
#include <stdexcept>

#include "cpg/format.hpp"

namespace cpg {

ActionLayout::ActionLayout(std::vector<std::size_t> actions_per_state)
    : counts_(std::move(actions_per_state)) {
  offsets_.reserve(counts_.size() + 1);
  offsets_.push_back(0);
  for (std::size_t n : counts_) {
    if (n == 0) throw std::invalid_argument("every state needs at least one action");
    offsets_.push_back(offsets_.back() + n);
  }
}

std::size_t ActionLayout::index(State s, Action a) const {
  if (s >= counts_.size()) throw std::out_of_range("state " + std::to_string(s) + " out of range");
  if (a >= counts_[s]) {
    throw std::out_of_range("action " + std::to_string(a) + " out of range for state " +
                            std::to_string(s));
  }
  return offsets_[s] + a;
}

std::string ActionLayout::label(std::size_t flat_index) const {
  if (flat_index >= size()) throw std::out_of_range("parameter index out of range");
  State s = 0;
  while (offsets_[s + 1] <= flat_index) ++s;
  return "s" + std::to_string(s) + "a" + std::to_string(flat_index - offsets_[s]);
}

TabularMdp::TabularMdp(ActionLayout layout, State absorbing, int horizon, double gamma)
    : layout_(std::move(layout)),
      absorbing_(absorbing),
      horizon_(horizon),
      gamma_(gamma),
      transition_(layout_.size() * layout_.num_states(), 0.0),
      reward_(layout_.size(), 0.0),
      start_(layout_.num_states(), 0.0) {}

std::span<const double> TabularMdp::transition(State s, Action a) const {
  const std::size_t n = num_states();
  return std::span<const double>(transition_).subspan(layout_.index(s, a) * n, n);
}

std::span<double> TabularMdp::transition(State s, Action a) {
  const std::size_t n = num_states();
  return std::span<double>(transition_).subspan(layout_.index(s, a) * n, n);
}

bool ValidationReport::ok() const noexcept {
  for (const auto& check : checks) {
    if (!check.passed()) return false;
  }
  return true;
}

std::vector<std::string> ValidationReport::violations() const {
  std::vector<std::string> out;
  for (const auto& check : checks) out.insert(out.end(), check.violations.begin(), check.violations.end());
  return out;
}

namespace {

std::string pair_text(State s, Action a) {
  return "(" + std::to_string(s) + "," + std::to_string(a) + ")";
}

using BoolMatrix = std::vector<std::vector<bool>>;

BoolMatrix multiply(const BoolMatrix& x, const BoolMatrix& y) {
  const std::size_t n = x.size();
  BoolMatrix out(n, std::vector<bool>(n, false));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < n; ++k) {
      if (!x[i][k]) continue;
      for (std::size_t j = 0; j < n; ++j) {
        if (y[k][j]) out[i][j] = true;
      }
    }
  }
  return out;
}

bool is_zero(const BoolMatrix& m) {
  for (const auto& row : m) {
    for (bool b : row) {
      if (b) return false;
    }
  }
  return true;
}

ValidationCheck check_header(const TabularMdp& mdp) {
  ValidationCheck check{"header", {}};
  if (!(mdp.gamma() >= 0.0 && mdp.gamma() <= 1.0)) {
    check.violations.push_back("gamma " + format_double(mdp.gamma()) + " outside [0,1]");
  }
  if (mdp.horizon() < 1) {
    check.violations.push_back("horizon " + std::to_string(mdp.horizon()) + " must be at least 1");
  }
  if (mdp.num_states() == 0) check.violations.push_back("model has no states");
  if (mdp.absorbing() >= mdp.num_states()) {
    check.violations.push_back("absorbing state " + std::to_string(mdp.absorbing()) +
                               " out of range");
  }
  return check;
}

ValidationCheck check_transitions(const TabularMdp& mdp) {
  ValidationCheck check{"transition rows", {}};
  for (State s = 0; s < mdp.num_states(); ++s) {
    for (Action a = 0; a < mdp.num_actions(s); ++a) {
      const auto row = mdp.transition(s, a);
      double sum = 0.0;
      for (State next = 0; next < row.size(); ++next) {
        if (!std::isfinite(row[next]) || row[next] < 0.0) {
          check.violations.push_back("transition " + pair_text(s, a) + "->" +
                                     std::to_string(next) + " has invalid probability " +
                                     format_double(row[next]));
        }
        sum += row[next];
      }
      if (!(std::abs(sum - 1.0) <= kProbabilityTolerance)) {
        check.violations.push_back("transition row " + pair_text(s, a) + " sums to " +
                                   format_double(sum));
      }
      if (!std::isfinite(mdp.reward(s, a))) {
        check.violations.push_back("reward " + pair_text(s, a) + " is not finite");
      }
    }
  }
  return check;
}

ValidationCheck check_start(const TabularMdp& mdp) {
  ValidationCheck check{"start distribution", {}};
  double sum = 0.0;
  for (State s = 0; s < mdp.num_states(); ++s) {
    const double p = mdp.start()[s];
    if (!std::isfinite(p) || p < 0.0) {
      check.violations.push_back("start probability of state " + std::to_string(s) +
                                 " is invalid: " + format_double(p));
    }
    sum += p;
  }
  if (!(std::abs(sum - 1.0) <= kProbabilityTolerance)) {
    check.violations.push_back("start distribution sums to " + format_double(sum));
  }
  if (mdp.absorbing() < mdp.num_states() && mdp.start()[mdp.absorbing()] != 0.0) {
    check.violations.push_back("start distribution places mass " +
                               format_double(mdp.start()[mdp.absorbing()]) +
                               " on the absorbing state");
  }
  return check;
}

ValidationCheck check_absorbing(const TabularMdp& mdp) {
  ValidationCheck check{"absorbing state", {}};
  const State sink = mdp.absorbing();
  if (sink >= mdp.num_states()) {
    check.violations.push_back("absorbing state undefined");
    return check;
  }
  for (Action a = 0; a < mdp.num_actions(sink); ++a) {
    if (!(std::abs(mdp.transition(sink, a)[sink] - 1.0) <= kProbabilityTolerance)) {
      check.violations.push_back("absorbing state does not self-loop under action " +
                                 std::to_string(a));
    }
    if (mdp.reward(sink, a) != 0.0) {
      check.violations.push_back("absorbing state has nonzero reward " +
                                 format_double(mdp.reward(sink, a)) + " under action " +
                                 std::to_string(a));
    }
  }
  return check;
}

ValidationCheck check_termination(const TabularMdp& mdp) {
  ValidationCheck check{"termination within horizon", {}};
  if (mdp.absorbing() >= mdp.num_states() || mdp.horizon() < 1) {
    check.violations.push_back("termination within horizon not checked: invalid header");
    return check;
  }
  std::vector<State> transient;
  for (State s = 0; s < mdp.num_states(); ++s) {
    if (s != mdp.absorbing()) transient.push_back(s);
  }
  const std::size_t n = transient.size();
  BoolMatrix reach(n, std::vector<bool>(n, false));
  for (std::size_t i = 0; i < n; ++i) {
    for (Action a = 0; a < mdp.num_actions(transient[i]); ++a) {
      const auto row = mdp.transition(transient[i], a);
      for (std::size_t j = 0; j < n; ++j) {
        if (row[transient[j]] > 0.0) reach[i][j] = true;
      }
    }
  }
  BoolMatrix power = reach;
  for (int k = 1; k < mdp.horizon() && !is_zero(power); ++k) power = multiply(power, reach);
  if (!is_zero(power)) {
    check.violations.push_back("termination within horizon not guaranteed: B^" +
                               std::to_string(mdp.horizon()) + " is nonzero");
  }
  return check;
}

}  // namespace

ValidationReport validate(const TabularMdp& mdp) {
  ValidationReport report;
  report.checks.push_back(check_header(mdp));
  report.checks.push_back(check_transitions(mdp));
  report.checks.push_back(check_start(mdp));
  report.checks.push_back(check_absorbing(mdp));
  report.checks.push_back(check_termination(mdp));
  return report;
}

}  // namespace cpg
