#pragma once

#include <optional>
#include <string_view>

namespace cpg {

/// Which gradient expression an estimator or oracle evaluates.
///   start               gamma^t-weighted score terms (gradient of J_s)
///   dropped             the same without gamma^t (not the gradient of J_s)
///   classical           the classical-objective form with weights w(i, t)
///   classical_oracle_q  classical form with exact q in place of returns
enum class GradientKind { start, dropped, classical, classical_oracle_q };

std::string_view to_string(GradientKind kind) noexcept;
std::optional<GradientKind> parse_gradient_kind(std::string_view name) noexcept;

}  // namespace cpg
