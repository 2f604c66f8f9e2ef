#include "cpg/kinds.hpp"

namespace cpg {

std::string_view to_string(GradientKind kind) noexcept {
  switch (kind) {
    case GradientKind::start: return "start";
    case GradientKind::dropped: return "dropped";
    case GradientKind::classical: return "classical";
    case GradientKind::classical_oracle_q: return "classical_oracle_q";
  }
  return "unknown";
}

std::optional<GradientKind> parse_gradient_kind(std::string_view name) noexcept {
  for (auto kind : {GradientKind::start, GradientKind::dropped, GradientKind::classical,
                    GradientKind::classical_oracle_q}) {
    if (to_string(kind) == name) return kind;
  }
  return std::nullopt;
}

}  // namespace cpg
