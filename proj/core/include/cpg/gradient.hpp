#pragma once

#include <span>
#include <vector>

namespace cpg {

/// Dense vector in flattened (state, action) coordinates.
using Gradient = std::vector<double>;

inline void axpy(double scale, std::span<const double> x, std::span<double> y) {
  for (std::size_t k = 0; k < y.size(); ++k) y[k] += scale * x[k];
}

double l2_norm(std::span<const double> x);
double max_abs_diff(std::span<const double> a, std::span<const double> b);

}  // namespace cpg
