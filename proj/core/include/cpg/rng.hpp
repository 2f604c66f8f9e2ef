#pragma once

#include <cstdint>
#include <random>

namespace cpg {

/// Deterministic random stream keyed by (master seed, index).
///
/// Streams with different keys are statistically independent, so work can
/// be split by index across threads without changing any result.
class RngStream {
 public:
  RngStream(std::uint64_t master_seed, std::uint64_t index);

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 engine_;
};

/// Child seed for sub-stream `index` of `master_seed`.
std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t index);

}  // namespace cpg
