#include "cpg/rng.hpp"

#include <array>

namespace cpg {
namespace {

std::seed_seq key_sequence(std::uint64_t master_seed, std::uint64_t index) {
  return std::seed_seq{static_cast<std::uint32_t>(master_seed),
                       static_cast<std::uint32_t>(master_seed >> 32),
                       static_cast<std::uint32_t>(index),
                       static_cast<std::uint32_t>(index >> 32)};
}

}  // namespace

RngStream::RngStream(std::uint64_t master_seed, std::uint64_t index) {
  auto seq = key_sequence(master_seed, index);
  engine_.seed(seq);
}

std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t index) {
  auto seq = key_sequence(master_seed, index);
  std::array<std::uint32_t, 2> words{};
  seq.generate(words.begin(), words.end());
  return (static_cast<std::uint64_t>(words[1]) << 32) | words[0];
}

}  // namespace cpg
