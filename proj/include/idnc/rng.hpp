#pragma once

// Counter-based randomness (Philox4x32-10).
//
// Every random draw in the simulator is a pure function of
//   key     = (seed low 32 bits, seed high 32 bits)
//   counter = (index, substream, run, stream tag)
// so runs, receivers and purposes never share draws, and any draw can be
// replayed in isolation. Erasure outcomes use substream = receiver and
// index = slot, which also gives every scheduler the same channel
// realisation for a given (seed, run).

#include <array>
#include <cstdint>
#include <limits>

namespace idnc {

using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

PhiloxCounter philox4x32_10(PhiloxCounter counter, PhiloxKey key);

enum class StreamTag : std::uint32_t {
  Erasure = 1,
  ErasureProfile = 2,
  GopSizes = 3,
  RlncMonteCarlo = 4,
};

// 53-bit uniform in [0, 1) from the first two output words of one block.
double counter_uniform(std::uint64_t seed, StreamTag tag, std::uint32_t run, std::uint32_t substream,
                       std::uint32_t index);

// Sequential view of one (seed, tag, run, substream) stream. Satisfies
// UniformRandomBitGenerator so it can drive <random> distributions.
class RandomStream {
 public:
  using result_type = std::uint32_t;

  RandomStream(std::uint64_t seed, StreamTag tag, std::uint32_t run, std::uint32_t substream = 0);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()();
  double uniform();

 private:
  PhiloxKey key_;
  PhiloxCounter counter_;
  PhiloxCounter block_{};
  unsigned used_ = 4;
};

}  // namespace idnc
