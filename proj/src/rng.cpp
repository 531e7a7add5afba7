#include "idnc/rng.hpp"

namespace idnc {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

PhiloxCounter round(const PhiloxCounter& c, const PhiloxKey& k) {
  const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * c[0];
  const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * c[2];
  const auto hi0 = static_cast<std::uint32_t>(p0 >> 32), lo0 = static_cast<std::uint32_t>(p0);
  const auto hi1 = static_cast<std::uint32_t>(p1 >> 32), lo1 = static_cast<std::uint32_t>(p1);
  return {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
}

PhiloxKey split(std::uint64_t seed) {
  return {static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
}

double to_unit(std::uint32_t a, std::uint32_t b) {
  const std::uint64_t bits = ((static_cast<std::uint64_t>(a) << 32) | b) >> 11;
  return static_cast<double>(bits) * 0x1.0p-53;
}

}  // namespace

PhiloxCounter philox4x32_10(PhiloxCounter counter, PhiloxKey key) {
  counter = round(counter, key);
  for (int r = 1; r < 10; ++r) {
    key[0] += kWeyl0;
    key[1] += kWeyl1;
    counter = round(counter, key);
  }
  return counter;
}

double counter_uniform(std::uint64_t seed, StreamTag tag, std::uint32_t run, std::uint32_t substream,
                       std::uint32_t index) {
  const auto out =
      philox4x32_10({index, substream, run, static_cast<std::uint32_t>(tag)}, split(seed));
  return to_unit(out[0], out[1]);
}

RandomStream::RandomStream(std::uint64_t seed, StreamTag tag, std::uint32_t run,
                           std::uint32_t substream)
    : key_(split(seed)), counter_{0, substream, run, static_cast<std::uint32_t>(tag)} {}

RandomStream::result_type RandomStream::operator()() {
  if (used_ == 4) {
    block_ = philox4x32_10(counter_, key_);
    ++counter_[0];
    used_ = 0;
  }
  return block_[used_++];
}

double RandomStream::uniform() {
  const std::uint32_t a = (*this)();
  const std::uint32_t b = (*this)();
  return to_unit(a, b);
}

}  // namespace idnc
