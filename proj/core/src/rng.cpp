#include "consensus_lab/rng.hpp"

namespace consensus_lab {
namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void round(Philox4x32::Counter& c, const Philox4x32::Key& k) {
  const std::uint64_t p0 = std::uint64_t{kMul0} * c[0];
  const std::uint64_t p1 = std::uint64_t{kMul1} * c[2];
  const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
  const auto lo0 = static_cast<std::uint32_t>(p0);
  const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
  const auto lo1 = static_cast<std::uint32_t>(p1);
  c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
}

}  // namespace

Philox4x32::Counter Philox4x32::generate(Counter counter, Key key) {
  for (int r = 0; r < 10; ++r) {
    if (r > 0) {
      key[0] += kWeyl0;
      key[1] += kWeyl1;
    }
    round(counter, key);
  }
  return counter;
}

std::uint64_t RngStream::bits(std::uint64_t time, std::uint32_t slot,
                              StreamTag tag) const {
  const Philox4x32::Counter counter{
      trial_, static_cast<std::uint32_t>(time), slot,
      (static_cast<std::uint32_t>(tag) << 24) |
          static_cast<std::uint32_t>((time >> 32) & 0xFFFFFFu)};
  const Philox4x32::Key key{static_cast<std::uint32_t>(master_seed_),
                            static_cast<std::uint32_t>(master_seed_ >> 32)};
  const auto out = Philox4x32::generate(counter, key);
  return (std::uint64_t{out[1]} << 32) | out[0];
}

std::uint32_t RngStream::below(std::uint32_t bound, std::uint64_t time,
                               std::uint32_t slot, StreamTag tag) const {
  const std::uint64_t r = bits(time, slot, tag) >> 32;
  return static_cast<std::uint32_t>((r * bound) >> 32);
}

}  // namespace consensus_lab
