#pragma once

#include <array>
#include <cstdint>

namespace consensus_lab {

/// Philox4x32-10 counter-based bijection (Salmon et al., Random123).
/// Output is a pure function of (counter, key); no state is carried.
class Philox4x32 {
 public:
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Counter generate(Counter counter, Key key);
};

/// Independent draw families. Each tag addresses its own slice of the
/// counter space so that, e.g., node coin flips never alias arc draws.
enum class StreamTag : std::uint32_t {
  node_success = 1,
  arc = 2,
  rooted_coin = 3,
  root_choice = 4,
  parent_order = 5,
  parent_pick = 6,
  arc_slot = 7,
  filler_arc = 8,
  extra_arc = 9,
  block_coin = 10,
  property_case = 11,
};

/// Coordinate-addressed random stream for one trial of one experiment.
/// A draw is identified by (master seed, trial, time, slot, tag); equal
/// coordinates always reproduce the same value.
class RngStream {
 public:
  RngStream(std::uint64_t master_seed, std::uint32_t trial)
      : master_seed_(master_seed), trial_(trial) {}

  std::uint64_t master_seed() const { return master_seed_; }
  std::uint32_t trial() const { return trial_; }

  RngStream for_trial(std::uint32_t trial) const { return {master_seed_, trial}; }

  /// 64 random bits at the given coordinates. `time` may use up to 56 bits.
  std::uint64_t bits(std::uint64_t time, std::uint32_t slot, StreamTag tag) const;

  /// Uniform double in [0, 1) with 53 bits of resolution.
  double uniform(std::uint64_t time, std::uint32_t slot, StreamTag tag) const {
    return static_cast<double>(bits(time, slot, tag) >> 11) * 0x1.0p-53;
  }

  bool bernoulli(double p, std::uint64_t time, std::uint32_t slot,
                 StreamTag tag) const {
    return uniform(time, slot, tag) < p;
  }

  /// Uniform integer in [0, bound), bound >= 1 (Lemire's multiply-shift;
  /// bias below 2^-32 for the bounds used here).
  std::uint32_t below(std::uint32_t bound, std::uint64_t time, std::uint32_t slot,
                      StreamTag tag) const;

 private:
  std::uint64_t master_seed_;
  std::uint32_t trial_;
};

}  // namespace consensus_lab
