#pragma once

#include <cstdint>
#include <variant>
#include <vector>

namespace consensus_lab {

/// Explicit C_0 = 0 < C_1 < ... < C_L; beyond the list the last gap repeats.
struct ExplicitEnds {
  std::vector<std::uint64_t> values;
};

/// C_m = ceil(scale * m^exponent), scale >= 1 and exponent >= 1.
struct PowerEnds {
  double scale = 1.0;
  double exponent = 1.0;
};

/// Strictly increasing interval boundaries 0 = C_0 < C_1 < ... partitioning
/// time into [C_m, C_{m+1}).
class IntervalEnds {
 public:
  using Params = std::variant<ExplicitEnds, PowerEnds>;

  explicit IntervalEnds(Params params);

  static IntervalEnds unit() { return IntervalEnds(PowerEnds{1.0, 1.0}); }
  static IntervalEnds linear(std::uint64_t length) {
    return IntervalEnds(PowerEnds{static_cast<double>(length), 1.0});
  }

  const Params& params() const { return params_; }

  std::uint64_t end(std::uint64_t m) const;
  std::uint64_t length(std::uint64_t m) const { return end(m + 1) - end(m); }

  /// The m with C_m <= k < C_{m+1}.
  std::uint64_t interval_of(std::uint64_t k) const;

  /// Polynomial growth rate of C_m in m (1 for explicit lists).
  double growth_exponent() const;

 private:
  Params params_;
};

}  // namespace consensus_lab
