#pragma once

#include <cstdint>

namespace consensus_lab {

struct Interval {
  double low = 0.0;
  double high = 1.0;
};

/// 95% Wilson score interval for `successes` out of `trials`.
Interval wilson_interval(std::uint64_t successes, std::uint64_t trials,
                         double z = 1.959963984540054);

}  // namespace consensus_lab
