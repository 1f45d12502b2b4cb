#include "consensus_lab/interval_ends.hpp"

#include <algorithm>
#include <cmath>

#include "consensus_lab/errors.hpp"

namespace consensus_lab {

IntervalEnds::IntervalEnds(Params params) : params_(std::move(params)) {
  if (const auto* e = std::get_if<ExplicitEnds>(&params_)) {
    if (e->values.size() < 2 || e->values.front() != 0) {
      throw InvalidInput("interval ends need C_0 = 0 and at least C_1");
    }
    for (std::size_t i = 1; i < e->values.size(); ++i) {
      if (e->values[i] <= e->values[i - 1]) {
        throw InvalidInput("interval ends must be strictly increasing");
      }
    }
  } else {
    const auto& p = std::get<PowerEnds>(params_);
    if (!(p.scale >= 1.0) || !(p.exponent >= 1.0) || !std::isfinite(p.scale) ||
        !std::isfinite(p.exponent)) {
      throw InvalidInput("power interval ends need scale >= 1 and exponent >= 1");
    }
  }
}

std::uint64_t IntervalEnds::end(std::uint64_t m) const {
  if (const auto* e = std::get_if<ExplicitEnds>(&params_)) {
    const auto& v = e->values;
    if (m < v.size()) return v[static_cast<std::size_t>(m)];
    const std::uint64_t gap = v.back() - v[v.size() - 2];
    return v.back() + (m - (v.size() - 1)) * gap;
  }
  const auto& p = std::get<PowerEnds>(params_);
  return static_cast<std::uint64_t>(
      std::ceil(p.scale * std::pow(static_cast<double>(m), p.exponent)));
}

std::uint64_t IntervalEnds::interval_of(std::uint64_t k) const {
  if (const auto* e = std::get_if<ExplicitEnds>(&params_)) {
    const auto& v = e->values;
    if (k < v.back()) {
      const auto it = std::upper_bound(v.begin(), v.end(), k);
      return static_cast<std::uint64_t>(it - v.begin()) - 1;
    }
    const std::uint64_t gap = v.back() - v[v.size() - 2];
    return (v.size() - 1) + (k - v.back()) / gap;
  }
  // Largest m with end(m) <= k; end(m) >= m bounds the search.
  std::uint64_t lo = 0;
  std::uint64_t hi = k + 1;
  while (hi - lo > 1) {
    const std::uint64_t mid = lo + (hi - lo) / 2;
    if (end(mid) <= k) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo;
}

double IntervalEnds::growth_exponent() const {
  if (const auto* p = std::get_if<PowerEnds>(&params_)) return p->exponent;
  return 1.0;
}

}  // namespace consensus_lab
