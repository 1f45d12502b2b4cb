#include "consensus_lab/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "consensus_lab/errors.hpp"

namespace consensus_lab {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void require_probability(double p, const char* what) {
  if (!(p >= 0.0 && p < 1.0)) {
    throw InvalidInput(std::string(what) + " must lie in [0, 1), got " +
                       std::to_string(p));
  }
}

void require_nonnegative(double v, const char* what) {
  if (!(v >= 0.0) || !std::isfinite(v)) {
    throw InvalidInput(std::string(what) + " must be finite and >= 0");
  }
}

}  // namespace

std::string_view to_string(ScheduleKind kind) {
  switch (kind) {
    case ScheduleKind::constant: return "constant";
    case ScheduleKind::power_decay: return "power_decay";
    case ScheduleKind::geometric: return "geometric";
    case ScheduleKind::explicit_list: return "explicit_list";
  }
  return "unknown";
}

ProbabilitySchedule::ProbabilitySchedule(Params params)
    : params_(std::move(params)) {
  std::visit(Overloaded{
                 [](const ConstantSchedule& s) { require_probability(s.p, "p"); },
                 [](const PowerDecaySchedule& s) {
                   require_nonnegative(s.c, "c");
                   require_nonnegative(s.beta, "beta");
                   require_probability(s.cap, "cap");
                 },
                 [](const GeometricSchedule& s) {
                   require_nonnegative(s.c, "c");
                   if (!(s.rho >= 0.0 && s.rho <= 1.0)) {
                     throw InvalidInput("rho must lie in [0, 1]");
                   }
                   require_probability(s.cap, "cap");
                 },
                 [](const ExplicitSchedule& s) {
                   for (double v : s.values) require_probability(v, "listed value");
                   require_probability(s.tail, "tail");
                 },
             },
             params_);
}

ScheduleKind ProbabilitySchedule::kind() const {
  return static_cast<ScheduleKind>(params_.index());
}

double ProbabilitySchedule::value(std::uint64_t k) const {
  return std::visit(
      Overloaded{
          [](const ConstantSchedule& s) { return s.p; },
          [k](const PowerDecaySchedule& s) {
            const double raw = s.c * std::pow(static_cast<double>(k) + 1.0, -s.beta);
            return std::min(raw, s.cap);
          },
          [k](const GeometricSchedule& s) {
            const double raw = s.c * std::pow(s.rho, static_cast<double>(k));
            return std::min(raw, s.cap);
          },
          [k](const ExplicitSchedule& s) {
            return k < s.values.size() ? s.values[static_cast<std::size_t>(k)]
                                       : s.tail;
          },
      },
      params_);
}

bool ProbabilitySchedule::is_non_increasing() const {
  if (const auto* e = std::get_if<ExplicitSchedule>(&params_)) {
    for (std::size_t i = 1; i < e->values.size(); ++i) {
      if (e->values[i] > e->values[i - 1]) return false;
    }
    return e->values.empty() || e->tail <= e->values.back();
  }
  return true;
}

bool subsequence_powers_diverge(const ProbabilitySchedule& s, int r,
                                double growth_exponent) {
  if (r < 1) throw InvalidInput("power exponent r must be >= 1");
  if (!(growth_exponent >= 1.0)) {
    throw InvalidInput("subsequence growth exponent must be >= 1");
  }
  return std::visit(
      Overloaded{
          [](const ConstantSchedule& c) { return c.p > 0.0; },
          [&](const PowerDecaySchedule& p) {
            if (p.c == 0.0 || p.cap == 0.0) return false;
            return growth_exponent * p.beta * r <= 1.0;
          },
          [](const GeometricSchedule& g) {
            return g.c > 0.0 && g.cap > 0.0 && g.rho == 1.0;
          },
          // Only the tail matters for divergence; a finite list sums finitely.
          [](const ExplicitSchedule& e) { return e.tail > 0.0; },
      },
      s.params());
}

bool sum_of_powers_diverges(const ProbabilitySchedule& s, int r) {
  return subsequence_powers_diverge(s, r, 1.0);
}

void CompensatedSum::add(double x) {
  const double t = sum_ + x;
  if (std::abs(sum_) >= std::abs(x)) {
    compensation_ += (sum_ - t) + x;
  } else {
    compensation_ += (x - t) + sum_;
  }
  sum_ = t;
}

double partial_sum(const ProbabilitySchedule& s, int r, std::uint64_t k) {
  if (r < 1) throw InvalidInput("power exponent r must be >= 1");
  CompensatedSum acc;
  for (std::uint64_t i = 0; i < k; ++i) acc.add(std::pow(s.value(i), r));
  return acc.value();
}

}  // namespace consensus_lab
