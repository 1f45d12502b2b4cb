#pragma once

#include <cstdint>
#include <string_view>
#include <variant>
#include <vector>

namespace consensus_lab {

inline constexpr double kDefaultProbabilityCap = 0.99;

struct ConstantSchedule {
  double p = 0.0;
};

/// min(c * (k+1)^-beta, cap)
struct PowerDecaySchedule {
  double c = 1.0;
  double beta = 1.0;
  double cap = kDefaultProbabilityCap;
};

/// min(c * rho^k, cap)
struct GeometricSchedule {
  double c = 1.0;
  double rho = 0.5;
  double cap = kDefaultProbabilityCap;
};

/// values[k] for k < values.size(), tail afterwards.
struct ExplicitSchedule {
  std::vector<double> values;
  double tail = 0.0;
};

enum class ScheduleKind { constant, power_decay, geometric, explicit_list };

std::string_view to_string(ScheduleKind kind);

/// Deterministic success-probability sequence P_0, P_1, ... with
/// 0 <= P_k < 1. Construction validates the parameters.
class ProbabilitySchedule {
 public:
  using Params = std::variant<ConstantSchedule, PowerDecaySchedule,
                              GeometricSchedule, ExplicitSchedule>;

  explicit ProbabilitySchedule(Params params);

  static ProbabilitySchedule constant(double p) {
    return ProbabilitySchedule(ConstantSchedule{p});
  }
  static ProbabilitySchedule power_decay(double c, double beta,
                                         double cap = kDefaultProbabilityCap) {
    return ProbabilitySchedule(PowerDecaySchedule{c, beta, cap});
  }
  static ProbabilitySchedule geometric(double c, double rho,
                                       double cap = kDefaultProbabilityCap) {
    return ProbabilitySchedule(GeometricSchedule{c, rho, cap});
  }
  static ProbabilitySchedule explicit_list(std::vector<double> values,
                                           double tail = 0.0) {
    return ProbabilitySchedule(ExplicitSchedule{std::move(values), tail});
  }

  ScheduleKind kind() const;
  const Params& params() const { return params_; }

  double value(std::uint64_t k) const;
  double operator()(std::uint64_t k) const { return value(k); }

  /// True when P_{k+1} <= P_k holds for every k.
  bool is_non_increasing() const;

 private:
  Params params_;
};

/// Whether sum_k P_k^r diverges. r must be >= 1.
bool sum_of_powers_diverges(const ProbabilitySchedule& s, int r);

/// Whether sum_m P_{t_m}^r diverges along an index subsequence t_m that grows
/// like m^growth_exponent (growth_exponent >= 1). With growth 1 this is
/// sum_of_powers_diverges.
bool subsequence_powers_diverge(const ProbabilitySchedule& s, int r,
                                double growth_exponent);

/// sum_{i=0}^{k-1} P_i^r with compensated summation.
double partial_sum(const ProbabilitySchedule& s, int r, std::uint64_t k);

/// Neumaier-compensated accumulator.
class CompensatedSum {
 public:
  void add(double x);
  double value() const { return sum_ + compensation_; }

 private:
  double sum_ = 0.0;
  double compensation_ = 0.0;
};

}  // namespace consensus_lab
