#include <gtest/gtest.h>

#include "consensus_lab/errors.hpp"
#include "consensus_lab/interval_ends.hpp"
#include "consensus_lab/schedule.hpp"

using namespace consensus_lab;

TEST(Schedule, Values) {
  const auto pd = ProbabilitySchedule::power_decay(1.0, 1.0, 0.9);
  EXPECT_DOUBLE_EQ(pd.value(0), 0.9);
  EXPECT_DOUBLE_EQ(pd.value(9), 0.1);
  EXPECT_DOUBLE_EQ(ProbabilitySchedule::geometric(0.5, 0.5, 0.9).value(2), 0.125);
  EXPECT_DOUBLE_EQ(ProbabilitySchedule::constant(0.3)(1000000), 0.3);
  const auto ex = ProbabilitySchedule::explicit_list({0.5, 0.9, 0.1}, 0.05);
  EXPECT_DOUBLE_EQ(ex.value(1), 0.9);
  EXPECT_DOUBLE_EQ(ex.value(3), 0.05);
  EXPECT_DOUBLE_EQ(ex.value(1u << 30), 0.05);
}

TEST(Schedule, Validation) {
  EXPECT_THROW(ProbabilitySchedule::constant(1.0), InvalidInput);
  EXPECT_THROW(ProbabilitySchedule::constant(-0.1), InvalidInput);
  EXPECT_THROW(ProbabilitySchedule::power_decay(1.0, 1.0, 1.0), InvalidInput);
  EXPECT_THROW(ProbabilitySchedule::power_decay(1.0, -1.0), InvalidInput);
  EXPECT_THROW(ProbabilitySchedule::geometric(0.5, 1.5), InvalidInput);
  EXPECT_THROW(ProbabilitySchedule::explicit_list({0.5, 1.0}), InvalidInput);
  EXPECT_NO_THROW(ProbabilitySchedule::constant(0.0));
}

TEST(Schedule, Monotonicity) {
  EXPECT_TRUE(ProbabilitySchedule::constant(0.3).is_non_increasing());
  EXPECT_TRUE(ProbabilitySchedule::power_decay(1.0, 0.5).is_non_increasing());
  EXPECT_TRUE(ProbabilitySchedule::geometric(0.9, 0.5).is_non_increasing());
  EXPECT_FALSE(ProbabilitySchedule::explicit_list({0.5, 0.9, 0.1}).is_non_increasing());
  EXPECT_TRUE(ProbabilitySchedule::explicit_list({0.5, 0.4}, 0.4).is_non_increasing());
  EXPECT_FALSE(ProbabilitySchedule::explicit_list({0.5, 0.4}, 0.45).is_non_increasing());
}

TEST(Divergence, Examples) {
  EXPECT_TRUE(sum_of_powers_diverges(ProbabilitySchedule::constant(0.5), 1));
  EXPECT_FALSE(sum_of_powers_diverges(ProbabilitySchedule::constant(0.0), 1));
  EXPECT_FALSE(sum_of_powers_diverges(ProbabilitySchedule::power_decay(1.0, 2.0), 1));
  EXPECT_TRUE(sum_of_powers_diverges(ProbabilitySchedule::power_decay(1.0, 0.5), 2));
  EXPECT_FALSE(sum_of_powers_diverges(ProbabilitySchedule::power_decay(1.0, 0.5), 3));
  EXPECT_FALSE(sum_of_powers_diverges(ProbabilitySchedule::geometric(0.9, 0.99), 1));
  EXPECT_TRUE(sum_of_powers_diverges(ProbabilitySchedule::geometric(0.5, 1.0), 4));
  EXPECT_TRUE(sum_of_powers_diverges(ProbabilitySchedule::explicit_list({0.1}, 0.01), 2));
  EXPECT_FALSE(sum_of_powers_diverges(ProbabilitySchedule::explicit_list({0.1}, 0.0), 1));
  EXPECT_THROW(sum_of_powers_diverges(ProbabilitySchedule::constant(0.5), 0), InvalidInput);
}

TEST(Divergence, Subsequence) {
  // P_{m^2} with P_k = k^-0.5 behaves like m^-1: diverges at r = 1 only.
  const auto s = ProbabilitySchedule::power_decay(1.0, 0.5);
  EXPECT_TRUE(subsequence_powers_diverge(s, 1, 2.0));
  EXPECT_FALSE(subsequence_powers_diverge(s, 2, 2.0));
  EXPECT_FALSE(subsequence_powers_diverge(s, 1, 3.0));
  EXPECT_EQ(subsequence_powers_diverge(s, 2, 1.0), sum_of_powers_diverges(s, 2));
}

TEST(PartialSum, Examples) {
  EXPECT_DOUBLE_EQ(partial_sum(ProbabilitySchedule::constant(0.7), 1, 0), 0.0);
  EXPECT_DOUBLE_EQ(partial_sum(ProbabilitySchedule::constant(0.5), 2, 4), 1.0);
  EXPECT_NEAR(partial_sum(ProbabilitySchedule::power_decay(1.0, 1.0, 0.9), 1, 3),
              0.9 + 0.5 + 1.0 / 3.0, 1e-15);
}

TEST(CompensatedSum, KeepsSmallTerms) {
  CompensatedSum s;
  s.add(1.0);
  for (int i = 0; i < 1000000; ++i) s.add(1e-16);
  s.add(-1.0);
  EXPECT_NEAR(s.value(), 1e-10, 1e-20);
}

TEST(IntervalEnds, PowerAndExplicit) {
  const auto unit = IntervalEnds::unit();
  EXPECT_EQ(unit.end(0), 0u);
  EXPECT_EQ(unit.end(5), 5u);
  const auto lin = IntervalEnds::linear(3);
  EXPECT_EQ(lin.end(2), 6u);
  EXPECT_EQ(lin.interval_of(7), 2u);
  const IntervalEnds sq(PowerEnds{1.0, 2.0});
  EXPECT_EQ(sq.end(3), 9u);
  EXPECT_EQ(sq.length(3), 7u);
  EXPECT_EQ(sq.interval_of(9), 3u);
  EXPECT_EQ(sq.interval_of(8), 2u);
  EXPECT_DOUBLE_EQ(sq.growth_exponent(), 2.0);

  const IntervalEnds ex(ExplicitEnds{{0, 2, 5}});
  EXPECT_EQ(ex.end(2), 5u);
  EXPECT_EQ(ex.end(4), 11u);  // last gap (3) repeats
  EXPECT_EQ(ex.interval_of(4), 1u);
  EXPECT_EQ(ex.interval_of(10), 3u);
}

TEST(IntervalEnds, Validation) {
  EXPECT_THROW(IntervalEnds(ExplicitEnds{{1, 2}}), InvalidInput);
  EXPECT_THROW(IntervalEnds(ExplicitEnds{{0, 2, 2}}), InvalidInput);
  EXPECT_THROW(IntervalEnds(PowerEnds{0.5, 1.0}), InvalidInput);
  EXPECT_THROW(IntervalEnds(PowerEnds{1.0, 0.5}), InvalidInput);
}
