#include <benchmark/benchmark.h>

#include "consensus_lab/bounds.hpp"
#include "consensus_lab/consensus.hpp"
#include "consensus_lab/graph_process.hpp"

using namespace consensus_lab;

static void BM_Philox(benchmark::State& state) {
  const RngStream rng(1, 0);
  std::uint64_t t = 0;
  for (auto _ : state) benchmark::DoNotOptimize(rng.bits(t++, 0, StreamTag::arc));
}
BENCHMARK(BM_Philox);

static void BM_ApplyUpdate(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Digraph g = Digraph::complete(n);
  const auto rule = WeightRule::self_confident(0.6);
  std::vector<double> x(static_cast<std::size_t>(n)), scratch(x.size());
  for (int i = 0; i < n; ++i) x[static_cast<std::size_t>(i)] = i;
  const SuccessMask all = n == 64 ? ~SuccessMask{0} : (SuccessMask{1} << n) - 1;
  for (auto _ : state) {
    apply_update(x, g, rule, all, scratch);
    benchmark::DoNotOptimize(x.data());
  }
}
BENCHMARK(BM_ApplyUpdate)->Arg(5)->Arg(16)->Arg(64);

static void BM_ArcSampling(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto p = GraphProcess::arc_independent(Digraph::complete(n), 0.5, 0.5);
  const RngStream rng(2, 0);
  std::uint64_t k = 0;
  for (auto _ : state) benchmark::DoNotOptimize(p.sample(k++, rng));
}
BENCHMARK(BM_ArcSampling)->Arg(5)->Arg(16)->Arg(64);

static void BM_RunTrial(benchmark::State& state) {
  const auto p = GraphProcess::arc_independent(Digraph::complete(5), 0.5, 0.5);
  const auto s = ProbabilitySchedule::power_decay(0.1, 2.0, 0.9);
  TrialOptions o;
  o.horizon = static_cast<std::uint64_t>(state.range(0));
  o.record_h = false;
  o.record_psi = false;
  const std::vector<double> x0{1, 0, 0, 0, 0};
  std::uint32_t trial = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        run_trial(p, s, WeightRule::self_confident(0.6), x0, o, RngStream(3, trial++)));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_RunTrial)->Arg(10000)->Unit(benchmark::kMillisecond);

static void BM_ArcIndependentBound(benchmark::State& state) {
  BoundQuery q;
  q.n = 2;
  q.epsilon = 0.1;
  q.schedule = ProbabilitySchedule::constant(0.5);
  q.eta = 0.5;
  q.theta0 = 1.0;
  q.basic_arc_count = 2;
  for (auto _ : state) benchmark::DoNotOptimize(tcom_upper_arc_independent(q));
}
BENCHMARK(BM_ArcIndependentBound);
BENCHMARK_MAIN();
