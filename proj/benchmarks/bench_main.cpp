#include <benchmark/benchmark.h>

#include <algorithm>

#include "ranksel/market.hpp"
#include "ranksel/posterior.hpp"
#include "ranksel/ranking_models.hpp"

namespace {

using namespace ranksel;

CandidatePool pool_of(int n) {
  CandidatePool pool;
  double v = 1.0;
  double p = 0.2;
  for (int i = 0; i < n; ++i) {
    pool.values.push_back(v);
    pool.free_probs.push_back(p);
    pool.busy_penalties.push_back(2.0);
    v *= 0.8;
    p = std::min(0.9, p + 0.05);
  }
  return pool;
}

void BM_PlackettLuceTable(benchmark::State& state) {
  const CandidatePool pool = pool_of(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(plackett_luce_table(pool, 1.0));
}
BENCHMARK(BM_PlackettLuceTable)->Arg(4)->Arg(6)->Arg(7);

void BM_MallowsTable(benchmark::State& state) {
  const CandidatePool pool = pool_of(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(mallows_table(pool, 0.5));
}
BENCHMARK(BM_MallowsTable)->Arg(4)->Arg(6)->Arg(7);

void BM_SampleRanking(benchmark::State& state) {
  const CandidatePool pool = pool_of(static_cast<int>(state.range(0)));
  const ModelSpec model = PlackettLuce{1.0};
  Rng rng(1);
  for (auto _ : state) benchmark::DoNotOptimize(sample_ranking(model, pool, rng));
}
BENCHMARK(BM_SampleRanking)->Arg(5)->Arg(10)->Arg(20);

void BM_PosteriorReport(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const CandidatePool pool = pool_of(n);
  const RankingDistribution dist = plackett_luce_table(pool, 1.0);
  StatusVector s(static_cast<size_t>(n), 0);
  for (int i = 0; i < n; i += 2) s[static_cast<size_t>(i)] = 1;
  for (auto _ : state) benchmark::DoNotOptimize(posterior_report(dist, pool, s));
}
BENCHMARK(BM_PosteriorReport)->Arg(4)->Arg(6)->Arg(7);

void BM_OraclePolicy(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const CandidatePool pool = pool_of(n);
  const RankingDistribution dist = plackett_luce_table(pool, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(oracle_policy(dist, pool));
}
BENCHMARK(BM_OraclePolicy)->Arg(4)->Arg(6);

void BM_MarketSim(benchmark::State& state) {
  SimConfig config;
  config.pool = pool_of(10);
  config.model = PlackettLuce{3.0};
  config.background_strategy = KFree{10};
  config.candidate_strategies = {KFree{2}, KBusy{3}};
  config.steps = static_cast<int>(state.range(0));
  config.replicates = 1;
  config.seed = 7;
  for (auto _ : state) benchmark::DoNotOptimize(run_sim(config));
}
BENCHMARK(BM_MarketSim)->Arg(500)->Arg(2000);

}  // namespace

BENCHMARK_MAIN();
