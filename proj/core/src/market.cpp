#include "ranksel/market.hpp"

#include <cmath>

namespace ranksel {

namespace {

struct Accumulator {
  double sum = 0.0;
  double sum_sq = 0.0;
  int count = 0;

  void add(double x) {
    sum += x;
    sum_sq += x * x;
    ++count;
  }
  double mean() const { return count ? sum / count : 0.0; }
  double std_error() const {
    if (count < 2) return 0.0;
    const double m = mean();
    const double var = (sum_sq - static_cast<double>(count) * m * m) /
                       static_cast<double>(count - 1);
    return std::sqrt(std::max(0.0, var) / static_cast<double>(count));
  }
};

}  // namespace

SimReport run_sim(const SimConfig& config) {
  const CandidatePool& pool = config.pool;
  pool.validate();
  if (!(config.refresh_prob > 0.0 && config.refresh_prob <= 1.0))
    throw std::invalid_argument("market sim: refresh_prob outside (0,1]");
  if (config.steps < 1 || config.replicates < 1)
    throw std::invalid_argument("market sim: need steps >= 1 and replicates >= 1");
  const int n = pool.size();
  const int burn_in = static_cast<int>(config.burn_in_frac * config.steps);

  StrategyPicker background(config.background_strategy, pool, &config.model, nullptr);
  std::vector<StrategyPicker> candidates;
  candidates.reserve(config.candidate_strategies.size());
  for (const StrategySpec& strategy : config.candidate_strategies)
    candidates.emplace_back(strategy, pool, &config.model, nullptr);

  std::vector<Accumulator> utility_acc(candidates.size());
  Accumulator background_acc;
  std::vector<Accumulator> free_acc(static_cast<size_t>(n));
  Accumulator q2_acc, q4_acc;

  std::vector<int> free(static_cast<size_t>(n));
  StatusVector s(static_cast<size_t>(n));
  for (int rep = 0; rep < config.replicates; ++rep) {
    Rng rng(derive_seed(config.seed, static_cast<uint64_t>(rep)));
    std::fill(free.begin(), free.end(), 1);
    // Candidate re-engaged while already busy; they sit out the next refresh.
    int held = -1;
    std::vector<double> util_sum(candidates.size(), 0.0);
    double background_sum = 0.0;
    std::vector<long> free_sum(static_cast<size_t>(n), 0);
    long measured = 0;
    long q2_sum = 0, q4_sum = 0, q2_steps = 0, q4_steps = 0;

    for (int t = 0; t < config.steps; ++t) {
      for (int c = 0; c < n; ++c)
        if (!free[static_cast<size_t>(c)] && rng.bernoulli(config.refresh_prob) && c != held)
          free[static_cast<size_t>(c)] = 1;
      held = -1;
      const Permutation perm = sample_ranking(config.model, pool, rng);
      for (int pos = 0; pos < n; ++pos)
        s[static_cast<size_t>(pos)] = free[static_cast<size_t>(perm[static_cast<size_t>(pos)])];

      const bool measure = t >= burn_in;
      auto payoff = [&](int pick) {
        const int cand = perm[static_cast<size_t>(pick)];
        const double v = pool.values[static_cast<size_t>(cand)];
        return s[static_cast<size_t>(pick)] ? v : v / pool.busy_penalties[static_cast<size_t>(cand)];
      };
      if (measure)
        for (size_t i = 0; i < candidates.size(); ++i)
          util_sum[i] += payoff(candidates[i].pick(s));

      const int pick = background.pick(s);
      if (measure) background_sum += payoff(pick);
      if (!s[static_cast<size_t>(pick)]) held = perm[static_cast<size_t>(pick)];
      free[static_cast<size_t>(perm[static_cast<size_t>(pick)])] = 0;

      // Occupancy is recorded at end of step (after the pick, before the next
      // refresh); this is the state the steady-state figures describe.
      if (measure) {
        ++measured;
        for (int c = 0; c < n; ++c)
          free_sum[static_cast<size_t>(c)] += free[static_cast<size_t>(c)];
      }
      long total_free = 0;
      for (int c = 0; c < n; ++c) total_free += free[static_cast<size_t>(c)];
      if (t >= config.steps / 4 && t < config.steps / 2) {
        q2_sum += total_free;
        ++q2_steps;
      } else if (t >= config.steps / 2) {
        q4_sum += total_free;
        ++q4_steps;
      }
    }

    const double steps = static_cast<double>(measured);
    for (size_t i = 0; i < candidates.size(); ++i) utility_acc[i].add(util_sum[i] / steps);
    background_acc.add(background_sum / steps);
    for (int c = 0; c < n; ++c)
      free_acc[static_cast<size_t>(c)].add(static_cast<double>(free_sum[static_cast<size_t>(c)]) / steps);
    q2_acc.add(static_cast<double>(q2_sum) / (static_cast<double>(q2_steps) * n));
    q4_acc.add(static_cast<double>(q4_sum) / (static_cast<double>(q4_steps) * n));
  }

  SimReport report;
  report.steady_free_prob.resize(static_cast<size_t>(n));
  for (int c = 0; c < n; ++c)
    report.steady_free_prob[static_cast<size_t>(c)] = free_acc[static_cast<size_t>(c)].mean();
  for (size_t i = 0; i < candidates.size(); ++i)
    report.strategy_utilities.push_back(
        {config.candidate_strategies[i], utility_acc[i].mean(), utility_acc[i].std_error()});
  report.background_utility = background_acc.mean();
  report.background_stderr = background_acc.std_error();
  report.free_prob_q2 = q2_acc.mean();
  report.free_prob_q4 = q4_acc.mean();
  if (!report.strategy_utilities.empty()) {
    report.best_strategy = 0;
    for (size_t i = 1; i < report.strategy_utilities.size(); ++i)
      if (report.strategy_utilities[i].utility >
          report.strategy_utilities[static_cast<size_t>(report.best_strategy)].utility)
        report.best_strategy = static_cast<int>(i);
    const StrategyScore& best =
        report.strategy_utilities[static_cast<size_t>(report.best_strategy)];
    for (size_t i = 0; i < report.strategy_utilities.size(); ++i) {
      const StrategyScore& score = report.strategy_utilities[i];
      const double band = 2.0 * std::sqrt(best.std_error * best.std_error + score.std_error * score.std_error);
      if (score.utility >= best.utility - band) report.best_band.push_back(static_cast<int>(i));
    }
  }
  return report;
}

SimReport strategy_sweep(const SimConfig& config) {
  SimConfig sweep = config;
  sweep.candidate_strategies.clear();
  sweep.candidate_strategies.push_back(FollowRanking{});
  for (int k = 1; k <= sweep.pool.size(); ++k) sweep.candidate_strategies.push_back(KFree{k});
  for (int k = 1; k <= sweep.pool.size(); ++k) sweep.candidate_strategies.push_back(KBusy{k});
  return run_sim(sweep);
}

}  // namespace ranksel
