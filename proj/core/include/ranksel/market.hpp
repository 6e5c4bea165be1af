#pragma once

#include <cstdint>

#include "ranksel/strategies.hpp"

namespace ranksel {

/// App.-A dynamic market. Each step: busy candidates refresh with probability
/// q, a fresh ranking is drawn, candidate strategies are scored
/// counterfactually on the observed (ranking, status) state, then the
/// background firm's pick goes busy.
struct SimConfig {
  CandidatePool pool;
  ModelSpec model = PlackettLuce{1.0};
  double refresh_prob = 0.4;
  StrategySpec background_strategy = KFree{1};
  std::vector<StrategySpec> candidate_strategies;
  int steps = 2000;
  int replicates = 100;
  uint64_t seed = 0;
  double burn_in_frac = 0.1;  // excluded from all time averages
};

struct StrategyScore {
  StrategySpec strategy;
  double utility = 0.0;
  double std_error = 0.0;
};

struct SimReport {
  std::vector<double> steady_free_prob;  // per candidate, observation time
  std::vector<StrategyScore> strategy_utilities;
  int best_strategy = -1;                // index into strategy_utilities
  std::vector<int> best_band;            // within 2 stderr of the best
  double background_utility = 0.0;
  double background_stderr = 0.0;
  // Burn-in diagnostics: mean free probability over the second and final
  // quarters of each replicate.
  double free_prob_q2 = 0.0;
  double free_prob_q4 = 0.0;
};

SimReport run_sim(const SimConfig& config);

/// Evaluates all KFree{k}/KBusy{k} for k = 1..n (KFree{1} doubles as
/// follow-the-ranking) against the configured background.
SimReport strategy_sweep(const SimConfig& config);

}  // namespace ranksel
