#pragma once

#include <cstdint>

#include "ranksel/strategies.hpp"

namespace ranksel {

struct MetricsRecord {
  double p_picked_busy = 0.0;
  double p_top_picked = 0.0;
  double firm_utility = 0.0;
  double regret_vs_oracle = 0.0;
  // Standard errors; zero for exact records.
  double utility_stderr = 0.0;
  double p_picked_busy_stderr = 0.0;
  double p_top_picked_stderr = 0.0;
  bool exact = true;
};

/// App.-C closed form for P[picked candidate is busy] under a fixed-window
/// first-free or first-busy strategy in the superstar setting.
double p_picked_busy_closed(const SuperstarDistribution& dist, double p1, double p2,
                            const StrategySpec& strategy);

/// App.-C closed form for P[the top-ranked candidate is picked].
double p_top_picked_closed(const SuperstarDistribution& dist, double p1, double p2,
                           const StrategySpec& strategy);

/// Exact metrics by full sigma x s enumeration (within caps). Strategies that
/// need permutation probabilities take them from dist/model.
MetricsRecord metrics_exact(const StrategySpec& strategy, const RankingDistribution& dist,
                            const CandidatePool& pool, const ModelSpec* model = nullptr);

/// Monte Carlo metrics for any n. Regret is filled only when the oracle is
/// tabulatable within caps (NaN otherwise).
MetricsRecord metrics_mc(const StrategySpec& strategy, const ModelSpec& model,
                         const CandidatePool& pool, long samples, uint64_t seed);

struct DirectionRow {
  double beta = 0.0;
  Direction direction = Direction::first_free;
  int window_jstar = 1;
  double top_prob = 0.0;        // P[sigma^1]
  double oracle_utility = 0.0;  // best response
  double algo_utility = 0.0;    // Alg. 1
  std::vector<double> kfree_p_busy, kbusy_p_busy;
  std::vector<double> kfree_p_top, kbusy_p_top;
};

struct DirectionReport {
  std::vector<int> k_grid;
  std::vector<DirectionRow> rows;
  // Monotonicity along the descending-beta (increasing-accuracy) chain.
  int oracle_utility_violations = 0;
  int kfree_p_busy_violations = 0;
  bool p_top_rise = false;  // some consecutive increase of p_top_picked
  bool p_top_fall = false;  // some consecutive decrease
};

/// Thm.-4/5/6 direction study for a superstar pool along a descending beta
/// grid; closed forms for the fixed-k families, exact oracle/Alg.-1 utilities.
DirectionReport accuracy_direction_report(const CandidatePool& pool,
                                          const std::vector<double>& beta_grid,
                                          const std::vector<int>& k_grid);

}  // namespace ranksel
