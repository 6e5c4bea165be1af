#pragma once

#include <cstdint>

#include "ranksel/ranking_models.hpp"
#include "ranksel/types.hpp"

namespace ranksel {

struct PosteriorReport {
  std::vector<double> expected_values;     // E[v_{sigma_i} | s]
  std::vector<double> expected_utilities;  // penalized by gamma when busy
  int best_index = 0;                      // argmax utility, lowest index on ties
  double status_prob = 0.0;                // P[s]
};

/// Exact Bayes posterior over ranked positions given a realized status vector.
PosteriorReport posterior_report(const RankingDistribution& dist, const CandidatePool& pool,
                                 const StatusVector& s);

/// Tabulates posterior_report over all 2^n status vectors; zero-probability
/// vectors get PolicyTable::kUnreachable.
PolicyTable oracle_policy(const RankingDistribution& dist, const CandidatePool& pool);

struct JointStats {
  double utility = 0.0;
  double p_picked_busy = 0.0;
  double p_top_picked = 0.0;
};

/// Exact expectation of a status-vector policy over the full sigma x s joint.
JointStats evaluate_policy(const PolicyTable& policy, const RankingDistribution& dist,
                           const CandidatePool& pool);

double policy_expected_utility(const PolicyTable& policy, const RankingDistribution& dist,
                               const CandidatePool& pool);

struct McEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
};

McEstimate policy_expected_utility_mc(const PolicyTable& policy, const ModelSpec& model,
                                      const CandidatePool& pool, long samples, uint64_t seed);

/// Exact ranking distribution implied by a model: superstar closed form for
/// Plackett-Luce superstar pools, otherwise an explicit table within caps.
RankingDistribution derive_distribution(const ModelSpec& model, const CandidatePool& pool);

}  // namespace ranksel
