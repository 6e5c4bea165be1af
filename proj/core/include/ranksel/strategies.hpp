#pragma once

#include "ranksel/posterior.hpp"
#include "ranksel/ranking_models.hpp"
#include "ranksel/types.hpp"

namespace ranksel {

enum class Direction { first_free, first_busy };

/// Alg.-1 window: r is the free-busy odds ratio, R the value-adjusted
/// threshold, window_jstar the window size (count of top positions).
struct WindowComputation {
  double ratio_r = 0.0;
  double threshold_R = 0.0;
  Direction direction = Direction::first_free;
  int window_jstar = 1;
};

WindowComputation superstar_window(const CandidatePool& pool, const SuperstarDistribution& dist);

/// First position inside the window with the preferred status; 0 if none.
int superstar_select(const WindowComputation& window, const StatusVector& s);

/// Alg.-1 decision when only (top status, position of first flipped status)
/// is known; returns 0 or j_pos.
int superstar_decide(const WindowComputation& window, int s_top, int j_pos);

enum class BoundKind { theorem3, lemma9_pick_j, lemma9_pick_1 };

struct ErrorBound {
  double bound_value = 0.0;
  BoundKind kind = BoundKind::theorem3;
};

/// Thm.-3 additive error of Alg. 1 vs the oracle, for the status pattern whose
/// first flipped position is j_pos.
ErrorBound theorem3_bound(const CandidatePool& pool, const SuperstarDistribution& dist,
                          int j_pos);

/// One row per voting pair (hi, lo): G >= 0 votes for position j_pos, G < 0
/// votes for position 0.
struct VoteLedger {
  struct PairScore {
    int hi = 0;
    int lo = 0;
    double g = 0.0;
  };
  std::vector<PairScore> pair_scores;
  double sum_for_j = 0.0;  // total magnitude of G >= 0 votes
  double sum_for_1 = 0.0;  // total magnitude of G < 0 votes
  int decision = 0;        // 0 or j_pos
};

/// Alg. 2: pairwise voting between position 0 and the first position j_pos
/// whose status differs from s_top. Model must provide exact permutation
/// probabilities (Plackett-Luce, Mallows, or Explicit).
VoteLedger pairwise_vote_select(const CandidatePool& pool, const ModelSpec& model, int s_top,
                                int j_pos, VoteMode mode);

struct Lemma9Report {
  ErrorBound proof_version;    // includes the likelihood-ratio coefficient C
  ErrorBound theorem_version;  // plain value gaps, no coefficient
  double coefficient_c = 1.0;
};

/// Lemma-9 additive error bounds for a realized Alg.-2 decision (0 or j_pos)
/// under the full status vector s.
Lemma9Report lemma9_bounds(const CandidatePool& pool, const ModelSpec& model, int j_pos,
                           int decision, const StatusVector& s, VoteMode mode);

/// Materializes any strategy as a status-mask -> position table. Strategies
/// that need ranking probabilities (SuperstarAlgo, PairwiseVoteAlgo,
/// OraclePolicyRef) read them from dist; PairwiseVoteAlgo additionally needs
/// the generating model.
PolicyTable strategy_as_policy(const StrategySpec& strategy, const CandidatePool& pool,
                               const RankingDistribution& dist,
                               const ModelSpec* model = nullptr);

/// Per-sample picker used by Monte Carlo paths: precomputes whatever tables
/// the strategy needs, then maps status vectors to positions.
class StrategyPicker {
 public:
  StrategyPicker(const StrategySpec& strategy, const CandidatePool& pool,
                 const ModelSpec* model = nullptr, const RankingDistribution* dist = nullptr);

  int pick(const StatusVector& s) const;

 private:
  StrategySpec strategy_;
  int n_ = 0;
  WindowComputation window_;                    // SuperstarAlgo
  std::vector<int> vote_decision_;              // PairwiseVoteAlgo: [s_top][j_pos]
  PolicyTable oracle_;                          // OraclePolicyRef
};

}  // namespace ranksel
