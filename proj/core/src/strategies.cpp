#include "ranksel/strategies.hpp"

#include <algorithm>
#include <cmath>

namespace ranksel {

namespace {

constexpr double kWindowTol = 1e-12;

struct SuperstarParams {
  double v1, v2, p1, p2, g1, g2;
};

SuperstarParams superstar_params(const CandidatePool& pool) {
  if (!pool.is_superstar()) throw std::invalid_argument("strategy: pool is not superstar");
  return {pool.values[0],         pool.values[1],         pool.free_probs[0],
          pool.free_probs[1],     pool.busy_penalties[0], pool.busy_penalties[1]};
}

/// Exact permutation probabilities for the models Alg. 2 supports.
class PermProb {
 public:
  PermProb(const ModelSpec& model, const CandidatePool& pool) : pool_(&pool) {
    if (const auto* pl = std::get_if<PlackettLuce>(&model)) {
      beta_ = pl->beta;
    } else if (const auto* m = std::get_if<MallowsModel>(&model)) {
      table_ = mallows_table(pool, m->phi);
    } else if (const auto* e = std::get_if<ExplicitModel>(&model)) {
      table_ = e->table;
    } else {
      throw std::invalid_argument("pairwise voting needs exact permutation probabilities");
    }
  }

  double operator()(const Permutation& perm) const {
    if (beta_ > 0.0) return plackett_luce_prob(*pool_, beta_, perm);
    return table_.prob(perm);
  }

  /// Full table, for aggregate quantities (built lazily for Plackett-Luce).
  const PermutationTable& table() {
    if (table_.entries.empty()) table_ = plackett_luce_table(*pool_, beta_);
    return table_;
  }

 private:
  const CandidatePool* pool_;
  double beta_ = 0.0;
  PermutationTable table_;
};

/// Pair gain with the convention that G >= 0 votes for position j_pos. The
/// busy branch conditions on P[s|sigma] for the correctly-ordered pair member,
/// the free branch on P[s|sigma-tilde]; both reduce to Alg. 1's thresholds in
/// the superstar setting.
double pair_gain(const CandidatePool& pool, int s_top, int hi, int lo, double p_correct,
                 double p_swapped) {
  const double v_hi = pool.values[static_cast<size_t>(hi)];
  const double v_lo = pool.values[static_cast<size_t>(lo)];
  const double g_hi = pool.busy_penalties[static_cast<size_t>(hi)];
  const double g_lo = pool.busy_penalties[static_cast<size_t>(lo)];
  const double p_hi = pool.free_probs[static_cast<size_t>(hi)];
  const double p_lo = pool.free_probs[static_cast<size_t>(lo)];
  const double r = p_lo * (1.0 - p_hi) / ((1.0 - p_lo) * p_hi);
  if (s_top == 0)
    return r * p_correct * (v_lo - v_hi / g_hi) + p_swapped * (v_hi - v_lo / g_lo);
  return p_correct * (v_lo / g_lo - v_hi) + r * p_swapped * (v_hi / g_hi - v_lo);
}

Permutation reversed_pair_perm(int n, int hi, int lo, int j_pos) {
  Permutation perm(static_cast<size_t>(n), -1);
  perm[0] = hi;
  perm[static_cast<size_t>(j_pos)] = lo;
  int next_id = n - 1;
  for (int pos = 0; pos < n; ++pos) {
    if (perm[static_cast<size_t>(pos)] >= 0) continue;
    while (next_id == hi || next_id == lo) --next_id;
    perm[static_cast<size_t>(pos)] = next_id--;
  }
  return perm;
}

int first_pick(const StatusVector& s, int k, int preferred) {
  for (int pos = 0; pos < k && pos < static_cast<int>(s.size()); ++pos)
    if (s[static_cast<size_t>(pos)] == preferred) return pos;
  return 0;
}

SuperstarDistribution superstar_dist_of(const RankingDistribution& dist,
                                        const CandidatePool& pool) {
  if (const auto* ss = std::get_if<SuperstarDistribution>(&dist)) return *ss;
  return superstar_from_table(std::get<PermutationTable>(dist), pool);
}

}  // namespace

WindowComputation superstar_window(const CandidatePool& pool, const SuperstarDistribution& dist) {
  const SuperstarParams sp = superstar_params(pool);
  if (dist.size() != pool.size())
    throw std::invalid_argument("strategy: distribution length does not match pool");
  WindowComputation window;
  window.ratio_r = (sp.p2 / (1.0 - sp.p2)) / (sp.p1 / (1.0 - sp.p1));
  const double denom = sp.v1 - sp.v2 / sp.g2;
  if (denom <= 0.0) throw degenerate_error("strategy: v1 - v2/gamma2 <= 0");
  window.threshold_R = (sp.v1 / sp.g1 - sp.v2) / denom * window.ratio_r;
  window.direction =
      window.threshold_R <= 1.0 ? Direction::first_free : Direction::first_busy;
  const double threshold = window.direction == Direction::first_free
                               ? 1.0 / window.threshold_R
                               : window.threshold_R;
  window.window_jstar = 1;
  for (int j = 1; j < dist.size(); ++j) {
    const double mass = dist.index_probs[static_cast<size_t>(j)];
    if (mass <= 0.0) break;
    if (dist.index_probs[0] / mass <= threshold + kWindowTol) window.window_jstar = j + 1;
  }
  return window;
}

int superstar_select(const WindowComputation& window, const StatusVector& s) {
  const int preferred = window.direction == Direction::first_free ? 1 : 0;
  return first_pick(s, window.window_jstar, preferred);
}

int superstar_decide(const WindowComputation& window, int s_top, int j_pos) {
  const int preferred = window.direction == Direction::first_free ? 1 : 0;
  if (s_top == preferred) return 0;
  return j_pos < window.window_jstar ? j_pos : 0;
}

ErrorBound theorem3_bound(const CandidatePool& pool, const SuperstarDistribution& dist,
                          int j_pos) {
  const SuperstarParams sp = superstar_params(pool);
  if (j_pos < 1 || j_pos >= dist.size())
    throw std::invalid_argument("theorem3_bound: j_pos out of range");
  const double tail =
      1.0 - dist.index_probs[0] - dist.index_probs[static_cast<size_t>(j_pos)];
  ErrorBound bound;
  bound.kind = BoundKind::theorem3;
  bound.bound_value =
      std::max(0.0, (sp.p2 / sp.p1) * sp.v2 * (1.0 - 1.0 / sp.g2) * tail);
  return bound;
}

VoteLedger pairwise_vote_select(const CandidatePool& pool, const ModelSpec& model, int s_top,
                                int j_pos, VoteMode mode) {
  const int n = pool.size();
  if (j_pos < 1 || j_pos >= n)
    throw std::invalid_argument("pairwise vote: j_pos out of range");
  PermProb prob(model, pool);
  VoteLedger ledger;
  int count_j = 0;
  int count_1 = 0;
  for (int hi = 0; hi < n; ++hi) {
    for (int lo = 0; lo < n; ++lo) {
      if (!(pool.values[static_cast<size_t>(hi)] > pool.values[static_cast<size_t>(lo)]))
        continue;
      const Permutation correct = constructed_pair_perm(n, hi, lo, j_pos);
      Permutation swapped = correct;
      std::swap(swapped[0], swapped[static_cast<size_t>(j_pos)]);
      const double g = pair_gain(pool, s_top, hi, lo, prob(correct), prob(swapped));
      ledger.pair_scores.push_back({hi, lo, g});
      if (g >= 0.0) {
        ledger.sum_for_j += g;
        ++count_j;
      } else {
        ledger.sum_for_1 += -g;
        ++count_1;
      }
    }
  }
  if (ledger.pair_scores.empty()) {
    ledger.decision = 0;
  } else if (mode == VoteMode::magnitude) {
    ledger.decision = ledger.sum_for_j >= ledger.sum_for_1 ? j_pos : 0;
  } else {
    ledger.decision = count_j >= count_1 ? j_pos : 0;
  }
  return ledger;
}

Lemma9Report lemma9_bounds(const CandidatePool& pool, const ModelSpec& model, int j_pos,
                           int decision, const StatusVector& s, VoteMode mode) {
  const int n = pool.size();
  if (static_cast<int>(s.size()) != n)
    throw std::invalid_argument("lemma9: status vector length does not match pool");
  const int s_top = s[0];
  PermProb prob(model, pool);
  const PermutationTable& table = prob.table();

  // C = max_{sigma,rho} P[s|sigma]/P[s|rho], by enumerating assignments.
  double lik_max = 0.0;
  double lik_min = 1.0;
  for (const auto& [perm, mass] : table.entries) {
    double lik = 1.0;
    for (int pos = 0; pos < n; ++pos) {
      const double p = pool.free_probs[static_cast<size_t>(perm[static_cast<size_t>(pos)])];
      lik *= s[static_cast<size_t>(pos)] ? p : 1.0 - p;
    }
    lik_max = std::max(lik_max, lik);
    lik_min = std::min(lik_min, lik);
  }
  const double coeff = lik_max / lik_min;

  const VoteLedger ledger = pairwise_vote_select(pool, model, s_top, j_pos, mode);
  Lemma9Report report;
  report.coefficient_c = coeff;
  const BoundKind kind = decision == 0 ? BoundKind::lemma9_pick_1 : BoundKind::lemma9_pick_j;
  report.proof_version.kind = kind;
  report.theorem_version.kind = kind;

  for (const auto& score : ledger.pair_scores) {
    const double v_hi = pool.values[static_cast<size_t>(score.hi)];
    const double v_lo = pool.values[static_cast<size_t>(score.lo)];
    const double g_hi = pool.busy_penalties[static_cast<size_t>(score.hi)];
    const double g_lo = pool.busy_penalties[static_cast<size_t>(score.lo)];

    // P[I_1j(hi,lo)]: both candidates occupy positions {0, j_pos}.
    double p_pair = 0.0;
    for (const auto& [perm, mass] : table.entries) {
      const int a = perm[0];
      const int b = perm[static_cast<size_t>(j_pos)];
      if ((a == score.hi && b == score.lo) || (a == score.lo && b == score.hi)) p_pair += mass;
    }

    const double gap_pick_j =
        std::max(0.0, s_top == 0 ? v_hi / g_hi - v_lo : v_hi - v_lo / g_lo);
    const double gap_pick_1 =
        std::max(0.0, s_top == 0 ? v_hi - v_lo / g_lo : v_hi / g_hi - v_lo);
    const double gap_plain = std::max(0.0, v_hi - v_lo);

    if (decision != 0) {
      if (score.g < 0.0) {
        report.proof_version.bound_value += coeff * p_pair * gap_pick_j;
        report.theorem_version.bound_value += p_pair * gap_plain;
      }
    } else {
      if (score.g >= 0.0) {
        report.proof_version.bound_value += coeff * p_pair * gap_pick_1;
        report.theorem_version.bound_value += p_pair * gap_plain;
      } else {
        // G is biased toward position 0; re-evaluate at the fully-inverted
        // reference, the most j-favorable probability ratio.
        const Permutation correct = reversed_pair_perm(n, score.hi, score.lo, j_pos);
        Permutation swapped = correct;
        std::swap(swapped[0], swapped[static_cast<size_t>(j_pos)]);
        const double pc = prob(correct);
        const double ps = prob(swapped);
        const double total = pc + ps;
        if (total <= 0.0) continue;
        const double g_ref =
            pair_gain(pool, s_top, score.hi, score.lo, pc / total, ps / total);
        const double term = p_pair * std::max(0.0, g_ref);
        report.proof_version.bound_value += coeff * term;
        report.theorem_version.bound_value += term;
      }
    }
  }
  return report;
}

PolicyTable strategy_as_policy(const StrategySpec& strategy, const CandidatePool& pool,
                               const RankingDistribution& dist, const ModelSpec* model) {
  if (std::holds_alternative<OraclePolicyRef>(strategy)) return oracle_policy(dist, pool);
  const int n = pool.size();
  if (n > kSuperstarCap) throw capacity_error("policy tabulation limited to n <= 12");
  StrategyPicker picker(strategy, pool, model, &dist);
  PolicyTable policy;
  policy.n = n;
  policy.picks.resize(1u << n);
  for (uint32_t mask = 0; mask < (1u << n); ++mask)
    policy.picks[mask] = picker.pick(status_from_mask(mask, n));
  return policy;
}

StrategyPicker::StrategyPicker(const StrategySpec& strategy, const CandidatePool& pool,
                               const ModelSpec* model, const RankingDistribution* dist)
    : strategy_(strategy), n_(pool.size()) {
  if (const auto* kf = std::get_if<KFree>(&strategy_)) {
    if (kf->k < 1 || kf->k > n_) throw std::invalid_argument("k-free: k out of range");
  } else if (const auto* kb = std::get_if<KBusy>(&strategy_)) {
    if (kb->k < 1 || kb->k > n_) throw std::invalid_argument("k-busy: k out of range");
  } else if (std::holds_alternative<SuperstarAlgo>(strategy_)) {
    SuperstarDistribution ss;
    if (dist) {
      ss = superstar_dist_of(*dist, pool);
    } else if (model) {
      ss = superstar_dist_of(derive_distribution(*model, pool), pool);
    } else {
      throw std::invalid_argument("superstar strategy needs a distribution or model");
    }
    window_ = superstar_window(pool, ss);
  } else if (const auto* pv = std::get_if<PairwiseVoteAlgo>(&strategy_)) {
    if (!model) throw std::invalid_argument("pairwise voting strategy needs a model");
    vote_decision_.assign(static_cast<size_t>(2 * n_), 0);
    for (int s_top = 0; s_top < 2; ++s_top)
      for (int j = 1; j < n_; ++j)
        vote_decision_[static_cast<size_t>(s_top * n_ + j)] =
            pairwise_vote_select(pool, *model, s_top, j, pv->mode).decision;
  } else if (std::holds_alternative<OraclePolicyRef>(strategy_)) {
    if (dist) {
      oracle_ = oracle_policy(*dist, pool);
    } else if (model) {
      oracle_ = oracle_policy(derive_distribution(*model, pool), pool);
    } else {
      throw std::invalid_argument("oracle strategy needs a distribution or model");
    }
  }
}

int StrategyPicker::pick(const StatusVector& s) const {
  if (std::holds_alternative<FollowRanking>(strategy_)) return 0;
  if (const auto* kf = std::get_if<KFree>(&strategy_)) return first_pick(s, kf->k, 1);
  if (const auto* kb = std::get_if<KBusy>(&strategy_)) return first_pick(s, kb->k, 0);
  if (std::holds_alternative<SuperstarAlgo>(strategy_)) return superstar_select(window_, s);
  if (std::holds_alternative<PairwiseVoteAlgo>(strategy_)) {
    const int s_top = s[0];
    for (int j = 1; j < n_; ++j)
      if (s[static_cast<size_t>(j)] != s_top)
        return vote_decision_[static_cast<size_t>(s_top * n_ + j)];
    return 0;
  }
  const int pick = oracle_.picks[status_mask(s)];
  return pick == PolicyTable::kUnreachable ? 0 : pick;
}

}  // namespace ranksel
