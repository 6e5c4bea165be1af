#include "ranksel/welfare.hpp"

#include <cmath>
#include <limits>

namespace ranksel {

namespace {

double prefix_prob(const SuperstarDistribution& dist, int k) {
  double total = 0.0;
  for (int i = 0; i < k; ++i) total += dist.index_probs[static_cast<size_t>(i)];
  return total;
}

int window_of(const StrategySpec& strategy, bool* first_free) {
  if (const auto* kf = std::get_if<KFree>(&strategy)) {
    *first_free = true;
    return kf->k;
  }
  if (const auto* kb = std::get_if<KBusy>(&strategy)) {
    *first_free = false;
    return kb->k;
  }
  throw std::invalid_argument("closed forms exist only for k-free/k-busy strategies");
}

}  // namespace

double p_picked_busy_closed(const SuperstarDistribution& dist, double p1, double p2,
                            const StrategySpec& strategy) {
  bool first_free = false;
  const int k = window_of(strategy, &first_free);
  if (k < 1 || k > dist.size()) throw std::invalid_argument("closed form: k out of range");
  const double prefix = prefix_prob(dist, k);
  if (first_free)
    return std::pow(1.0 - p2, k - 1) * (prefix * (p2 - p1) + (1.0 - p2));
  return 1.0 - std::pow(p2, k - 1) * (prefix * (p1 - p2) + p2);
}

double p_top_picked_closed(const SuperstarDistribution& dist, double p1, double p2,
                           const StrategySpec& strategy) {
  bool first_free = false;
  const int k = window_of(strategy, &first_free);
  if (k < 1 || k > dist.size()) throw std::invalid_argument("closed form: k out of range");
  const double prefix = prefix_prob(dist, k);
  const double top = dist.index_probs[0];
  if (first_free)
    return p2 + std::pow(1.0 - p2, k) +
           (p2 - p1) * (std::pow(1.0 - p2, k - 1) * prefix - top);
  return 1.0 - p2 + std::pow(p2, k) + (p2 - p1) * (top - std::pow(p2, k - 1) * prefix);
}

MetricsRecord metrics_exact(const StrategySpec& strategy, const RankingDistribution& dist,
                            const CandidatePool& pool, const ModelSpec* model) {
  const PolicyTable policy = strategy_as_policy(strategy, pool, dist, model);
  const JointStats stats = evaluate_policy(policy, dist, pool);
  const double oracle_utility =
      policy_expected_utility(oracle_policy(dist, pool), dist, pool);
  MetricsRecord record;
  record.p_picked_busy = stats.p_picked_busy;
  record.p_top_picked = stats.p_top_picked;
  record.firm_utility = stats.utility;
  record.regret_vs_oracle = oracle_utility - stats.utility;
  record.exact = true;
  return record;
}

MetricsRecord metrics_mc(const StrategySpec& strategy, const ModelSpec& model,
                         const CandidatePool& pool, long samples, uint64_t seed) {
  if (samples <= 0) throw std::invalid_argument("mc metrics: need samples >= 1");
  const int n = pool.size();
  StrategyPicker picker(strategy, pool, &model, nullptr);
  Rng rng(seed);
  double sum_u = 0.0, sum_u2 = 0.0;
  long busy_hits = 0, top_hits = 0;
  std::vector<int> cand_free(static_cast<size_t>(n));
  StatusVector s(static_cast<size_t>(n));
  for (long i = 0; i < samples; ++i) {
    const Permutation perm = sample_ranking(model, pool, rng);
    for (int c = 0; c < n; ++c)
      cand_free[static_cast<size_t>(c)] = rng.bernoulli(pool.free_probs[static_cast<size_t>(c)]);
    for (int pos = 0; pos < n; ++pos)
      s[static_cast<size_t>(pos)] = cand_free[static_cast<size_t>(perm[static_cast<size_t>(pos)])];
    const int pick = picker.pick(s);
    const int cand = perm[static_cast<size_t>(pick)];
    const double v = pool.values[static_cast<size_t>(cand)];
    const bool free = s[static_cast<size_t>(pick)] != 0;
    const double payoff = free ? v : v / pool.busy_penalties[static_cast<size_t>(cand)];
    sum_u += payoff;
    sum_u2 += payoff * payoff;
    if (!free) ++busy_hits;
    if (pick == 0) ++top_hits;
  }
  const double m = static_cast<double>(samples);
  MetricsRecord record;
  record.exact = false;
  record.firm_utility = sum_u / m;
  record.utility_stderr =
      std::sqrt(std::max(0.0, sum_u2 / m - record.firm_utility * record.firm_utility) / m);
  record.p_picked_busy = static_cast<double>(busy_hits) / m;
  record.p_picked_busy_stderr =
      std::sqrt(record.p_picked_busy * (1.0 - record.p_picked_busy) / m);
  record.p_top_picked = static_cast<double>(top_hits) / m;
  record.p_top_picked_stderr =
      std::sqrt(record.p_top_picked * (1.0 - record.p_top_picked) / m);
  const bool oracle_ok = (pool.is_superstar() && std::holds_alternative<PlackettLuce>(model) &&
                          n <= kSuperstarCap) ||
                         n <= kExplicitCap;
  if (oracle_ok && !std::holds_alternative<GaussianRUM>(model)) {
    const RankingDistribution dist = derive_distribution(model, pool);
    record.regret_vs_oracle =
        policy_expected_utility(oracle_policy(dist, pool), dist, pool) - record.firm_utility;
  } else {
    record.regret_vs_oracle = std::numeric_limits<double>::quiet_NaN();
  }
  return record;
}

DirectionReport accuracy_direction_report(const CandidatePool& pool,
                                          const std::vector<double>& beta_grid,
                                          const std::vector<int>& k_grid) {
  if (!pool.is_superstar())
    throw std::invalid_argument("direction report: pool is not superstar");
  for (size_t i = 0; i + 1 < beta_grid.size(); ++i)
    if (beta_grid[i] <= beta_grid[i + 1])
      throw std::invalid_argument("direction report: beta grid must be descending");
  DirectionReport report;
  report.k_grid = k_grid;
  const double p1 = pool.free_probs[0];
  const double p2 = pool.free_probs[1];
  for (double beta : beta_grid) {
    const SuperstarDistribution dist =
        superstar_index_probs(pool.values[0], pool.values[1], pool.size(), beta);
    DirectionRow row;
    row.beta = beta;
    row.top_prob = dist.index_probs[0];
    const WindowComputation window = superstar_window(pool, dist);
    row.direction = window.direction;
    row.window_jstar = window.window_jstar;
    if (pool.size() <= kSuperstarCap) {
      const RankingDistribution rd = dist;
      row.oracle_utility = policy_expected_utility(oracle_policy(rd, pool), rd, pool);
      row.algo_utility =
          policy_expected_utility(strategy_as_policy(SuperstarAlgo{}, pool, rd), rd, pool);
    }
    for (int k : k_grid) {
      row.kfree_p_busy.push_back(p_picked_busy_closed(dist, p1, p2, KFree{k}));
      row.kbusy_p_busy.push_back(p_picked_busy_closed(dist, p1, p2, KBusy{k}));
      row.kfree_p_top.push_back(p_top_picked_closed(dist, p1, p2, KFree{k}));
      row.kbusy_p_top.push_back(p_top_picked_closed(dist, p1, p2, KBusy{k}));
    }
    report.rows.push_back(std::move(row));
  }
  constexpr double tol = 1e-12;
  for (size_t i = 1; i < report.rows.size(); ++i) {
    const DirectionRow& prev = report.rows[i - 1];
    const DirectionRow& cur = report.rows[i];
    if (cur.oracle_utility < prev.oracle_utility - tol) ++report.oracle_utility_violations;
    for (size_t k = 0; k < k_grid.size(); ++k) {
      if (cur.kfree_p_busy[k] < prev.kfree_p_busy[k] - tol) ++report.kfree_p_busy_violations;
      for (auto tops : {&DirectionRow::kfree_p_top, &DirectionRow::kbusy_p_top}) {
        const double delta = (cur.*tops)[k] - (prev.*tops)[k];
        if (delta > tol) report.p_top_rise = true;
        if (delta < -tol) report.p_top_fall = true;
      }
    }
  }
  return report;
}

}  // namespace ranksel
