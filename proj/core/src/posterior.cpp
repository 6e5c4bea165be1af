#include "ranksel/posterior.hpp"

#include <cmath>

namespace ranksel {

namespace {

/// Uniform view over the two distribution shapes. An "outcome" is one cell of
/// the ranking distribution: a full permutation for explicit tables, or the
/// high-value candidate's position for collapsed superstar distributions.
struct SuperstarView {
  const SuperstarDistribution* dist;
  const CandidatePool* pool;

  int n() const { return pool->size(); }
  int outcomes() const { return dist->size(); }
  double prob(int o) const { return dist->index_probs[static_cast<size_t>(o)]; }
  int candidate(int o, int pos) const { return pos == o ? 0 : 1; }
};

struct TableView {
  const PermutationTable* table;
  const CandidatePool* pool;

  int n() const { return pool->size(); }
  int outcomes() const { return static_cast<int>(table->entries.size()); }
  double prob(int o) const { return table->entries[static_cast<size_t>(o)].second; }
  int candidate(int o, int pos) const {
    return table->entries[static_cast<size_t>(o)].first[static_cast<size_t>(pos)];
  }
};

template <typename View>
double status_likelihood(const View& view, int o, const StatusVector& s) {
  double lik = 1.0;
  for (int pos = 0; pos < view.n(); ++pos) {
    const double p = view.pool->free_probs[static_cast<size_t>(view.candidate(o, pos))];
    lik *= s[static_cast<size_t>(pos)] ? p : 1.0 - p;
  }
  return lik;
}

template <typename View>
PosteriorReport report_impl(const View& view, const StatusVector& s) {
  const int n = view.n();
  if (static_cast<int>(s.size()) != n)
    throw std::invalid_argument("status vector length does not match pool");
  PosteriorReport report;
  report.expected_values.assign(static_cast<size_t>(n), 0.0);
  report.expected_utilities.assign(static_cast<size_t>(n), 0.0);
  for (int o = 0; o < view.outcomes(); ++o) {
    const double weight = view.prob(o) * status_likelihood(view, o, s);
    if (weight <= 0.0) continue;
    report.status_prob += weight;
    for (int pos = 0; pos < n; ++pos) {
      const int cand = view.candidate(o, pos);
      const double v = view.pool->values[static_cast<size_t>(cand)];
      report.expected_values[static_cast<size_t>(pos)] += weight * v;
      const double penalty =
          s[static_cast<size_t>(pos)] ? 1.0 : view.pool->busy_penalties[static_cast<size_t>(cand)];
      report.expected_utilities[static_cast<size_t>(pos)] += weight * v / penalty;
    }
  }
  if (report.status_prob <= 0.0)
    throw impossible_status_error("posterior: status vector has zero probability");
  for (int pos = 0; pos < n; ++pos) {
    report.expected_values[static_cast<size_t>(pos)] /= report.status_prob;
    report.expected_utilities[static_cast<size_t>(pos)] /= report.status_prob;
  }
  report.best_index = 0;
  for (int pos = 1; pos < n; ++pos)
    if (report.expected_utilities[static_cast<size_t>(pos)] >
        report.expected_utilities[static_cast<size_t>(report.best_index)])
      report.best_index = pos;
  return report;
}

template <typename View>
PolicyTable policy_impl(const View& view) {
  const int n = view.n();
  PolicyTable policy;
  policy.n = n;
  policy.picks.assign(1u << n, PolicyTable::kUnreachable);
  for (uint32_t mask = 0; mask < (1u << n); ++mask) {
    const StatusVector s = status_from_mask(mask, n);
    try {
      policy.picks[mask] = report_impl(view, s).best_index;
    } catch (const impossible_status_error&) {
      // left as kUnreachable
    }
  }
  return policy;
}

template <typename View>
JointStats evaluate_impl(const PolicyTable& policy, const View& view) {
  const int n = view.n();
  if (policy.n != n) throw std::invalid_argument("policy table size does not match pool");
  JointStats stats;
  for (int o = 0; o < view.outcomes(); ++o) {
    const double p_outcome = view.prob(o);
    if (p_outcome <= 0.0) continue;
    for (uint32_t mask = 0; mask < (1u << n); ++mask) {
      double lik = 1.0;
      for (int pos = 0; pos < n; ++pos) {
        const double p = view.pool->free_probs[static_cast<size_t>(view.candidate(o, pos))];
        lik *= (mask >> pos) & 1u ? p : 1.0 - p;
      }
      const double weight = p_outcome * lik;
      const int pick = policy.picks[mask];
      if (pick == PolicyTable::kUnreachable)
        throw impossible_status_error("policy evaluation: reachable status marked unreachable");
      const int cand = view.candidate(o, pick);
      const bool free = (mask >> pick) & 1u;
      const double v = view.pool->values[static_cast<size_t>(cand)];
      stats.utility +=
          weight * (free ? v : v / view.pool->busy_penalties[static_cast<size_t>(cand)]);
      if (!free) stats.p_picked_busy += weight;
      if (pick == 0) stats.p_top_picked += weight;
    }
  }
  return stats;
}

void check_caps(const RankingDistribution& dist, const CandidatePool& pool) {
  if (std::holds_alternative<SuperstarDistribution>(dist)) {
    if (pool.size() > kSuperstarCap)
      throw capacity_error("superstar posterior limited to n <= 12");
    if (!pool.is_superstar())
      throw std::invalid_argument("superstar distribution over a non-superstar pool");
    if (std::get<SuperstarDistribution>(dist).size() != pool.size())
      throw std::invalid_argument("distribution length does not match pool");
  } else {
    if (pool.size() > kExplicitCap) throw capacity_error("explicit posterior limited to n <= 8");
    if (std::get<PermutationTable>(dist).n() != pool.size())
      throw std::invalid_argument("table permutation length does not match pool");
  }
}

}  // namespace

PosteriorReport posterior_report(const RankingDistribution& dist, const CandidatePool& pool,
                                 const StatusVector& s) {
  check_caps(dist, pool);
  if (const auto* ss = std::get_if<SuperstarDistribution>(&dist))
    return report_impl(SuperstarView{ss, &pool}, s);
  return report_impl(TableView{&std::get<PermutationTable>(dist), &pool}, s);
}

PolicyTable oracle_policy(const RankingDistribution& dist, const CandidatePool& pool) {
  check_caps(dist, pool);
  if (const auto* ss = std::get_if<SuperstarDistribution>(&dist))
    return policy_impl(SuperstarView{ss, &pool});
  return policy_impl(TableView{&std::get<PermutationTable>(dist), &pool});
}

JointStats evaluate_policy(const PolicyTable& policy, const RankingDistribution& dist,
                           const CandidatePool& pool) {
  check_caps(dist, pool);
  if (const auto* ss = std::get_if<SuperstarDistribution>(&dist))
    return evaluate_impl(policy, SuperstarView{ss, &pool});
  return evaluate_impl(policy, TableView{&std::get<PermutationTable>(dist), &pool});
}

double policy_expected_utility(const PolicyTable& policy, const RankingDistribution& dist,
                               const CandidatePool& pool) {
  return evaluate_policy(policy, dist, pool).utility;
}

McEstimate policy_expected_utility_mc(const PolicyTable& policy, const ModelSpec& model,
                                      const CandidatePool& pool, long samples, uint64_t seed) {
  if (samples <= 0) throw std::invalid_argument("mc evaluation: need samples >= 1");
  const int n = pool.size();
  if (policy.n != n) throw std::invalid_argument("policy table size does not match pool");
  Rng rng(seed);
  double sum = 0.0;
  double sum_sq = 0.0;
  std::vector<int> cand_free(static_cast<size_t>(n));
  for (long i = 0; i < samples; ++i) {
    const Permutation perm = sample_ranking(model, pool, rng);
    for (int c = 0; c < n; ++c)
      cand_free[static_cast<size_t>(c)] = rng.bernoulli(pool.free_probs[static_cast<size_t>(c)]);
    uint32_t mask = 0;
    for (int pos = 0; pos < n; ++pos)
      if (cand_free[static_cast<size_t>(perm[static_cast<size_t>(pos)])]) mask |= 1u << pos;
    const int pick = policy.picks[mask];
    const int cand = perm[static_cast<size_t>(pick)];
    const double v = pool.values[static_cast<size_t>(cand)];
    const double payoff = (mask >> pick) & 1u
                              ? v
                              : v / pool.busy_penalties[static_cast<size_t>(cand)];
    sum += payoff;
    sum_sq += payoff * payoff;
  }
  McEstimate est;
  est.estimate = sum / static_cast<double>(samples);
  const double var =
      std::max(0.0, sum_sq / static_cast<double>(samples) - est.estimate * est.estimate);
  est.std_error = std::sqrt(var / static_cast<double>(samples));
  return est;
}

RankingDistribution derive_distribution(const ModelSpec& model, const CandidatePool& pool) {
  if (const auto* pl = std::get_if<PlackettLuce>(&model)) {
    if (pool.is_superstar() && pool.size() <= kSuperstarCap)
      return superstar_index_probs(pool.values[0], pool.values[1], pool.size(), pl->beta);
    return plackett_luce_table(pool, pl->beta);
  }
  if (const auto* m = std::get_if<MallowsModel>(&model)) return mallows_table(pool, m->phi);
  if (const auto* e = std::get_if<ExplicitModel>(&model)) return e->table;
  throw std::invalid_argument("no exact distribution for gaussian rum; use sampling paths");
}

}  // namespace ranksel
