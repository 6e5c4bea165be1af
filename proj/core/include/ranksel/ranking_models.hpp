#pragma once

#include <cstdint>
#include <vector>

#include "ranksel/rng.hpp"
#include "ranksel/types.hpp"

namespace ranksel {

/// Explicit-table enumeration cap (8! = 40320 cells).
inline constexpr int kExplicitCap = 8;
/// Superstar posterior/tabulation cap (n cells x 2^n status vectors).
inline constexpr int kSuperstarCap = 12;

/// Sequential-choice probability of observing `perm` under Gumbel noise:
/// prod_j exp(v_{perm_j}/beta) / sum_{l>=j} exp(v_{perm_l}/beta).
double plackett_luce_prob(const CandidatePool& pool, double beta, const Permutation& perm);

/// Exact table over all n! permutations (n <= kExplicitCap).
PermutationTable plackett_luce_table(const CandidatePool& pool, double beta);

/// Closed-form P[sigma^i] for the superstar setting (Prop. 1 shape):
/// P[sigma^1] = c/(c+n-1), c = exp((v1-v2)/beta), and each subsequent index
/// divides by 1 + (c-1)/(n-k).
SuperstarDistribution superstar_index_probs(double v1, double v2, int n, double beta);

/// P[sigma^i]/P[sigma^j] for 0-based positions i < j.
double superstar_ratio(const SuperstarDistribution& dist, int i, int j);

/// Collapses a full table to the high-value candidate's index distribution.
SuperstarDistribution superstar_from_table(const PermutationTable& table,
                                           const CandidatePool& pool);

Permutation sample_ranking(const ModelSpec& spec, const CandidatePool& pool, Rng& rng);
Permutation sample_ranking(const ModelSpec& spec, const CandidatePool& pool, uint64_t seed);

/// P[sigma] proportional to phi^K(sigma) with K = number of value-discordant
/// pairs relative to the value-descending reference (ties contribute zero).
PermutationTable mallows_table(const CandidatePool& pool, double phi);

/// Empirical frequency table from iid Normal(0, sigma) noise draws, with
/// per-cell binomial standard errors.
PermutationTable gaussian_rum_table(const CandidatePool& pool, double sigma, long samples,
                                    uint64_t seed);

struct InversionViolation {
  Permutation perm;   // the correctly-ordered permutation of the pair
  int i = 0;          // swapped positions
  int j = 0;
  double deficit = 0.0;  // P[swapped] - P[perm]
};

struct InversionCheck {
  bool monotone = true;
  std::vector<InversionViolation> violations;
};

/// Def.-2 check: swapping any correctly-ordered value pair never increases
/// probability (up to `slack` for empirical tables).
InversionCheck is_inversion_monotone(const PermutationTable& table, const CandidatePool& pool,
                                     double slack);

enum class AccuracyOrder { a_more_accurate, b_more_accurate, incomparable, equal };

/// Def.-1 partial order on superstar index distributions.
AccuracyOrder compare_accuracy_superstar(const std::vector<double>& a,
                                         const std::vector<double>& b);
AccuracyOrder compare_accuracy_superstar(const SuperstarDistribution& a,
                                         const SuperstarDistribution& b);

/// Def.-3 partial order on full permutation distributions.
AccuracyOrder compare_accuracy_beyond(const PermutationTable& a, const PermutationTable& b,
                                      const CandidatePool& pool);

/// Row-stochastic T with sum_i more[i] * T[i][j] = less[j]: couples the
/// high-value index under the more accurate distribution to the less accurate
/// one, moving mass only downward in rank.
std::vector<std::vector<double>> index_coupling(const SuperstarDistribution& more,
                                                const SuperstarDistribution& less);

/// All n! permutations of {0..n-1} in lexicographic order (n <= kExplicitCap).
std::vector<Permutation> all_permutations(int n);

/// Alg.-2-style constructed permutation: candidate `hi` at position 0,
/// candidate `lo` at position j_pos, everyone else in correct (id) order.
Permutation constructed_pair_perm(int n, int hi, int lo, int j_pos);

}  // namespace ranksel
