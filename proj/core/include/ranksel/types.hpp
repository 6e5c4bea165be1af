#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace ranksel {

/// Ranked positions, candidate ids, and dense indices are 0-based throughout.
/// perm[pos] = candidate id occupying ranked position pos.
using Permutation = std::vector<int>;

/// One bit per ranked position: 1 = free, 0 = busy.
using StatusVector = std::vector<int>;

struct capacity_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct impossible_status_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct degenerate_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Candidate values v, free probabilities p, busy penalties gamma.
/// Values are sorted nonincreasing; higher-valued candidates may not be more
/// likely to be free (p nondecreasing along the value order).
struct CandidatePool {
  std::vector<double> values;
  std::vector<double> free_probs;
  std::vector<double> busy_penalties;

  int size() const { return static_cast<int>(values.size()); }

  bool is_superstar() const {
    const int n = size();
    if (n < 2) return false;
    if (!(values[0] > values[1])) return false;
    for (int i = 2; i < n; ++i) {
      if (values[i] != values[1] || free_probs[i] != free_probs[1]) return false;
    }
    return true;
  }

  void validate() const {
    const int n = size();
    if (n < 2) throw std::invalid_argument("pool: need at least 2 candidates");
    if (free_probs.size() != values.size() || busy_penalties.size() != values.size())
      throw std::invalid_argument("pool: sequence lengths differ");
    for (int i = 0; i < n; ++i) {
      if (values[i] < 0.0) throw std::invalid_argument("pool: negative value");
      if (!(free_probs[i] > 0.0 && free_probs[i] < 1.0))
        throw std::invalid_argument("pool: free_prob outside (0,1)");
      if (busy_penalties[i] < 1.0) throw std::invalid_argument("pool: busy penalty < 1");
    }
    for (int i = 0; i + 1 < n; ++i) {
      if (values[i] < values[i + 1]) throw std::invalid_argument("pool: values not nonincreasing");
      if (free_probs[i] > free_probs[i + 1] + 1e-15)
        throw std::invalid_argument("pool: free_probs decrease along the value order");
      if (values[i] == values[i + 1] && free_probs[i] != free_probs[i + 1])
        throw std::invalid_argument("pool: equal values need equal free_probs");
    }
  }

  static CandidatePool superstar(int n, double v1, double v2, double p1, double p2,
                                 double gamma1, double gamma2) {
    CandidatePool pool;
    pool.values.assign(static_cast<size_t>(n), v2);
    pool.free_probs.assign(static_cast<size_t>(n), p2);
    pool.busy_penalties.assign(static_cast<size_t>(n), gamma2);
    pool.values[0] = v1;
    pool.free_probs[0] = p1;
    pool.busy_penalties[0] = gamma1;
    pool.validate();
    return pool;
  }
};

/// P[sigma^i]: probability mass of the high-value candidate sitting at ranked
/// position i (superstar aggregation of a full permutation distribution).
struct SuperstarDistribution {
  std::vector<double> index_probs;

  int size() const { return static_cast<int>(index_probs.size()); }

  void validate() const {
    double sum = 0.0;
    for (size_t i = 0; i < index_probs.size(); ++i) {
      if (index_probs[i] < 0.0) throw std::invalid_argument("superstar dist: negative mass");
      if (i > 0 && index_probs[i] > index_probs[i - 1] + 1e-12)
        throw std::invalid_argument("superstar dist: not nonincreasing");
      sum += index_probs[i];
    }
    if (std::abs(sum - 1.0) > 1e-9) throw std::invalid_argument("superstar dist: not normalized");
  }
};

/// Explicit distribution over permutations of candidate ids. Entries are kept
/// sorted lexicographically by permutation so iteration order is stable.
/// Empirical tables carry a per-cell standard error.
struct PermutationTable {
  std::vector<std::pair<Permutation, double>> entries;
  std::vector<double> stderrs;  // empty for exact tables

  int n() const { return entries.empty() ? 0 : static_cast<int>(entries.front().first.size()); }

  double prob(const Permutation& perm) const {
    auto it = std::lower_bound(entries.begin(), entries.end(), perm,
                               [](const auto& e, const Permutation& p) { return e.first < p; });
    if (it == entries.end() || it->first != perm) return 0.0;
    return it->second;
  }

  double max_stderr() const {
    double m = 0.0;
    for (double s : stderrs) m = std::max(m, s);
    return m;
  }

  void sort_entries() {
    std::sort(entries.begin(), entries.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
  }

  void validate() const {
    double sum = 0.0;
    const int size = n();
    for (const auto& [perm, prob] : entries) {
      if (static_cast<int>(perm.size()) != size)
        throw std::invalid_argument("permutation table: ragged permutation");
      Permutation sorted = perm;
      std::sort(sorted.begin(), sorted.end());
      for (int i = 0; i < size; ++i)
        if (sorted[i] != i) throw std::invalid_argument("permutation table: not a bijection");
      if (prob < -1e-15) throw std::invalid_argument("permutation table: negative mass");
      sum += prob;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw std::invalid_argument("permutation table: not normalized");
  }
};

/// Either a collapsed superstar index distribution or a full table.
using RankingDistribution = std::variant<SuperstarDistribution, PermutationTable>;

struct PlackettLuce {
  double beta;
};
struct GaussianRUM {
  double sigma;
};
struct MallowsModel {
  double phi;
};
struct ExplicitModel {
  PermutationTable table;
};

using ModelSpec = std::variant<PlackettLuce, GaussianRUM, MallowsModel, ExplicitModel>;

void validate_model(const ModelSpec& spec);

enum class VoteMode { magnitude, count };

struct FollowRanking {};
struct KFree {
  int k;
};
struct KBusy {
  int k;
};
struct SuperstarAlgo {};
struct PairwiseVoteAlgo {
  VoteMode mode = VoteMode::magnitude;
};
struct OraclePolicyRef {};

using StrategySpec =
    std::variant<FollowRanking, KFree, KBusy, SuperstarAlgo, PairwiseVoteAlgo, OraclePolicyRef>;

std::string strategy_name(const StrategySpec& strategy);

/// Status-vector -> ranked-position table. Index into picks with the status
/// mask (bit i = status of position i). kUnreachable marks P[s] = 0 vectors.
struct PolicyTable {
  static constexpr int kUnreachable = -1;
  int n = 0;
  std::vector<int> picks;
};

inline uint32_t status_mask(const StatusVector& s) {
  uint32_t mask = 0;
  for (size_t i = 0; i < s.size(); ++i)
    if (s[i]) mask |= (1u << i);
  return mask;
}

inline StatusVector status_from_mask(uint32_t mask, int n) {
  StatusVector s(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) s[static_cast<size_t>(i)] = (mask >> i) & 1u;
  return s;
}

}  // namespace ranksel
