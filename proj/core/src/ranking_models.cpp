#include "ranksel/ranking_models.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ranksel {

namespace {

void require_bijection(const Permutation& perm, int n) {
  if (static_cast<int>(perm.size()) != n)
    throw std::invalid_argument("permutation length does not match pool");
  std::vector<char> seen(static_cast<size_t>(n), 0);
  for (int id : perm) {
    if (id < 0 || id >= n || seen[static_cast<size_t>(id)])
      throw std::invalid_argument("permutation is not a bijection on {0..n-1}");
    seen[static_cast<size_t>(id)] = 1;
  }
}

void require_explicit_cap(int n) {
  if (n > kExplicitCap) throw capacity_error("explicit table requested above n = 8 cap");
}

/// Lexicographic rank of a permutation (Lehmer code).
size_t perm_rank(const Permutation& perm) {
  const int n = static_cast<int>(perm.size());
  size_t rank = 0;
  for (int i = 0; i < n; ++i) {
    int smaller = 0;
    for (int j = i + 1; j < n; ++j)
      if (perm[static_cast<size_t>(j)] < perm[static_cast<size_t>(i)]) ++smaller;
    rank = rank * static_cast<size_t>(n - i) + static_cast<size_t>(smaller);
  }
  return rank;
}

int inversion_count(const Permutation& perm, const std::vector<double>& values) {
  // Discordant pairs relative to the value-descending reference; equal values
  // never count.
  const int n = static_cast<int>(perm.size());
  int count = 0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (values[static_cast<size_t>(perm[static_cast<size_t>(j)])] >
          values[static_cast<size_t>(perm[static_cast<size_t>(i)])])
        ++count;
  return count;
}

Permutation ranking_from_noised(const std::vector<double>& noised) {
  Permutation perm(noised.size());
  std::iota(perm.begin(), perm.end(), 0);
  std::sort(perm.begin(), perm.end(), [&](int a, int b) {
    const double va = noised[static_cast<size_t>(a)];
    const double vb = noised[static_cast<size_t>(b)];
    if (va != vb) return va > vb;
    return a < b;
  });
  return perm;
}

Permutation sample_from_table(const PermutationTable& table, Rng& rng) {
  const double u = rng.uniform();
  double acc = 0.0;
  for (const auto& [perm, prob] : table.entries) {
    acc += prob;
    if (u < acc) return perm;
  }
  return table.entries.back().first;
}

constexpr double kCmpTol = 1e-12;

/// Def.-1 dominance: does `a` sit weakly above `b` in the accuracy order?
bool superstar_dominates(const std::vector<double>& a, const std::vector<double>& b,
                         bool* strict) {
  const int n = static_cast<int>(a.size());
  *strict = false;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (a[static_cast<size_t>(j)] <= 0.0 || b[static_cast<size_t>(j)] <= 0.0)
        throw degenerate_error("accuracy comparison: zero mass inside a prefix");
      const double ra = a[static_cast<size_t>(i)] / a[static_cast<size_t>(j)];
      const double rb = b[static_cast<size_t>(i)] / b[static_cast<size_t>(j)];
      if (ra < rb - kCmpTol) return false;
      if (ra > rb + kCmpTol) *strict = true;
    }
  }
  // Monotonic decrease: once a falls below b, it stays below.
  for (int k = 0; k < n; ++k) {
    if (a[static_cast<size_t>(k)] < b[static_cast<size_t>(k)] - kCmpTol) {
      for (int j = k + 1; j < n; ++j)
        if (a[static_cast<size_t>(j)] >= b[static_cast<size_t>(j)] + kCmpTol) return false;
    }
  }
  return true;
}

double top_k_prob(const PermutationTable& table, int candidate, int k) {
  double total = 0.0;
  for (const auto& [perm, prob] : table.entries) {
    for (int pos = 0; pos < k; ++pos) {
      if (perm[static_cast<size_t>(pos)] == candidate) {
        total += prob;
        break;
      }
    }
  }
  return total;
}

/// Def.-3 dominance of `a` over `b`.
bool beyond_dominates(const PermutationTable& a, const PermutationTable& b,
                      const CandidatePool& pool, bool* strict) {
  const int n = pool.size();
  *strict = false;
  // Clause 1a: inversion ratios at positions (1, j) weakly larger under `a`.
  for (const auto& [perm, pa] : a.entries) {
    for (int jp = 1; jp < n; ++jp) {
      const int hi = perm[0];
      const int lo = perm[static_cast<size_t>(jp)];
      if (!(pool.values[static_cast<size_t>(hi)] > pool.values[static_cast<size_t>(lo)]))
        continue;
      Permutation swapped = perm;
      std::swap(swapped[0], swapped[static_cast<size_t>(jp)]);
      const double pa_sw = a.prob(swapped);
      const double pb = b.prob(perm);
      const double pb_sw = b.prob(swapped);
      if (pa <= 0.0 || pa_sw <= 0.0 || pb <= 0.0 || pb_sw <= 0.0)
        throw degenerate_error("accuracy comparison: zero-mass inversion pair");
      const double ra = pa / pa_sw;
      const double rb = pb / pb_sw;
      if (ra < rb - kCmpTol) return false;
      if (ra > rb + kCmpTol) *strict = true;
    }
  }
  // Clause 1b: within `a`, pushing the inverted low-value candidate further
  // down (constructed pairs) weakly raises the ratio.
  for (int hi = 0; hi < n; ++hi) {
    for (int lo = 0; lo < n; ++lo) {
      if (!(pool.values[static_cast<size_t>(hi)] > pool.values[static_cast<size_t>(lo)]))
        continue;
      double prev = 0.0;
      for (int jp = 1; jp < n; ++jp) {
        Permutation perm = constructed_pair_perm(n, hi, lo, jp);
        Permutation swapped = perm;
        std::swap(swapped[0], swapped[static_cast<size_t>(jp)]);
        const double num = a.prob(perm);
        const double den = a.prob(swapped);
        if (num <= 0.0 || den <= 0.0)
          throw degenerate_error("accuracy comparison: zero-mass inversion pair");
        const double ratio = num / den;
        if (ratio < prev - 1e-9) return false;
        prev = ratio;
      }
    }
  }
  // Clause 2 (majorization): if a high-value candidate loses top-k mass under
  // `a`, every lower-valued candidate must lose it too.
  for (int k = 1; k < n; ++k) {
    for (int i = 0; i < n; ++i) {
      const double ai = top_k_prob(a, i, k);
      const double bi = top_k_prob(b, i, k);
      if (ai >= bi - kCmpTol) continue;
      for (int j = 0; j < n; ++j) {
        if (!(pool.values[static_cast<size_t>(j)] < pool.values[static_cast<size_t>(i)]))
          continue;
        if (top_k_prob(a, j, k) >= top_k_prob(b, j, k) + kCmpTol) return false;
      }
    }
  }
  return true;
}

}  // namespace

void validate_model(const ModelSpec& spec) {
  if (const auto* pl = std::get_if<PlackettLuce>(&spec)) {
    if (!(pl->beta > 0.0)) throw std::invalid_argument("plackett-luce: beta must be positive");
  } else if (const auto* g = std::get_if<GaussianRUM>(&spec)) {
    if (!(g->sigma > 0.0)) throw std::invalid_argument("gaussian rum: sigma must be positive");
  } else if (const auto* m = std::get_if<MallowsModel>(&spec)) {
    if (!(m->phi > 0.0 && m->phi < 1.0))
      throw std::invalid_argument("mallows: phi must lie in (0,1)");
  } else if (const auto* e = std::get_if<ExplicitModel>(&spec)) {
    e->table.validate();
  }
}

std::string strategy_name(const StrategySpec& strategy) {
  if (std::holds_alternative<FollowRanking>(strategy)) return "follow";
  if (const auto* kf = std::get_if<KFree>(&strategy)) return "kfree:" + std::to_string(kf->k);
  if (const auto* kb = std::get_if<KBusy>(&strategy)) return "kbusy:" + std::to_string(kb->k);
  if (std::holds_alternative<SuperstarAlgo>(strategy)) return "superstar";
  if (const auto* pv = std::get_if<PairwiseVoteAlgo>(&strategy))
    return pv->mode == VoteMode::magnitude ? "pairwise:magnitude" : "pairwise:count";
  return "oracle";
}

Permutation constructed_pair_perm(int n, int hi, int lo, int j_pos) {
  Permutation perm(static_cast<size_t>(n), -1);
  perm[0] = hi;
  perm[static_cast<size_t>(j_pos)] = lo;
  int next_id = 0;
  for (int pos = 0; pos < n; ++pos) {
    if (perm[static_cast<size_t>(pos)] >= 0) continue;
    while (next_id == hi || next_id == lo) ++next_id;
    perm[static_cast<size_t>(pos)] = next_id++;
  }
  return perm;
}

std::vector<Permutation> all_permutations(int n) {
  require_explicit_cap(n);
  Permutation perm(static_cast<size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<Permutation> out;
  do {
    out.push_back(perm);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return out;
}

double plackett_luce_prob(const CandidatePool& pool, double beta, const Permutation& perm) {
  const int n = pool.size();
  require_bijection(perm, n);
  if (!(beta > 0.0)) throw std::invalid_argument("plackett-luce: beta must be positive");
  double remaining = 0.0;
  std::vector<double> weight(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    weight[static_cast<size_t>(i)] = std::exp(pool.values[static_cast<size_t>(i)] / beta);
    remaining += weight[static_cast<size_t>(i)];
  }
  double prob = 1.0;
  for (int pos = 0; pos < n; ++pos) {
    const double w = weight[static_cast<size_t>(perm[static_cast<size_t>(pos)])];
    prob *= w / remaining;
    remaining -= w;
  }
  return prob;
}

PermutationTable plackett_luce_table(const CandidatePool& pool, double beta) {
  PermutationTable table;
  for (const Permutation& perm : all_permutations(pool.size()))
    table.entries.emplace_back(perm, plackett_luce_prob(pool, beta, perm));
  return table;
}

SuperstarDistribution superstar_index_probs(double v1, double v2, int n, double beta) {
  if (!(v1 > v2) || v2 < 0.0) throw std::invalid_argument("superstar: need v1 > v2 >= 0");
  if (n < 2) throw std::invalid_argument("superstar: need n >= 2");
  if (!(beta > 0.0)) throw std::invalid_argument("superstar: beta must be positive");
  const double c = std::exp((v1 - v2) / beta);
  SuperstarDistribution dist;
  dist.index_probs.resize(static_cast<size_t>(n));
  if (!std::isfinite(c)) {  // noiseless limit: certainty at the top position
    dist.index_probs[0] = 1.0;
    return dist;
  }
  double prob = c / (c + static_cast<double>(n - 1));
  dist.index_probs[0] = prob;
  for (int i = 1; i < n; ++i) {
    prob /= 1.0 + (c - 1.0) / static_cast<double>(n - i);
    dist.index_probs[static_cast<size_t>(i)] = prob;
  }
  return dist;
}

double superstar_ratio(const SuperstarDistribution& dist, int i, int j) {
  if (!(i >= 0 && i < j && j < dist.size()))
    throw std::invalid_argument("superstar_ratio: need 0 <= i < j < n");
  const double denom = dist.index_probs[static_cast<size_t>(j)];
  if (denom <= 0.0) throw degenerate_error("superstar_ratio: zero mass at index j");
  return dist.index_probs[static_cast<size_t>(i)] / denom;
}

SuperstarDistribution superstar_from_table(const PermutationTable& table,
                                           const CandidatePool& pool) {
  if (!pool.is_superstar()) throw std::invalid_argument("superstar aggregation: pool is not superstar");
  SuperstarDistribution dist;
  dist.index_probs.assign(static_cast<size_t>(pool.size()), 0.0);
  for (const auto& [perm, prob] : table.entries) {
    for (int pos = 0; pos < pool.size(); ++pos) {
      if (perm[static_cast<size_t>(pos)] == 0) {
        dist.index_probs[static_cast<size_t>(pos)] += prob;
        break;
      }
    }
  }
  return dist;
}

Permutation sample_ranking(const ModelSpec& spec, const CandidatePool& pool, Rng& rng) {
  const int n = pool.size();
  if (const auto* pl = std::get_if<PlackettLuce>(&spec)) {
    std::vector<double> noised(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i)
      noised[static_cast<size_t>(i)] = pool.values[static_cast<size_t>(i)] + rng.gumbel(pl->beta);
    return ranking_from_noised(noised);
  }
  if (const auto* g = std::get_if<GaussianRUM>(&spec)) {
    std::vector<double> noised(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i)
      noised[static_cast<size_t>(i)] = pool.values[static_cast<size_t>(i)] + rng.normal(g->sigma);
    return ranking_from_noised(noised);
  }
  if (const auto* m = std::get_if<MallowsModel>(&spec))
    return sample_from_table(mallows_table(pool, m->phi), rng);
  return sample_from_table(std::get<ExplicitModel>(spec).table, rng);
}

Permutation sample_ranking(const ModelSpec& spec, const CandidatePool& pool, uint64_t seed) {
  Rng rng(seed);
  return sample_ranking(spec, pool, rng);
}

PermutationTable mallows_table(const CandidatePool& pool, double phi) {
  if (!(phi > 0.0 && phi < 1.0)) throw std::invalid_argument("mallows: phi must lie in (0,1)");
  PermutationTable table;
  double total = 0.0;
  for (const Permutation& perm : all_permutations(pool.size())) {
    const double mass = std::pow(phi, inversion_count(perm, pool.values));
    table.entries.emplace_back(perm, mass);
    total += mass;
  }
  for (auto& [perm, prob] : table.entries) prob /= total;
  return table;
}

PermutationTable gaussian_rum_table(const CandidatePool& pool, double sigma, long samples,
                                    uint64_t seed) {
  if (samples <= 0) throw std::invalid_argument("gaussian rum table: need samples >= 1");
  const int n = pool.size();
  require_explicit_cap(n);
  std::vector<Permutation> perms = all_permutations(n);
  std::vector<long> counts(perms.size(), 0);
  Rng rng(seed);
  const ModelSpec spec = GaussianRUM{sigma};
  for (long s = 0; s < samples; ++s)
    ++counts[perm_rank(sample_ranking(spec, pool, rng))];
  PermutationTable table;
  table.stderrs.resize(perms.size());
  for (size_t i = 0; i < perms.size(); ++i) {
    const double freq = static_cast<double>(counts[i]) / static_cast<double>(samples);
    table.entries.emplace_back(perms[i], freq);
    table.stderrs[i] = std::sqrt(freq * (1.0 - freq) / static_cast<double>(samples));
  }
  return table;
}

InversionCheck is_inversion_monotone(const PermutationTable& table, const CandidatePool& pool,
                                     double slack) {
  require_explicit_cap(pool.size());
  InversionCheck check;
  const int n = pool.size();
  for (const auto& [perm, prob] : table.entries) {
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        const double vi = pool.values[static_cast<size_t>(perm[static_cast<size_t>(i)])];
        const double vj = pool.values[static_cast<size_t>(perm[static_cast<size_t>(j)])];
        if (!(vi > vj)) continue;
        Permutation swapped = perm;
        std::swap(swapped[static_cast<size_t>(i)], swapped[static_cast<size_t>(j)]);
        const double inverted = table.prob(swapped);
        if (inverted > prob + slack) {
          check.monotone = false;
          check.violations.push_back({perm, i, j, inverted - prob});
        }
      }
    }
  }
  return check;
}

AccuracyOrder compare_accuracy_superstar(const std::vector<double>& a,
                                         const std::vector<double>& b) {
  if (a.size() != b.size())
    throw std::invalid_argument("accuracy comparison: length mismatch");
  bool equal = true;
  for (size_t i = 0; i < a.size(); ++i)
    if (std::abs(a[i] - b[i]) > kCmpTol) equal = false;
  if (equal) return AccuracyOrder::equal;
  bool a_strict = false;
  bool b_strict = false;
  const bool a_dom = superstar_dominates(a, b, &a_strict);
  const bool b_dom = superstar_dominates(b, a, &b_strict);
  if (a_dom && a_strict && !(b_dom && b_strict)) return AccuracyOrder::a_more_accurate;
  if (b_dom && b_strict && !(a_dom && a_strict)) return AccuracyOrder::b_more_accurate;
  return AccuracyOrder::incomparable;
}

AccuracyOrder compare_accuracy_superstar(const SuperstarDistribution& a,
                                         const SuperstarDistribution& b) {
  return compare_accuracy_superstar(a.index_probs, b.index_probs);
}

AccuracyOrder compare_accuracy_beyond(const PermutationTable& a, const PermutationTable& b,
                                      const CandidatePool& pool) {
  require_explicit_cap(pool.size());
  if (a.entries.size() != b.entries.size())
    throw std::invalid_argument("accuracy comparison: table size mismatch");
  bool equal = true;
  for (const auto& [perm, prob] : a.entries)
    if (std::abs(prob - b.prob(perm)) > kCmpTol) equal = false;
  if (equal) return AccuracyOrder::equal;
  bool a_strict = false;
  bool b_strict = false;
  const bool a_dom = beyond_dominates(a, b, pool, &a_strict);
  const bool b_dom = beyond_dominates(b, a, pool, &b_strict);
  if (a_dom && a_strict && !(b_dom && b_strict)) return AccuracyOrder::a_more_accurate;
  if (b_dom && b_strict && !(a_dom && a_strict)) return AccuracyOrder::b_more_accurate;
  return AccuracyOrder::incomparable;
}

std::vector<std::vector<double>> index_coupling(const SuperstarDistribution& more,
                                                const SuperstarDistribution& less) {
  // Def.-1 ordering implies prefix dominance, which is exactly what downward
  // transport needs; zero-mass entries make the full ratio comparison
  // degenerate, so fall back to the prefix check alone in that case.
  try {
    const AccuracyOrder order = compare_accuracy_superstar(more, less);
    if (order != AccuracyOrder::a_more_accurate && order != AccuracyOrder::equal)
      throw std::invalid_argument("index_coupling: inputs are not accuracy-ordered");
  } catch (const degenerate_error&) {
    double more_prefix = 0.0;
    double less_prefix = 0.0;
    for (size_t k = 0; k < more.index_probs.size(); ++k) {
      more_prefix += more.index_probs[k];
      less_prefix += less.index_probs[k];
      if (more_prefix < less_prefix - 1e-9)
        throw std::invalid_argument("index_coupling: inputs are not accuracy-ordered");
    }
  }
  const int n = more.size();
  std::vector<std::vector<double>> t(static_cast<size_t>(n),
                                     std::vector<double>(static_cast<size_t>(n), 0.0));
  // Monotone transport: walk both prefixes in rank order, pushing each unit of
  // the more-accurate index mass to the earliest less-accurate index that can
  // still absorb it. Accuracy ordering guarantees mass only moves downward.
  int j = 0;
  double room = less.index_probs[0];
  for (int i = 0; i < n; ++i) {
    double supply = more.index_probs[static_cast<size_t>(i)];
    if (supply <= 0.0) {
      t[static_cast<size_t>(i)][static_cast<size_t>(i)] = 1.0;
      continue;
    }
    const double row_total = supply;
    while (supply > 1e-15 && j < n) {
      const double moved = std::min(supply, room);
      t[static_cast<size_t>(i)][static_cast<size_t>(j)] += moved / row_total;
      supply -= moved;
      room -= moved;
      if (room <= 1e-15 && j + 1 < n) {
        ++j;
        room = less.index_probs[static_cast<size_t>(j)];
      } else if (room <= 1e-15) {
        break;
      }
    }
    if (supply > 1e-12) t[static_cast<size_t>(i)][static_cast<size_t>(n - 1)] += supply / row_total;
  }
  return t;
}

}  // namespace ranksel
