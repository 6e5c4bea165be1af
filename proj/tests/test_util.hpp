#pragma once

#include <algorithm>
#include <vector>

#include "ranksel/rng.hpp"
#include "ranksel/types.hpp"

namespace ranksel::test {

/// Random pool with strictly decreasing values, nondecreasing free
/// probabilities and a shared busy penalty.
inline CandidatePool random_pool(Rng& rng, int n, double gamma_max = 8.0) {
  CandidatePool pool;
  double v = 1.0 + rng.uniform();
  double p = 0.05 + 0.4 * rng.uniform();
  const double gamma = 1.0 + (gamma_max - 1.0) * rng.uniform();
  for (int i = 0; i < n; ++i) {
    pool.values.push_back(v);
    pool.free_probs.push_back(std::min(p, 0.95));
    pool.busy_penalties.push_back(gamma);
    v -= 0.05 + rng.uniform() * (v / (n + 1));
    p += rng.uniform() * (0.9 - p) / n;
  }
  if (pool.values.back() < 0.0) {
    const double shift = -pool.values.back();
    for (double& value : pool.values) value += shift;
  }
  pool.validate();
  return pool;
}

/// Random superstar pool; v2 = 0 unless v2_max > 0.
inline CandidatePool random_superstar(Rng& rng, int n, double v2_max = 0.0,
                                      double gamma_max = 8.0) {
  const double v1 = 0.5 + rng.uniform();
  const double gamma1 = 1.0 + (gamma_max - 1.0) * rng.uniform();
  const double gamma2 = 1.0 + (gamma_max - 1.0) * rng.uniform();
  // Keep v1/gamma1 > v2 (and hence v1 - v2/gamma2 > 0): Alg.-1's domain.
  const double v2 = v2_max > 0.0 ? rng.uniform() * std::min(v2_max, 0.9 * v1 / gamma1) : 0.0;
  const double p1 = 0.05 + 0.5 * rng.uniform();
  const double p2 = p1 + (0.95 - p1) * rng.uniform();
  return CandidatePool::superstar(n, v1, v2, p1, p2, gamma1, gamma2);
}

}  // namespace ranksel::test
