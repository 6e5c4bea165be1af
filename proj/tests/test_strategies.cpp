#include <doctest.h>

#include <cmath>

#include "ranksel/strategies.hpp"
#include "test_util.hpp"

using namespace ranksel;

namespace {

CandidatePool star_pool(double gamma) {
  return CandidatePool::superstar(3, 1.0, 0.0, 0.2, 0.5, gamma, gamma);
}

int first_flip(const StatusVector& s) {
  for (size_t pos = 1; pos < s.size(); ++pos)
    if (s[pos] != s[0]) return static_cast<int>(pos);
  return 0;
}

}  // namespace

TEST_CASE("window computation fixtures") {
  const SuperstarDistribution dist = superstar_index_probs(1.0, 0.0, 3, 1.0);

  const WindowComputation busy = superstar_window(star_pool(2.0), dist);
  CHECK(busy.ratio_r == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(busy.threshold_R == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(busy.direction == Direction::first_busy);
  // P1/P2 = 1.859 <= 2 < P1/P3 = 5.053
  CHECK(busy.window_jstar == 2);

  const WindowComputation free_dir = superstar_window(star_pool(8.0), dist);
  CHECK(free_dir.threshold_R == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(free_dir.direction == Direction::first_free);
  CHECK(free_dir.window_jstar == 2);

  const WindowComputation collapsed =
      superstar_window(star_pool(2.0), superstar_index_probs(1.0, 0.0, 3, 1e-3));
  CHECK(collapsed.window_jstar == 1);
}

TEST_CASE("window rejects degenerate penalty parameters") {
  CandidatePool pool;
  pool.values = {1.0, 0.8, 0.8};
  pool.free_probs = {0.2, 0.5, 0.5};
  pool.busy_penalties = {1.0, 0.5, 0.5};  // deliberately out of domain
  SuperstarDistribution dist;
  dist.index_probs = {0.6, 0.2, 0.2};
  CHECK_THROWS_AS(superstar_window(pool, dist), degenerate_error);
}

TEST_CASE("window selection rules") {
  WindowComputation busy;
  busy.direction = Direction::first_busy;
  busy.window_jstar = 2;
  CHECK(superstar_select(busy, {1, 0, 1}) == 1);
  CHECK(superstar_select(busy, {0, 1, 1}) == 0);

  WindowComputation free_dir;
  free_dir.direction = Direction::first_free;
  free_dir.window_jstar = 3;
  CHECK(superstar_select(free_dir, {1, 0, 0, 0}) == 0);

  busy.window_jstar = 3;
  CHECK(superstar_select(busy, {1, 1, 1, 0}) == 0);
}

TEST_CASE("decide agrees with select on first-flip status vectors") {
  Rng rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 3 + static_cast<int>(rng.next() % 4);
    const CandidatePool pool = ranksel::test::random_superstar(rng, n, 0.4);
    const SuperstarDistribution dist =
        superstar_index_probs(pool.values[0], pool.values[1], n, 0.3 + 2.0 * rng.uniform());
    const WindowComputation window = superstar_window(pool, dist);
    for (uint32_t mask = 0; mask < (1u << n); ++mask) {
      const StatusVector s = status_from_mask(mask, n);
      const int j = first_flip(s);
      if (j == 0) {
        CHECK(superstar_select(window, s) == 0);
      } else {
        // Both rules only look at the window prefix, which is flat up to j.
        const int expected = superstar_decide(window, s[0], j);
        const int selected = superstar_select(window, s);
        if (expected == 0)
          CHECK((selected == 0 || selected > j));
        else
          CHECK(selected == expected);
      }
    }
  }
}

TEST_CASE("additive error bound fixtures") {
  CHECK(theorem3_bound(star_pool(2.0), superstar_index_probs(1.0, 0.0, 3, 1.0), 1).bound_value ==
        doctest::Approx(0.0));

  const CandidatePool gamma_one = CandidatePool::superstar(3, 1.0, 0.5, 0.1, 0.4, 1.0, 1.0);
  SuperstarDistribution dist;
  dist.index_probs = {0.6, 0.2, 0.2};
  CHECK(theorem3_bound(gamma_one, dist, 1).bound_value == doctest::Approx(0.0));

  const CandidatePool pool = CandidatePool::superstar(3, 1.0, 0.5, 0.1, 0.4, 2.0, 2.0);
  CHECK(theorem3_bound(pool, dist, 1).bound_value == doctest::Approx(0.2).epsilon(1e-12));
}

TEST_CASE("theorem-3 bound dominates conditional regret on a grid") {
  int checked = 0;
  for (int n : {3, 4, 6}) {
    for (double beta : {0.5, 1.0, 2.0}) {
      for (double gamma : {1.5, 4.0}) {
        for (double v2 : {0.0, 0.3}) {
          if (v2 * gamma >= 1.0) continue;  // stay inside the v1/gamma > v2 domain
          const CandidatePool pool = CandidatePool::superstar(n, 1.0, v2, 0.2, 0.5, gamma, gamma);
          const SuperstarDistribution dist = superstar_index_probs(1.0, v2, n, beta);
          const RankingDistribution rd = dist;
          const WindowComputation window = superstar_window(pool, dist);
          for (uint32_t mask = 0; mask < (1u << n); ++mask) {
            const StatusVector s = status_from_mask(mask, n);
            const PosteriorReport report = posterior_report(rd, pool, s);
            const int pick = superstar_select(window, s);
            const double regret =
                report.expected_utilities[static_cast<size_t>(report.best_index)] -
                report.expected_utilities[static_cast<size_t>(pick)];
            const int j = first_flip(s);
            const double bound =
                j == 0 ? 0.0 : theorem3_bound(pool, dist, j).bound_value;
            CHECK(regret <= bound + 1e-9);
            ++checked;
          }
        }
      }
    }
  }
  CHECK(checked > 500);
}

TEST_CASE("zero regret whenever the low tier is worthless") {
  Rng rng(13);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 3 + static_cast<int>(rng.next() % 4);
    const CandidatePool pool = ranksel::test::random_superstar(rng, n);
    const SuperstarDistribution dist =
        superstar_index_probs(pool.values[0], 0.0, n, 0.3 + 2.7 * rng.uniform());
    const RankingDistribution rd = dist;
    const double oracle_u = policy_expected_utility(oracle_policy(rd, pool), rd, pool);
    const double algo_u =
        policy_expected_utility(strategy_as_policy(SuperstarAlgo{}, pool, rd), rd, pool);
    CHECK(algo_u == doctest::Approx(oracle_u).epsilon(1e-9));
  }
}

TEST_CASE("pairwise voting ledger on the three-value fixture") {
  CandidatePool pool;
  pool.values = {1.0, 0.5, 0.0};
  pool.free_probs = {0.1, 0.3, 0.5};
  pool.busy_penalties = {2.0, 2.0, 2.0};
  const ModelSpec model = PlackettLuce{1.0};

  const VoteLedger ledger = pairwise_vote_select(pool, model, /*s_top=*/0, /*j_pos=*/1,
                                                 VoteMode::magnitude);
  REQUIRE(ledger.pair_scores.size() == 3);
  CHECK(ledger.pair_scores[0].g == doctest::Approx(0.16843).epsilon(1e-4));
  CHECK(ledger.pair_scores[1].g == doctest::Approx(-0.74451).epsilon(1e-4));
  CHECK(ledger.pair_scores[2].g == doctest::Approx(-0.013025).epsilon(1e-3));
  CHECK(ledger.sum_for_j == doctest::Approx(0.16843).epsilon(1e-4));
  CHECK(ledger.sum_for_1 == doctest::Approx(0.74451 + 0.013025).epsilon(1e-4));
  // One positive vote against two negatives: keep the top pick either way.
  CHECK(ledger.decision == 0);
  CHECK(pairwise_vote_select(pool, model, 0, 1, VoteMode::count).decision == 0);
}

TEST_CASE("single-pair vote follows the sign of its gain") {
  CandidatePool pool;
  pool.values = {1.0, 0.0};
  pool.free_probs = {0.45, 0.5};
  pool.busy_penalties = {10.0, 1.0};
  const ModelSpec model = PlackettLuce{1.0};
  const VoteLedger for_j = pairwise_vote_select(pool, model, 0, 1, VoteMode::magnitude);
  REQUIRE(for_j.pair_scores.size() == 1);
  CHECK(for_j.pair_scores[0].g > 0.0);
  CHECK(for_j.decision == 1);

  pool.busy_penalties = {1.0, 1.0};
  const VoteLedger for_1 = pairwise_vote_select(pool, model, 0, 1, VoteMode::magnitude);
  CHECK(for_1.pair_scores[0].g < 0.0);
  CHECK(for_1.decision == 0);
}

TEST_CASE("voting reduces to the window rule on superstar pools") {
  Rng rng(23);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 3 + static_cast<int>(rng.next() % 4);
    const CandidatePool pool = ranksel::test::random_superstar(rng, n, 0.4);
    const double beta = 0.3 + 2.7 * rng.uniform();
    const ModelSpec model = PlackettLuce{beta};
    const SuperstarDistribution dist =
        superstar_index_probs(pool.values[0], pool.values[1], n, beta);
    const WindowComputation window = superstar_window(pool, dist);
    for (int s_top = 0; s_top < 2; ++s_top) {
      for (int j = 1; j < n; ++j) {
        const int expected = superstar_decide(window, s_top, j);
        for (VoteMode mode : {VoteMode::magnitude, VoteMode::count}) {
          CHECK(pairwise_vote_select(pool, model, s_top, j, mode).decision == expected);
        }
      }
    }
  }
}

TEST_CASE("window shrinks with accuracy") {
  for (int n : {3, 5, 8}) {
    const CandidatePool pool = CandidatePool::superstar(n, 1.0, 0.0, 0.2, 0.5, 2.0, 2.0);
    int prev = n + 1;
    double beta = 3.0;
    for (int step = 0; step < 10; ++step) {
      const WindowComputation window =
          superstar_window(pool, superstar_index_probs(1.0, 0.0, n, beta));
      CHECK(window.window_jstar <= prev);
      prev = window.window_jstar;
      beta *= 0.7;
    }
  }
}

TEST_CASE("voting is a prefix rule in j and direction-exclusive") {
  Rng rng(37);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 3 + static_cast<int>(rng.next() % 3);
    const CandidatePool pool = ranksel::test::random_pool(rng, n);
    const ModelSpec model = PlackettLuce{0.3 + 2.7 * rng.uniform()};
    bool busy_query_extends = false;
    bool free_query_extends = false;
    for (int s_top = 0; s_top < 2; ++s_top) {
      int max_taken = 0;
      bool gap = false;
      for (int j = 1; j < n; ++j) {
        const int decision =
            pairwise_vote_select(pool, model, s_top, j, VoteMode::magnitude).decision;
        if (decision == j) {
          CHECK_FALSE(gap);  // once the rule declines a j, larger j stay declined
          max_taken = j;
        } else {
          gap = true;
        }
      }
      if (max_taken > 0) (s_top == 0 ? busy_query_extends : free_query_extends) = true;
    }
    CHECK_FALSE((busy_query_extends && free_query_extends));
  }
}

TEST_CASE("lemma-9 bounds dominate realized conditional regret") {
  Rng rng(47);
  int bound_checks = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 4;
    const CandidatePool pool = ranksel::test::random_pool(rng, n);
    const double beta = 0.3 + 2.7 * rng.uniform();
    const ModelSpec model = PlackettLuce{beta};
    const PermutationTable table = plackett_luce_table(pool, beta);
    const RankingDistribution rd = table;
    for (uint32_t mask = 1; mask + 1 < (1u << n); ++mask) {
      const StatusVector s = status_from_mask(mask, n);
      const int j = first_flip(s);
      if (j == 0) continue;
      const int decision =
          pairwise_vote_select(pool, model, s[0], j, VoteMode::magnitude).decision;
      const PosteriorReport report = posterior_report(rd, pool, s);
      const double regret =
          report.expected_utilities[static_cast<size_t>(report.best_index)] -
          report.expected_utilities[static_cast<size_t>(decision)];
      const Lemma9Report bounds = lemma9_bounds(pool, model, j, decision, s, VoteMode::magnitude);
      CHECK(regret <= bounds.proof_version.bound_value + 1e-9);
      CHECK(bounds.proof_version.bound_value >= 0.0);
      CHECK(bounds.theorem_version.bound_value >= 0.0);
      ++bound_checks;
    }
  }
  CHECK(bound_checks >= 200);
}

TEST_CASE("lemma-9 consistency cases") {
  // Superstar with worthless low tier: following the vote has zero regret,
  // and the bounds stay finite and nonnegative.
  const CandidatePool star = CandidatePool::superstar(3, 1.0, 0.0, 0.2, 0.5, 2.0, 2.0);
  const ModelSpec model = PlackettLuce{1.0};
  const int decision = pairwise_vote_select(star, model, 0, 1, VoteMode::magnitude).decision;
  const Lemma9Report report =
      lemma9_bounds(star, model, 1, decision, {0, 1, 1}, VoteMode::magnitude);
  CHECK(report.coefficient_c >= 1.0);
  CHECK(report.proof_version.bound_value >= report.theorem_version.bound_value - 1e-12);

  // Unanimous vote followed: the opposing-set contribution vanishes.
  CandidatePool pool;
  pool.values = {1.0, 0.0};
  pool.free_probs = {0.45, 0.5};
  pool.busy_penalties = {10.0, 1.0};
  const VoteLedger ledger = pairwise_vote_select(pool, model, 0, 1, VoteMode::magnitude);
  REQUIRE(ledger.decision == 1);
  const Lemma9Report unanimous =
      lemma9_bounds(pool, model, 1, ledger.decision, {0, 1}, VoteMode::magnitude);
  CHECK(unanimous.proof_version.bound_value == doctest::Approx(0.0));
}

TEST_CASE("strategies materialize as policy tables") {
  const CandidatePool pool = star_pool(2.0);
  const SuperstarDistribution dist = superstar_index_probs(1.0, 0.0, 3, 1.0);
  const RankingDistribution rd = dist;

  const PolicyTable follow = strategy_as_policy(FollowRanking{}, pool, rd);
  const PolicyTable kfree1 = strategy_as_policy(KFree{1}, pool, rd);
  for (uint32_t mask = 0; mask < 8; ++mask) {
    CHECK(follow.picks[mask] == 0);
    CHECK(kfree1.picks[mask] == follow.picks[mask]);
  }

  const WindowComputation window = superstar_window(pool, dist);
  const PolicyTable algo = strategy_as_policy(SuperstarAlgo{}, pool, rd);
  for (uint32_t mask = 0; mask < 8; ++mask)
    CHECK(algo.picks[mask] == superstar_select(window, status_from_mask(mask, 3)));
}

TEST_CASE("strategy picker matches the materialized tables") {
  Rng rng(59);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 3 + static_cast<int>(rng.next() % 3);
    const CandidatePool pool = ranksel::test::random_pool(rng, n);
    const double beta = 0.3 + 2.7 * rng.uniform();
    const ModelSpec model = PlackettLuce{beta};
    const RankingDistribution rd = plackett_luce_table(pool, beta);
    const std::vector<StrategySpec> strategies = {
        FollowRanking{}, KFree{2}, KBusy{2}, PairwiseVoteAlgo{VoteMode::magnitude},
        OraclePolicyRef{}};
    for (const StrategySpec& strategy : strategies) {
      const PolicyTable policy = strategy_as_policy(strategy, pool, rd, &model);
      StrategyPicker picker(strategy, pool, &model, &rd);
      for (uint32_t mask = 0; mask < (1u << n); ++mask)
        CHECK(picker.pick(status_from_mask(mask, n)) == policy.picks[mask]);
    }
  }
}
