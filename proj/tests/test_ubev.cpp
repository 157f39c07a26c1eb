#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "test_support.hpp"
#include "upac/agent.hpp"
#include "upac/confidence.hpp"
#include "upac/envgen.hpp"
#include "upac/ubev.hpp"

using namespace upac;
using namespace upac::testing;

namespace {

// Empirical MDP from counters; unvisited rows fall back to uniform, zero reward.
TabularMDP empirical_mdp(const VisitCounters& c) {
  const std::size_t S = c.num_states(), A = c.num_actions(), H = c.horizon();
  TabularMDP mdp(S, A, H);
  for (std::size_t s = 0; s < S; ++s)
    for (std::size_t a = 0; a < A; ++a)
      for (std::size_t t = 0; t < H; ++t) {
        const auto n = c.n(s, a, t);
        if (n == 0) continue;
        std::vector<double> row(S);
        for (std::size_t sn = 0; sn < S; ++sn)
          row[sn] = static_cast<double>(c.m(sn, s, a, t)) / static_cast<double>(n);
        mdp.set_transition(s, a, t, row);
        mdp.set_reward(s, a, t, {RewardModel::Kind::Deterministic, c.l(s, a, t) / static_cast<double>(n)});
      }
  return mdp;
}

// Backward induction where every (s,a,t) is an explicit LP over the
// confidence set, solved by vertex enumeration.
ValueFunction lp_plan(const VisitCounters& c, const WidthFn& width) {
  const std::size_t S = c.num_states(), A = c.num_actions(), H = c.horizon();
  ValueFunction v(S, H);
  for (std::size_t t = H; t-- > 0;) {
    std::vector<double> next(v.row(t + 1).begin(), v.row(t + 1).end());
    for (std::size_t s = 0; s < S; ++s) {
      double best = -std::numeric_limits<double>::infinity();
      for (std::size_t a = 0; a < A; ++a) {
        const auto n = c.n(s, a, t);
        const double phi = width(n);
        double r_hat = 0.0, v_hat = 0.0;
        if (n > 0) {
          r_hat = c.l(s, a, t) / static_cast<double>(n);
          for (std::size_t sn = 0; sn < S; ++sn)
            v_hat += static_cast<double>(c.m(sn, s, a, t)) * next[sn];
          v_hat /= static_cast<double>(n);
        }
        const double steps_after = static_cast<double>(H - 1 - t);
        const double b = steps_after == 0.0 ? 0.0 : steps_after * phi;
        const double value =
            lp_max_interval(r_hat, phi) + lp_max_simplex_slab(next, v_hat - b, v_hat + b);
        best = std::max(best, value);
      }
      v(t, s) = best;
    }
  }
  return v;
}

}  // namespace

TEST_CASE("zero counters give full optimism") {
  for (std::size_t H : {1, 2, 5, 10}) {
    VisitCounters c(4, 3, H);
    const auto result = plan(c, 0.1);
    for (std::size_t t = 0; t <= H; ++t)
      for (std::size_t s = 0; s < 4; ++s)
        CHECK(result.optimistic_values(t, s) == static_cast<double>(H - t));
    for (std::size_t t = 0; t < H; ++t)
      for (std::size_t s = 0; s < 4; ++s) CHECK(result.policy.action(s, t) == 0);
  }
}

TEST_CASE("zero width reduces to planning on the empirical MDP") {
  std::mt19937_64 gen(5);
  for (int trial = 0; trial < 50; ++trial) {
    const auto c = random_counters(3, 2, 4, 40, 1, gen);
    const auto result = plan_optimistic(c, [](std::uint64_t) { return 0.0; });
    const auto exact = optimal_values(empirical_mdp(c));
    for (std::size_t t = 0; t <= 4; ++t)
      for (std::size_t s = 0; s < 3; ++s)
        CHECK(result.optimistic_values(t, s) == doctest::Approx(exact.values(t, s)).epsilon(1e-12));
  }
}

TEST_CASE("planner matches the explicit LP over the confidence set") {
  std::mt19937_64 gen(6);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t S = 1 + trial % 3, A = 1 + trial % 2, H = 1 + trial % 3;
    const auto c = random_counters(S, A, H, 1 + trial * 7 % 60, 0, gen);
    const WidthFn width = [=](std::uint64_t n) { return ubev_width(n, S, A, H, 0.1); };
    const auto fast = plan_optimistic(c, width);
    const auto slow = lp_plan(c, width);
    for (std::size_t t = 0; t <= H; ++t)
      for (std::size_t s = 0; s < S; ++s)
        CHECK(std::abs(fast.optimistic_values(t, s) - slow(t, s)) <= 1e-9);
  }
}

TEST_CASE("optimistic values stay within the trivial range") {
  std::mt19937_64 gen(7);
  for (int trial = 0; trial < 50; ++trial) {
    const auto c = random_counters(4, 3, 6, 200, 0, gen);
    const auto result = plan(c, 0.1);
    for (std::size_t t = 0; t <= 6; ++t)
      for (std::size_t s = 0; s < 4; ++s) {
        CHECK(result.optimistic_values(t, s) >= 0.0);
        CHECK(result.optimistic_values(t, s) <= 6.0 - static_cast<double>(t) + 1e-12);
      }
    for (std::size_t t = 0; t < 6; ++t)
      for (std::size_t s = 0; s < 4; ++s)
        CHECK(result.q_value(t, s, result.policy.action(s, t)) == result.optimistic_values(t, s));
  }
}

TEST_CASE("update on a single trajectory") {
  VisitCounters c(3, 2, 3);
  const Trajectory traj{{0, 1, 0, 0.5, 2}, {1, 2, 1, 1.0, 2}, {2, 2, 1, 0.0, 0}};
  update(c, traj);
  CHECK(c.episodes() == 1);
  CHECK(c.n(1, 0, 0) == 1);
  CHECK(c.m(2, 1, 0, 0) == 1);
  CHECK(c.l(1, 0, 0) == 0.5);
  CHECK(c.n(2, 1, 1) == 1);
  CHECK(c.l(2, 1, 1) == 1.0);
  CHECK(c.m(0, 2, 1, 2) == 1);
  CHECK(c.n(0, 0, 0) == 0);
  CHECK_NOTHROW(c.check_consistent());
}

TEST_CASE("random updates preserve invariants and match a replay") {
  std::mt19937_64 gen(8);
  const auto mdp = random_test_mdp(4, 3, 5, gen);
  Rng rng(9);
  VisitCounters c(4, 3, 5);
  std::vector<double> l_replay(4 * 3 * 5, 0.0);
  std::vector<std::uint64_t> n_replay(4 * 3 * 5, 0);
  for (int k = 0; k < 1000; ++k) {
    const auto traj = sample_episode(mdp, random_test_policy(4, 3, 5, gen), rng);
    update(c, traj);
    for (const auto& step : traj) {
      const std::size_t i = (step.state * 3 + step.action) * 5 + step.t;
      l_replay[i] += step.reward;
      ++n_replay[i];
    }
  }
  CHECK_NOTHROW(c.check_consistent());
  CHECK(c.episodes() == 1000);
  for (std::size_t s = 0; s < 4; ++s)
    for (std::size_t a = 0; a < 3; ++a)
      for (std::size_t t = 0; t < 5; ++t) {
        const std::size_t i = (s * 3 + a) * 5 + t;
        CHECK(c.n(s, a, t) == n_replay[i]);
        CHECK(c.l(s, a, t) == doctest::Approx(l_replay[i]).epsilon(1e-12));
        std::uint64_t sum = 0;
        for (std::size_t sn = 0; sn < 4; ++sn) sum += c.m(sn, s, a, t);
        CHECK(sum == c.n(s, a, t));
      }
}

TEST_CASE("update rejects malformed trajectories without side effects") {
  VisitCounters c(2, 2, 2);
  const VisitCounters before = c;
  CHECK_THROWS_AS(update(c, Trajectory{{0, 0, 0, 0.0, 1}}), std::out_of_range);
  CHECK_THROWS_AS(update(c, Trajectory{{0, 0, 0, 0.0, 1}, {1, 5, 0, 0.0, 0}}), std::out_of_range);
  CHECK_THROWS_AS(update(c, Trajectory{{0, 0, 0, 0.0, 1}, {1, 1, 2, 0.0, 0}}), std::out_of_range);
  CHECK_THROWS_AS(update(c, Trajectory{{0, 0, 0, 0.0, 1}, {1, 1, 0, 0.0, 2}}), std::out_of_range);
  CHECK_THROWS_AS(update(c, Trajectory{{0, 0, 0, 0.0, 1}, {0, 1, 0, 0.0, 0}}), std::out_of_range);
  CHECK(c == before);

  CHECK_THROWS_AS(VisitCounters::from_raw(2, 1, 1, {1, 0, 0, 0}, {2.0, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(VisitCounters::from_raw(2, 1, 2, {1, 0, 0, 0, 0, 0, 0, 0}, {0, 0, 0, 0}),
                  std::invalid_argument);
}

TEST_CASE("run_agent edge cases") {
  RandomMDPSpec spec{3, 2, 4, 0.1, 0.5, 3};
  const auto mdp = random_mdp(spec);
  Rng rng(1);
  CHECK(run_agent(mdp, 0, 0.1, rng).records.empty());

  TabularMDP single(1, 1, 3);
  single.set_reward(0, 0, 1, {RewardModel::Kind::Bernoulli, 0.3});
  Rng rng2(2);
  const auto log = run_agent(single, 50, 0.1, rng2);
  REQUIRE(log.size() == 50);
  for (const auto& r : log.records) {
    CHECK(r.delta_k == 0.0);
    CHECK(r.optimistic_value >= log.meta.rho_star);
  }
  CHECK(log.records.front().k == 1);
  CHECK(log.records.back().k == 50);
}

TEST_CASE("run_agent is deterministic and learns") {
  RandomMDPSpec spec{3, 2, 4, 0.1, 0.5, 11};
  const auto mdp = random_mdp(spec);
  Rng a(5), b(5);
  const auto la = run_agent(mdp, 20'000, 0.1, a);
  const auto lb = run_agent(mdp, 20'000, 0.1, b);
  REQUIRE(la.size() == lb.size());
  for (std::size_t i = 0; i < la.size(); ++i) {
    CHECK(la.records[i].delta_k == lb.records[i].delta_k);
    CHECK(la.records[i].optimistic_value == lb.records[i].optimistic_value);
  }
  double first = 0.0, last = 0.0;
  for (std::size_t i = 0; i < 2000; ++i) {
    first += la.records[i].delta_k;
    last += la.records[la.size() - 1 - i].delta_k;
  }
  CHECK(last < first);
  CHECK(optimism_violations(la, la.meta.rho_star, 1e-9) == 0);
}

TEST_CASE("known rewards and lazy replanning") {
  RandomMDPSpec spec{3, 2, 4, 0.1, 0.5, 12};
  const auto mdp = random_mdp(spec);
  AgentOptions options;
  options.known_rewards = true;
  options.plan_every = 5;
  Rng rng(3);
  const auto log = run_agent(mdp, 500, options, rng);
  CHECK(log.meta.known_rewards);
  CHECK(log.meta.plan_every == 5);
  for (std::size_t i = 0; i < log.size(); ++i)
    if (i % 5 != 0) CHECK(log.records[i].delta_k == log.records[i - i % 5].delta_k);
}
